#include "sift/estimators.hpp"

#include <cmath>
#include <string>

#include "sift/error.hpp"

namespace sift {
namespace {

void require_params(const EstimatorState& state, const RegressionSample& sample, const char* who) {
  if (sample.parameters() != state.theta.size())
    throw ShapeError(std::string(who) + ": regressor has " + std::to_string(sample.parameters()) +
                     " columns, estimator has " + std::to_string(state.theta.size()) + " parameters");
}

Eigen::LLT<Matrix> factor_inner(Matrix g, const char* who) {
  symmetrize_in_place(g);
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success)
    throw NumericalFailure(std::string(who) + ": inner system is not positive definite");
  return llt;
}

}  // namespace

RegressionSample::RegressionSample(Matrix phi, Vector y) : phi_(std::move(phi)), y_(std::move(y)) {
  if (phi_.rows() != y_.size())
    throw ShapeError("RegressionSample: regressor has " + std::to_string(phi_.rows()) + " rows but " +
                     std::to_string(y_.size()) + " measurements");
  require_finite(phi_, "RegressionSample regressor");
  require_finite(y_, "RegressionSample measurement");
}

void SiftConfig::validate() const {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in the open interval (0,1)");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be positive");
  if (q_max < 0) throw DomainError("q_max must be non-negative");
}

EstimatorState EstimatorState::initial(Index n) {
  return {Vector::Zero(n), SymMatrix::identity(n), SymMatrix::identity(n), 0};
}

EstimatorState EstimatorState::from_info(Vector theta, SymMatrix info) {
  if (theta.size() != info.dim()) throw ShapeError("EstimatorState: theta and R sizes differ");
  SymMatrix cov = inverse_spd(info);
  return {std::move(theta), std::move(info), std::move(cov), 0};
}

double EstimatorState::coherence_error() const {
  const Matrix rp = info.matrix() * cov.matrix();
  return (rp - Matrix::Identity(rp.rows(), rp.cols())).cwiseAbs().maxCoeff();
}

FilteredSample information_filter(const RegressionSample& sample, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("information_filter: epsilon must be positive");
  CompactSvd svd = compact_svd(sample.phi());
  const double threshold = std::sqrt(epsilon);
  Index q = 0;
  while (q < svd.sigma.size() && svd.sigma(q) >= threshold) ++q;

  FilteredSample out;
  out.q = q;
  out.sigma = std::move(svd.sigma);
  const auto u_bar = svd.u.leftCols(q);
  out.phi_bar = u_bar.transpose() * sample.phi();
  out.y_bar = u_bar.transpose() * sample.y();
  return out;
}

SiftStepResult sift_step(const EstimatorState& state, const RegressionSample& sample, const SiftConfig& cfg) {
  cfg.validate();
  require_params(state, sample, "sift_step");
  const Index n = state.theta.size();
  if (cfg.q_max > std::min(sample.measurements(), n))
    throw DomainError("sift_step: q_max exceeds min(p, n) = " +
                      std::to_string(std::min(sample.measurements(), n)));

  FilteredSample filtered = information_filter(sample, cfg.epsilon);
  const Index q = filtered.q;

  if (q == 0) {
    EstimatorState next = state;
    ++next.step;
    SiftStepTrace trace{std::move(filtered), SymMatrix::zero(n), state.info, state.info, false};
    return {std::move(next), std::move(trace)};
  }

  const Matrix& phi_bar = filtered.phi_bar;
  const Matrix ft = phi_bar.transpose();               // n x q
  const Matrix lt = multiply(state.info.matrix(), ft);  // L^T with L = phi_bar R
  const auto llt = factor_inner(multiply_tn(lt, ft), "sift_step");
  const Matrix yt = llt.solve(lt.transpose()).transpose();  // L^T (L phi_bar^T)^{-1}

  Matrix r_par = Matrix::Zero(n, n);
  add_rank_update(r_par, 1.0, lt, yt);
  SymMatrix r_parallel(std::move(r_par));

  Matrix r_bar_m = state.info.matrix();
  add_rank_update(r_bar_m, -(1.0 - cfg.lambda), lt, yt);
  SymMatrix r_bar(std::move(r_bar_m));

  Matrix r_next = r_bar.matrix();
  add_rank_update(r_next, 1.0, ft, ft);

  const bool use_mil = q <= cfg.q_max;
  SymMatrix cov_next;
  SymMatrix info_next(std::move(r_next));
  if (use_mil) {
    const Matrix l = lt.transpose();
    const SymMatrix p_bar = mil_rank_q_update(state.cov, phi_bar, MilMode::Sifting, cfg.lambda, &l);
    cov_next = mil_rank_q_update(p_bar, phi_bar, MilMode::Measurement);
  } else {
    cov_next = inverse_spd(info_next);
  }

  const Vector correction = ft * (filtered.y_bar - phi_bar * state.theta);
  EstimatorState next{state.theta + cov_next.matrix() * correction, std::move(info_next),
                      std::move(cov_next), state.step + 1};

  SymMatrix r_perp(state.info.matrix() - r_parallel.matrix());
  SiftStepTrace trace{std::move(filtered), std::move(r_parallel), std::move(r_perp), std::move(r_bar), use_mil};
  return {std::move(next), std::move(trace)};
}

EstimatorState ef_step(const EstimatorState& state, const RegressionSample& sample, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("ef_step: lambda must lie in (0,1]");
  require_params(state, sample, "ef_step");
  const Matrix& phi = sample.phi();
  const Matrix ft = phi.transpose();  // n x p

  Matrix r_next = lambda * state.info.matrix();
  add_rank_update(r_next, 1.0, ft, ft);

  const Matrix wt = multiply(state.cov.matrix(), ft);  // P phi^T
  Matrix s = multiply_tn(ft, wt);                      // phi P phi^T
  s.diagonal().array() += lambda;
  const auto llt = factor_inner(std::move(s), "ef_step");
  const Matrix zt = llt.solve(wt.transpose()).transpose();

  Matrix p_next = state.cov.matrix();
  add_rank_update(p_next, -1.0, wt, zt);
  if (lambda != 1.0) p_next *= 1.0 / lambda;

  SymMatrix cov_next(std::move(p_next));
  const Vector correction = ft * (sample.y() - phi * state.theta);
  return {state.theta + cov_next.matrix() * correction, SymMatrix(std::move(r_next)), std::move(cov_next),
          state.step + 1};
}

EstimatorState nf_step(const EstimatorState& state, const RegressionSample& sample) {
  return ef_step(state, sample, 1.0);
}

Matrix error_dynamics_factor(const EstimatorState& state_next, const FilteredSample& filtered) {
  const Index n = state_next.theta.size();
  if (filtered.q == 0) return Matrix::Identity(n, n);
  if (filtered.phi_bar.cols() != n) throw ShapeError("error_dynamics_factor: dimension mismatch");
  return Matrix::Identity(n, n) -
         state_next.cov.matrix() * (filtered.phi_bar.transpose() * filtered.phi_bar);
}

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Sift: return "sift";
    case EstimatorKind::ExponentialForgetting: return "ef";
    case EstimatorKind::NoForgetting: return "nf";
  }
  return "unknown";
}

std::optional<EstimatorKind> parse_estimator_kind(std::string_view name) {
  if (name == "sift") return EstimatorKind::Sift;
  if (name == "ef") return EstimatorKind::ExponentialForgetting;
  if (name == "nf") return EstimatorKind::NoForgetting;
  return std::nullopt;
}

SiftRls::SiftRls(SiftConfig cfg, EstimatorState initial) : Estimator(std::move(initial)), cfg_(cfg) {
  cfg_.validate();
}

void SiftRls::step(const RegressionSample& sample) {
  auto result = sift_step(state_, sample, cfg_);
  state_ = std::move(result.state);
  last_trace_ = std::move(result.trace);
}

ExponentialForgettingRls::ExponentialForgettingRls(double lambda, EstimatorState initial)
    : Estimator(std::move(initial)), lambda_(lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("exponential forgetting: lambda must lie in (0,1]");
}

void ExponentialForgettingRls::step(const RegressionSample& sample) { state_ = ef_step(state_, sample, lambda_); }

void NoForgettingRls::step(const RegressionSample& sample) { state_ = nf_step(state_, sample); }

}  // namespace sift
