#include "sift/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "sift/error.hpp"

namespace sift {
namespace {

struct Extremes {
  double min;
  double max;
};

Extremes extreme_eigs(const SymMatrix& a) {
  const Vector ev = sym_eigvals(a);
  return {ev(0), ev(ev.size() - 1)};
}

}  // namespace

BoundsCertificate sift_certificate(const SiftConfig& cfg, const SymMatrix& r0, std::optional<double> beta) {
  cfg.validate();
  const Extremes r0e = extreme_eigs(r0);
  if (!(r0e.min > 0.0)) throw DomainError("sift_certificate: R0 is not positive definite");

  const double forget = 1.0 - cfg.lambda;
  BoundsCertificate cert;
  cert.r_min_lb = std::min(cfg.epsilon / forget, r0e.min);
  cert.p_max_ub = 1.0 / cert.r_min_lb;
  if (beta) {
    if (!(*beta > 0.0)) throw DomainError("sift_certificate: beta must be positive");
    cert.r_max_ub = std::max(*beta / forget, r0e.max);
    cert.p_min_lb = 1.0 / *cert.r_max_ub;
    cert.kappa_ub = (*beta * *cert.r_max_ub) / (cfg.epsilon * cert.r_min_lb);
  }
  return cert;
}

BoundsCertificate ef_certificate(double lambda, const SymMatrix& r0, const ExcitationBounds& excitation) {
  if (excitation.window != 1)
    throw UnsupportedWindow("ef_certificate: closed-form bounds exist only for persistency window 1");
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("ef_certificate: lambda must lie in (0,1)");
  if (!excitation.alpha || !(*excitation.alpha > 0.0))
    throw DomainError("ef_certificate: a positive excitation lower bound alpha is required");
  const Extremes r0e = extreme_eigs(r0);
  if (!(r0e.min > 0.0)) throw DomainError("ef_certificate: R0 is not positive definite");

  const double forget = 1.0 - lambda;
  BoundsCertificate cert;
  cert.r_min_lb = std::min(*excitation.alpha / forget, r0e.min);
  cert.p_max_ub = 1.0 / cert.r_min_lb;
  if (excitation.beta) {
    if (!(*excitation.beta > 0.0)) throw DomainError("ef_certificate: beta must be positive");
    cert.r_max_ub = std::max(*excitation.beta / forget, r0e.max);
    cert.p_min_lb = 1.0 / *cert.r_max_ub;
  }
  return cert;
}

double regressor_upper_bound(std::span<const RegressionSample> samples) {
  double beta = 0.0;
  for (const auto& s : samples) {
    if (s.phi().size() == 0) continue;
    const double smax = compact_svd(s.phi()).sigma(0);
    beta = std::max(beta, smax * smax);
  }
  return beta;
}

ViolationReport monitor_step(const EstimatorState& state, const BoundsCertificate& cert,
                             const FilteredSample* filtered, double tol) {
  ViolationReport report;
  const std::size_t k = state.step;
  const Extremes re = extreme_eigs(state.info);
  const Extremes pe = extreme_eigs(state.cov);

  if (re.min < cert.r_min_lb * (1.0 - tol)) report.push_back({k, "r_min", cert.r_min_lb, re.min});
  if (pe.max > cert.p_max_ub * (1.0 + tol)) report.push_back({k, "p_max", cert.p_max_ub, pe.max});
  if (cert.r_max_ub && re.max > *cert.r_max_ub * (1.0 + tol))
    report.push_back({k, "r_max", *cert.r_max_ub, re.max});
  if (cert.p_min_lb && pe.min < *cert.p_min_lb * (1.0 - tol))
    report.push_back({k, "p_min", *cert.p_min_lb, pe.min});

  if (filtered && cert.kappa_ub && filtered->q > 0) {
    const SymMatrix g(filtered->phi_bar * state.info.matrix() * filtered->phi_bar.transpose());
    const double kappa = condition_number(g);
    if (kappa > *cert.kappa_ub * (1.0 + tol)) report.push_back({k, "kappa", *cert.kappa_ub, kappa});
  }
  return report;
}

SymMatrix oblique_step(const SymMatrix& r, const Matrix& phi, double lambda, double epsilon) {
  if (phi.cols() != r.dim()) throw ShapeError("oblique_step: regressor and information matrix disagree");
  const Matrix ft = phi.transpose();
  Matrix next = r.matrix();
  add_rank_update(next, 1.0, ft, ft);

  const double phi_norm = phi.size() == 0 ? 0.0 : compact_svd(phi).sigma(0);
  if (phi_norm < epsilon) return SymMatrix(std::move(next));

  const Matrix lt = r.matrix() * ft;      // R phi^T
  const Matrix g = phi * lt;              // phi R phi^T
  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalFailure("oblique_step: SVD failed");
  const Vector& sigma = svd.singularValues();
  Vector inv_sigma = Vector::Zero(sigma.size());
  for (Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > 1e-12 * sigma(0)) inv_sigma(i) = 1.0 / sigma(i);
  const Matrix g_pinv = svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().transpose();
  next.noalias() -= (1.0 - lambda) * lt * g_pinv * lt.transpose();
  return SymMatrix(std::move(next));
}

}  // namespace sift
