#include "sift/harness.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "sift/error.hpp"

namespace sift {

void ScenarioConfig::validate() const {
  if (n != 4 || p != 2) throw DomainError("scenario: only n = 4 parameters with p = 2 measurements is defined");
  if (!(0 < phase2_start && phase2_start < phase3_start && phase3_start + 1 < horizon))
    throw DomainError("scenario: need 0 < phase2_start < phase3_start < horizon - 1 (horizon " +
                      std::to_string(horizon) + ", boundaries " + std::to_string(phase2_start) + ", " +
                      std::to_string(phase3_start) + ")");
  if (regressor_noise_var < 0.0 || measurement_noise_var < 0.0 || leakage_var < 0.0)
    throw DomainError("scenario: variances must be non-negative");
}

ScenarioConfig noiseless(ScenarioConfig cfg) {
  cfg.regressor_noise_var = 0.0;
  cfg.measurement_noise_var = 0.0;
  cfg.leakage_var = 0.0;
  return cfg;
}

Vector theta_true(std::size_t k) {
  const double t = static_cast<double>(k);
  Vector theta(4);
  theta << std::sin(std::numbers::pi * t / 60.0), std::cos(t / 60.0), std::sin(t / 225.0), std::cos(t / 225.0);
  return theta;
}

std::vector<RegressionSample> generate_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double leak = std::sqrt(cfg.leakage_var);
  const double reg_noise = std::sqrt(cfg.regressor_noise_var);
  const double meas_noise = std::sqrt(cfg.measurement_noise_var);
  const Eigen::RowVector4d direction(0.0, 2.0, 1.0, 0.0);

  std::vector<RegressionSample> samples;
  samples.reserve(cfg.samples());
  for (std::size_t k = 0; k < cfg.samples(); ++k) {
    Matrix phi(2, 4);
    if (k < cfg.phase3_start) {
      // Row stddevs: (1, 1, leak, leak) in phase 1, swapped in phase 2.
      const bool first = k < cfg.phase2_start;
      const double scale[4] = {first ? 1.0 : leak, first ? 1.0 : leak, first ? leak : 1.0, first ? leak : 1.0};
      for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 4; ++j) phi(i, j) = scale[j] * gauss(rng);
    } else {
      const double s0 = gauss(rng);
      const double s1 = gauss(rng);
      phi.row(0) = s0 * direction;
      phi.row(1) = s1 * direction;
      for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 4; ++j) phi(i, j) += leak * gauss(rng);
    }

    Matrix v(2, 4);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 4; ++j) v(i, j) = reg_noise * gauss(rng);
    Vector w(2);
    w(0) = meas_noise * gauss(rng);
    w(1) = meas_noise * gauss(rng);

    Vector y = (phi + v) * theta_true(k) + w;
    samples.emplace_back(std::move(phi), std::move(y));
  }
  return samples;
}

ProjectedParams projected_params(const Vector& theta) {
  if (theta.size() != 4) throw ShapeError("projected_params: expected 4 parameters");
  return {(2.0 / 3.0) * theta(1) + (1.0 / 3.0) * theta(2), (1.0 / 3.0) * theta(1) - (2.0 / 3.0) * theta(2)};
}

std::vector<MetricsRecord> compute_metrics(const Trajectory& trajectory, const ScenarioConfig& cfg,
                                           const TruthFn& truth) {
  cfg.validate();
  if (trajectory.theta.size() != cfg.horizon || trajectory.cov.size() != cfg.horizon)
    throw ShapeError("compute_metrics: trajectory has " + std::to_string(trajectory.theta.size()) +
                     " estimates, scenario horizon is " + std::to_string(cfg.horizon));

  const std::size_t b1 = cfg.phase2_start;
  const std::size_t b2 = cfg.phase3_start;
  const std::size_t last = cfg.horizon - 1;
  const Vector& at_start = trajectory.theta[0];
  const Vector& at_b1 = trajectory.theta[b1];
  const Vector& at_b2 = trajectory.theta[b2];
  const double perp_b2 = projected_params(at_b2).perp;

  std::vector<MetricsRecord> out;
  out.reserve(cfg.horizon);
  for (std::size_t k = 0; k <= last; ++k) {
    const Vector& th = trajectory.theta[k];
    MetricsRecord r;
    r.k = k;
    r.rho_p = spectral_radius(trajectory.cov[k]);

    if (truth) {
      const Vector err = th - truth(k);
      if (k <= b2) {
        r.e12 = std::hypot(err(0), err(1));
        r.e34 = std::hypot(err(2), err(3));
      }
      if (k >= b2) {
        const ProjectedParams est = projected_params(th);
        const ProjectedParams tru = projected_params(truth(k));
        r.e_par = std::abs(est.parallel - tru.parallel);
        const double dperp = est.perp - tru.perp;
        r.e_perp = std::sqrt(err(0) * err(0) + err(3) * err(3) + dperp * dperp);
      }
    }
    if (k >= 1 && k <= b1) r.delta34 = std::hypot(th(2) - at_start(2), th(3) - at_start(3));
    if (k > b1 && k <= b2) r.delta12 = std::hypot(th(0) - at_b1(0), th(1) - at_b1(1));
    if (k > b2) {
      const double d1 = th(0) - at_b2(0);
      const double d4 = th(3) - at_b2(3);
      const double dp = projected_params(th).perp - perp_b2;
      r.delta_perp = std::sqrt(d1 * d1 + d4 * d4 + dp * dp);
    }
    out.push_back(r);
  }
  return out;
}

RunResult run_estimator(Estimator& estimator, const std::vector<RegressionSample>& samples,
                        const BoundsCertificate* certificate) {
  RunResult result;
  auto& traj = result.trajectory;
  traj.theta.reserve(samples.size() + 1);
  traj.cov.reserve(samples.size() + 1);
  traj.theta.push_back(estimator.theta());
  traj.cov.push_back(estimator.cov());

  auto* sift = dynamic_cast<SiftRls*>(&estimator);
  for (const auto& sample : samples) {
    std::optional<EstimatorState> before;
    if (certificate) before = estimator.state();
    estimator.step(sample);
    traj.theta.push_back(estimator.theta());
    traj.cov.push_back(estimator.cov());
    if (certificate) {
      const FilteredSample* filtered = sift && sift->last_trace() ? &sift->last_trace()->filtered : nullptr;
      for (auto& v : monitor_step(*before, *certificate, filtered)) result.violations.push_back(std::move(v));
    }
  }
  if (certificate)
    for (auto& v : monitor_step(estimator.state(), *certificate)) result.violations.push_back(std::move(v));
  return result;
}

std::optional<double> max_metric(const std::vector<MetricsRecord>& records,
                                 std::optional<double> MetricsRecord::*field) {
  std::optional<double> best;
  for (const auto& r : records) {
    const auto& value = r.*field;
    if (value && (!best || *value > *best)) best = *value;
  }
  return best;
}

}  // namespace sift
