#pragma once

// Nonuniform-excitation benchmark: four time-varying parameters, two
// measurements per step, and three excitation phases that excite
// S12 = span{e1, e2}, then S34 = span{e3, e4}, then only the single direction
// [0 2 1 0].
//
// Gaussian draws come from std::mt19937_64 through std::normal_distribution,
// in this order for each step k:
//   phases 1-2: the 2x4 regressor, row-major;
//   phase 3:    the 2 mixing coefficients, then the 2x4 leakage, row-major;
//   then the 2x4 regressor noise (row-major), then the 2 measurement noises.
// A given seed reproduces the stream bit-for-bit on the same standard library.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sift/bounds.hpp"
#include "sift/estimators.hpp"

namespace sift {

struct ScenarioConfig {
  Index n = 4;
  Index p = 2;
  /// Number of parameter estimates theta_0..theta_{horizon-1}; one sample
  /// fewer is generated.
  std::size_t horizon = 1201;
  std::size_t phase2_start = 400;
  std::size_t phase3_start = 800;
  double regressor_noise_var = 1e-2;
  double measurement_noise_var = 1e-2;
  double leakage_var = 1e-4;
  std::uint64_t seed = 1;

  /// Throws DomainError on inconsistent boundaries or negative variances.
  void validate() const;
  std::size_t samples() const { return horizon - 1; }
};

/// The same scenario with every noise and leakage variance set to zero.
ScenarioConfig noiseless(ScenarioConfig cfg);

/// [sin(pi k/60), cos(k/60), sin(k/225), cos(k/225)]
Vector theta_true(std::size_t k);

std::vector<RegressionSample> generate_scenario(const ScenarioConfig& cfg);

struct ProjectedParams {
  double parallel = 0.0;  ///< (2/3) theta_2 + (1/3) theta_3
  double perp = 0.0;      ///< (1/3) theta_2 - (2/3) theta_3
};

ProjectedParams projected_params(const Vector& theta);

/// Parameter estimates and covariance matrices theta_0..theta_K, P_0..P_K.
struct Trajectory {
  std::vector<Vector> theta;
  std::vector<SymMatrix> cov;
};

struct MetricsRecord {
  std::size_t k = 0;
  std::optional<double> e12, e34, e_par, e_perp;
  std::optional<double> delta12, delta34, delta_perp;
  double rho_p = 0.0;
};

using TruthFn = std::function<Vector(std::size_t)>;

/// Per-step metrics. Error metrics need the true parameters and are left
/// empty without them. Windows: e12/e34 on [0, phase3_start], e_par/e_perp on
/// [phase3_start, horizon-1]. Each drift metric covers the window where its
/// coordinates are unexcited: delta34 on [1, phase2_start] against theta_0,
/// delta12 on (phase2_start, phase3_start] against theta at phase2_start,
/// delta_perp on (phase3_start, horizon-1] against theta at phase3_start.
/// Throws ShapeError if the trajectory length is not cfg.horizon.
std::vector<MetricsRecord> compute_metrics(const Trajectory& trajectory, const ScenarioConfig& cfg,
                                           const TruthFn& truth = theta_true);

struct RunResult {
  Trajectory trajectory;
  ViolationReport violations;
};

/// Steps the estimator through every sample, recording the trajectory. If a
/// certificate is given, every state (and, for SIFt, each step's inner
/// conditioning) is checked against it.
RunResult run_estimator(Estimator& estimator, const std::vector<RegressionSample>& samples,
                        const BoundsCertificate* certificate = nullptr);

/// Peak of a metric column over its window; nullopt if the window is empty.
std::optional<double> max_metric(const std::vector<MetricsRecord>& records,
                                 std::optional<double> MetricsRecord::*field);

}  // namespace sift
