#pragma once

// Explicit eigenvalue certificates for the information and covariance
// matrices, a runtime monitor that checks a state against them, and the
// oblique-projection update whose information matrix can degenerate.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sift/estimators.hpp"

namespace sift {

/// Data properties of a regressor sequence: alpha I <= sum over a window of
/// phi^T phi (persistent excitation) and phi^T phi <= beta I (boundedness).
struct ExcitationBounds {
  std::optional<double> alpha;
  std::optional<double> beta;
  std::size_t window = 1;
};

struct BoundsCertificate {
  double r_min_lb = 0.0;  ///< lower bound on lambda_min(R_k)
  double p_max_ub = 0.0;  ///< upper bound on lambda_max(P_k) = 1 / r_min_lb
  std::optional<double> r_max_ub;  ///< upper bound on lambda_max(R_k), needs beta
  std::optional<double> p_min_lb;  ///< lower bound on lambda_min(P_k) = 1 / r_max_ub
  std::optional<double> kappa_ub;  ///< bound on cond(phi_bar R phi_bar^T)
};

/// SIFt-RLS bounds; hold for any regressor sequence. beta enables the upper
/// information bound and the condition-number bound.
BoundsCertificate sift_certificate(const SiftConfig& cfg, const SymMatrix& r0, std::optional<double> beta);

/// Exponential-forgetting bounds under persistent excitation with window 1.
/// Throws UnsupportedWindow for any other window and DomainError when alpha
/// is missing or lambda is outside (0,1).
BoundsCertificate ef_certificate(double lambda, const SymMatrix& r0, const ExcitationBounds& excitation);

/// max_k lambda_max(phi_k^T phi_k) over the given samples.
double regressor_upper_bound(std::span<const RegressionSample> samples);

/// Relative slack for the runtime monitor.
inline constexpr double kMonitorTol = 1e-9;

struct Violation {
  std::size_t step = 0;
  std::string bound;  ///< r_min, r_max, p_max, p_min or kappa
  double bound_value = 0.0;
  double observed = 0.0;
};

using ViolationReport = std::vector<Violation>;

/// Checks a state against a certificate. When filtered is given, the
/// conditioning of phi_bar R phi_bar^T is checked too; state must then be the
/// state the filtered sample was applied to. An empty report means pass.
ViolationReport monitor_step(const EstimatorState& state, const BoundsCertificate& cert,
                             const FilteredSample* filtered = nullptr, double tol = kMonitorTol);

/// Information update of the oblique-projection directional-forgetting
/// variant:
///   R+ = R - (1 - lambda) R phi^T (phi R phi^T)^+ phi R + phi^T phi   if ||phi||_2 >= epsilon
///   R+ = R + phi^T phi                                                otherwise
/// The pseudoinverse drops singular values below 1e-12 * sigma_max.
SymMatrix oblique_step(const SymMatrix& r, const Matrix& phi, double lambda, double epsilon);

}  // namespace sift
