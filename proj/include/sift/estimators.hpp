#pragma once

// Recursive least-squares estimators sharing one state layout:
//
//   * SIFt-RLS: forgets only inside the row space of the (singular-value
//     filtered) regressor, leaving unexcited directions of the information
//     matrix untouched.
//   * Exponential forgetting (EF): R+ = lambda R + phi^T phi.
//   * No forgetting (NF): EF with lambda = 1.

#include <cstddef>
#include <memory>
#include <optional>
#include <string_view>

#include "sift/numerics.hpp"

namespace sift {

/// One step's regressor phi (p x n) and measurement y (length p).
class RegressionSample {
 public:
  /// Throws ShapeError when y.size() != phi.rows(), DomainError on
  /// non-finite entries.
  RegressionSample(Matrix phi, Vector y);

  const Matrix& phi() const { return phi_; }
  const Vector& y() const { return y_; }
  Index measurements() const { return phi_.rows(); }
  Index parameters() const { return phi_.cols(); }

 private:
  Matrix phi_;
  Vector y_;
};

struct SiftConfig {
  double lambda = 0.5;
  double epsilon = 1e-4;
  /// Use the matrix-inversion-lemma covariance path when q <= q_max;
  /// 0 always inverts R directly.
  Index q_max = 0;

  /// Throws DomainError unless 0 < lambda < 1 and epsilon > 0.
  void validate() const;
};

/// Tolerance on ||R P - I||_max for a coherent state.
inline constexpr double kInvTol = 1e-8;

struct EstimatorState {
  Vector theta;
  SymMatrix info;  ///< R, the information matrix
  SymMatrix cov;   ///< P = R^{-1}
  std::size_t step = 0;

  /// theta = 0, R = P = I.
  static EstimatorState initial(Index n);
  /// P is computed from R by Cholesky inversion.
  static EstimatorState from_info(Vector theta, SymMatrix info);

  /// max |(R P - I)_ij|
  double coherence_error() const;
};

struct FilteredSample {
  Matrix phi_bar;  ///< q x n
  Vector y_bar;    ///< q
  Index q = 0;
  Vector sigma;    ///< all min(p, n) singular values of phi, descending
};

struct SiftStepTrace {
  FilteredSample filtered;
  SymMatrix r_parallel;
  SymMatrix r_perp;
  SymMatrix r_bar;
  bool used_mil = false;
};

struct SiftStepResult {
  EstimatorState state;
  SiftStepTrace trace;
};

/// Keeps the left singular directions of phi whose singular value is at
/// least sqrt(epsilon) and projects phi and y onto them. q may be 0.
FilteredSample information_filter(const RegressionSample& sample, double epsilon);

/// One SIFt-RLS step. When nothing survives filtering, theta, R and P are
/// carried over and only the step counter advances.
SiftStepResult sift_step(const EstimatorState& state, const RegressionSample& sample, const SiftConfig& cfg);

/// One exponential-forgetting step, 0 < lambda <= 1.
EstimatorState ef_step(const EstimatorState& state, const RegressionSample& sample, double lambda);

/// ef_step with lambda = 1.
EstimatorState nf_step(const EstimatorState& state, const RegressionSample& sample);

/// I - P_{k+1} phi_bar^T phi_bar: the transition matrix of the estimation
/// error under noiseless fixed-parameter data.
Matrix error_dynamics_factor(const EstimatorState& state_next, const FilteredSample& filtered);

enum class EstimatorKind { Sift, ExponentialForgetting, NoForgetting };

std::string_view to_string(EstimatorKind kind);
/// Accepts "sift", "ef", "nf".
std::optional<EstimatorKind> parse_estimator_kind(std::string_view name);

/// Stateful wrapper over the step functions. Other forgetting schemes plug
/// in by deriving from this class.
class Estimator {
 public:
  explicit Estimator(EstimatorState initial) : state_(std::move(initial)) {}
  virtual ~Estimator() = default;

  virtual std::string_view name() const = 0;
  virtual void step(const RegressionSample& sample) = 0;

  const EstimatorState& state() const { return state_; }
  const Vector& theta() const { return state_.theta; }
  const SymMatrix& info() const { return state_.info; }
  const SymMatrix& cov() const { return state_.cov; }

 protected:
  EstimatorState state_;
};

class SiftRls final : public Estimator {
 public:
  SiftRls(SiftConfig cfg, EstimatorState initial);

  std::string_view name() const override { return "sift"; }
  void step(const RegressionSample& sample) override;

  const SiftConfig& config() const { return cfg_; }
  /// Diagnostics from the most recent step, if any.
  const std::optional<SiftStepTrace>& last_trace() const { return last_trace_; }

 private:
  SiftConfig cfg_;
  std::optional<SiftStepTrace> last_trace_;
};

class ExponentialForgettingRls final : public Estimator {
 public:
  ExponentialForgettingRls(double lambda, EstimatorState initial);

  std::string_view name() const override { return "ef"; }
  void step(const RegressionSample& sample) override;
  double lambda() const { return lambda_; }

 private:
  double lambda_;
};

class NoForgettingRls final : public Estimator {
 public:
  explicit NoForgettingRls(EstimatorState initial) : Estimator(std::move(initial)) {}

  std::string_view name() const override { return "nf"; }
  void step(const RegressionSample& sample) override;
};

}  // namespace sift
