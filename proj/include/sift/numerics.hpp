#pragma once

// Linear-algebra substrate: matrix types, factorizations with ordered
// outputs, and the rank-q matrix-inversion-lemma updates of the covariance.

#include <Eigen/Dense>
#include <optional>

namespace sift {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative reconstruction tolerance expected of compact_svd.
inline constexpr double kTolSvd = 1e-10;
/// Tolerance on U^T U = I for the left singular vectors.
inline constexpr double kTolOrth = 1e-10;

/// Throws DomainError if any entry of m is NaN or infinite.
void require_finite(const Eigen::Ref<const Matrix>& m, const char* what);

/// A real symmetric matrix. Construction symmetrizes, so mirrored entries
/// are bitwise equal for every value of this type.
class SymMatrix {
 public:
  SymMatrix() = default;
  /// Throws ShapeError if a is not square, DomainError if it has a
  /// non-finite entry.
  explicit SymMatrix(Matrix a);

  static SymMatrix identity(Index n);
  static SymMatrix zero(Index n);
  static SymMatrix diagonal(const Vector& d);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  Matrix m_;
};

struct CompactSvd {
  Matrix u;                ///< rows x min(rows, cols), orthonormal columns
  Vector sigma;            ///< descending, non-negative
  std::optional<Matrix> v; ///< cols x min(rows, cols), only when requested
};

/// Thin SVD with singular values in descending order. Right singular vectors
/// are skipped unless compute_v is set.
CompactSvd compact_svd(const Matrix& m, bool compute_v = false);

/// All eigenvalues of a, ascending.
Vector sym_eigvals(const SymMatrix& a);

double spectral_radius(const SymMatrix& a);

/// lambda_max / lambda_min for positive semidefinite a, +infinity when a is
/// singular to working precision. Throws DomainError when a has an
/// eigenvalue below -1e-10 * lambda_max.
double condition_number(const SymMatrix& a);

/// (a + a^T) / 2. Throws ShapeError for non-square input.
SymMatrix symmetrize(const Matrix& a);

/// Inverse of a symmetric positive-definite matrix via Cholesky.
/// Throws NumericalFailure if a is not numerically positive definite.
SymMatrix inverse_spd(const SymMatrix& a);

enum class MilMode {
  /// P_bar = P + (1 - lambda)/lambda * phi^T (L phi^T)^{-1} phi, with L = phi R
  Sifting,
  /// P_next = P - P phi^T (I + phi P phi^T)^{-1} phi P
  Measurement,
};

/// Rank-q covariance update by the matrix inversion lemma.
///
/// phi_bar is q x n with full row rank. In Sifting mode the caller passes the
/// product info_product = phi_bar * R (q x n) it already formed for the
/// information update, so R is never inverted here; lambda is ignored in
/// Measurement mode. The result is symmetrized.
///
/// Throws NumericalFailure if the inner q x q system is not positive
/// definite, ShapeError on mismatched operands, std::invalid_argument if
/// Sifting mode is requested without info_product.
SymMatrix mil_rank_q_update(const SymMatrix& p, const Matrix& phi_bar, MilMode mode,
                            double lambda = 1.0, const Matrix* info_product = nullptr);

// Dense products routed through the active kernel table (see kernels.hpp).

/// a * b
Matrix multiply(const Matrix& a, const Matrix& b);
/// a^T * b
Matrix multiply_tn(const Matrix& a, const Matrix& b);
/// c += alpha * a * b^T, with a, b both n x q and c n x n.
void add_rank_update(Matrix& c, double alpha, const Matrix& a, const Matrix& b);
/// In-place (c + c^T)/2 through the kernel table.
void symmetrize_in_place(Matrix& c);

}  // namespace sift
