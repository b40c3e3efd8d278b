#pragma once

// Decomposition of a positive-definite matrix A relative to a subspace S:
//
//   A = A_par + A_orth,   A_par = A v (v^T A v)^{-1} v^T A
//
// where the columns of v span S. A_par acts like A on S and has rank dim S;
// A_orth annihilates S and has rank n - dim S. Both are positive
// semidefinite and neither depends on the choice of basis.

#include <optional>

#include "sift/numerics.hpp"

namespace sift {

/// Relative threshold (times the largest singular value) for numerical rank.
inline constexpr double kRankTol = 1e-8;
/// Relative threshold (times lambda_max(A)) on the smallest eigenvalue for
/// positive semidefiniteness.
inline constexpr double kPsdTol = 1e-10;

/// Number of singular values of m above rel_tol * sigma_max.
Index numerical_rank(const Matrix& m, double rel_tol = kRankTol);

/// n x p matrix with linearly independent columns, 1 <= p <= n.
class SubspaceBasis {
 public:
  /// Throws DomainError when p == 0, p > n or entries are non-finite, and
  /// RankDeficiency when the columns are numerically dependent.
  explicit SubspaceBasis(Matrix v);

  const Matrix& vectors() const { return v_; }
  Index ambient_dim() const { return v_.rows(); }
  Index dim() const { return v_.cols(); }

 private:
  Matrix v_;
};

struct Decomposition {
  SymMatrix parallel;
  SymMatrix orthogonal;
  Index subspace_dim = 0;
};

/// Throws DomainError if a is not positive definite, ShapeError on a
/// dimension mismatch, RankDeficiency if v^T A v is singular.
/// For p == n the orthogonal part is the exact zero matrix.
Decomposition decompose(const SymMatrix& a, const SubspaceBasis& s);

/// x^T A y
double a_inner_product(const Vector& x, const Vector& y, const SymMatrix& a);

/// Basis of {x : x^T A v = 0}, the complement of S under <.,.>_A, taken from
/// the trailing right singular vectors of v^T A. Empty (nullopt) when S is
/// the whole space.
std::optional<SubspaceBasis> orthogonal_complement_basis(const SubspaceBasis& s, const SymMatrix& a);

/// True iff candidate is symmetric, has numerical rank dim S and agrees with
/// A on every basis vector of S, all to relative tolerance tol. Such a
/// candidate is necessarily decompose(a, s).parallel.
bool verify_uniqueness(const SymMatrix& a, const SubspaceBasis& s, const Matrix& candidate,
                       double tol = 1e-8);

}  // namespace sift
