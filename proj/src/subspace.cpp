#include "sift/subspace.hpp"

#include <string>

#include "sift/error.hpp"

namespace sift {

Index numerical_rank(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  const Vector sigma = compact_svd(m).sigma;
  const double cut = rel_tol * sigma(0);
  Index r = 0;
  while (r < sigma.size() && sigma(r) > cut) ++r;
  return r;
}

SubspaceBasis::SubspaceBasis(Matrix v) : v_(std::move(v)) {
  const Index n = v_.rows();
  const Index p = v_.cols();
  if (p < 1 || p > n)
    throw DomainError("SubspaceBasis: need 1 <= p <= n, got p=" + std::to_string(p) + ", n=" + std::to_string(n));
  require_finite(v_, "SubspaceBasis");
  const Vector sigma = compact_svd(v_).sigma;
  if (!(sigma(0) > 0.0) || sigma(p - 1) <= kRankTol * sigma(0))
    throw RankDeficiency("SubspaceBasis: columns are linearly dependent");
}

Decomposition decompose(const SymMatrix& a, const SubspaceBasis& s) {
  const Index n = a.dim();
  const Index p = s.dim();
  if (s.ambient_dim() != n)
    throw ShapeError("decompose: basis lives in R^" + std::to_string(s.ambient_dim()) + ", matrix is " +
                     std::to_string(n) + "x" + std::to_string(n));
  if (Eigen::LLT<Matrix>(a.matrix()).info() != Eigen::Success)
    throw DomainError("decompose: matrix is not positive definite");

  const Matrix& v = s.vectors();
  const Matrix av = a.matrix() * v;         // n x p
  const Matrix gram = v.transpose() * av;   // v^T A v
  Eigen::LLT<Matrix> llt(0.5 * (gram + gram.transpose()));
  if (llt.info() != Eigen::Success) throw RankDeficiency("decompose: v^T A v is singular");

  SymMatrix parallel(av * llt.solve(av.transpose()));
  if (p == n) return {a, SymMatrix::zero(n), p};
  SymMatrix orthogonal(a.matrix() - parallel.matrix());
  return {std::move(parallel), std::move(orthogonal), p};
}

double a_inner_product(const Vector& x, const Vector& y, const SymMatrix& a) {
  if (x.size() != a.dim() || y.size() != a.dim())
    throw ShapeError("a_inner_product: vector lengths " + std::to_string(x.size()) + ", " +
                     std::to_string(y.size()) + " vs matrix dimension " + std::to_string(a.dim()));
  return x.dot(a.matrix() * y);
}

std::optional<SubspaceBasis> orthogonal_complement_basis(const SubspaceBasis& s, const SymMatrix& a) {
  const Index n = a.dim();
  const Index p = s.dim();
  if (s.ambient_dim() != n) throw ShapeError("orthogonal_complement_basis: dimension mismatch");
  if (p == n) return std::nullopt;
  const Matrix vta = s.vectors().transpose() * a.matrix();  // p x n
  Eigen::JacobiSVD<Matrix> svd(vta, Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw NumericalFailure("orthogonal_complement_basis: SVD failed");
  return SubspaceBasis(svd.matrixV().rightCols(n - p));
}

bool verify_uniqueness(const SymMatrix& a, const SubspaceBasis& s, const Matrix& candidate, double tol) {
  const Index n = a.dim();
  if (candidate.rows() != n || candidate.cols() != n || !candidate.allFinite()) return false;
  if (s.ambient_dim() != n) return false;

  const double scale = std::max(candidate.norm(), a.matrix().norm());
  if ((candidate - candidate.transpose()).norm() > tol * scale) return false;
  if (numerical_rank(candidate) != s.dim()) return false;
  for (Index j = 0; j < s.dim(); ++j) {
    const Vector x = s.vectors().col(j);
    const Vector ax = a.matrix() * x;
    if ((candidate * x - ax).norm() > tol * ax.norm()) return false;
  }
  return true;
}

}  // namespace sift
