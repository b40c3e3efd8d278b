#include "sift/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sift/error.hpp"
#include "sift/kernels.hpp"

namespace sift {
namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

// Cholesky of a q x q system that must be positive definite.
Eigen::LLT<Matrix> factor_spd(const Matrix& g, const char* what) {
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success)
    throw NumericalFailure(std::string(what) + ": inner system is not positive definite");
  // Cholesky can pass on a singular matrix when rounding leaves a tiny
  // positive pivot.
  const double floor = static_cast<double>(g.rows()) * std::numeric_limits<double>::epsilon() *
                       g.diagonal().cwiseAbs().maxCoeff();
  if (g.rows() > 0 && llt.matrixLLT().diagonal().array().square().minCoeff() <= floor)
    throw NumericalFailure(std::string(what) + ": inner system is singular to working precision");
  return llt;
}

}  // namespace

void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
  if (!m.allFinite()) throw DomainError(std::string(what) + ": non-finite entry");
}

SymMatrix::SymMatrix(Matrix a) : m_(std::move(a)) {
  if (m_.rows() != m_.cols()) throw ShapeError("SymMatrix: expected square matrix, got " + shape(m_));
  require_finite(m_, "SymMatrix");
  symmetrize_in_place(m_);
}

SymMatrix SymMatrix::identity(Index n) { return SymMatrix(Matrix::Identity(n, n)); }

SymMatrix SymMatrix::zero(Index n) { return SymMatrix(Matrix::Zero(n, n)); }

SymMatrix SymMatrix::diagonal(const Vector& d) { return SymMatrix(Matrix(d.asDiagonal())); }

CompactSvd compact_svd(const Matrix& m, bool compute_v) {
  require_finite(m, "compact_svd");
  CompactSvd out;
  const Index k = std::min(m.rows(), m.cols());
  if (k == 0) {
    out.u = Matrix(m.rows(), 0);
    out.sigma = Vector(0);
    if (compute_v) out.v = Matrix(m.cols(), 0);
    return out;
  }
  const unsigned opts = compute_v ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : Eigen::ComputeThinU;
  Eigen::JacobiSVD<Matrix> svd(m, opts);
  if (svd.info() != Eigen::Success) throw NumericalFailure("compact_svd: factorization did not converge");
  out.u = svd.matrixU();
  out.sigma = svd.singularValues();
  if (compute_v) out.v = svd.matrixV();
  return out;
}

Vector sym_eigvals(const SymMatrix& a) {
  if (a.dim() == 0) return Vector(0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalFailure("sym_eigvals: eigensolver did not converge");
  return es.eigenvalues();
}

double spectral_radius(const SymMatrix& a) {
  const Vector ev = sym_eigvals(a);
  if (ev.size() == 0) return 0.0;
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

double condition_number(const SymMatrix& a) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const Vector ev = sym_eigvals(a);
  if (ev.size() == 0) return inf;
  const double lmin = ev(0);
  const double lmax = ev(ev.size() - 1);
  const double scale = std::max(std::abs(lmin), std::abs(lmax));
  if (lmin < -1e-10 * scale)
    throw DomainError("condition_number: matrix is not positive semidefinite");
  // Singular to working precision counts as semidefinite.
  const double floor = static_cast<double>(a.dim()) * std::numeric_limits<double>::epsilon() * lmax;
  if (lmax <= 0.0 || lmin <= floor) return inf;
  return lmax / lmin;
}

SymMatrix symmetrize(const Matrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("symmetrize: expected square matrix, got " + shape(a));
  return SymMatrix(a);
}

SymMatrix inverse_spd(const SymMatrix& a) {
  const auto llt = factor_spd(a.matrix(), "inverse_spd");
  return SymMatrix(llt.solve(Matrix::Identity(a.dim(), a.dim())));
}

SymMatrix mil_rank_q_update(const SymMatrix& p, const Matrix& phi_bar, MilMode mode, double lambda,
                            const Matrix* info_product) {
  const Index n = p.dim();
  const Index q = phi_bar.rows();
  if (phi_bar.cols() != n)
    throw ShapeError("mil_rank_q_update: phi_bar is " + shape(phi_bar) + ", covariance is " +
                     shape(p.matrix()));
  if (q == 0) return p;

  const Matrix ft = phi_bar.transpose();  // n x q
  Matrix out = p.matrix();

  if (mode == MilMode::Sifting) {
    if (info_product == nullptr)
      throw std::invalid_argument("mil_rank_q_update: sifting mode needs the cached product phi_bar * R");
    if (info_product->rows() != q || info_product->cols() != n)
      throw ShapeError("mil_rank_q_update: cached product is " + shape(*info_product) +
                       ", expected " + std::to_string(q) + "x" + std::to_string(n));
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("mil_rank_q_update: lambda must lie in (0,1)");
    // G = L phi_bar^T = phi_bar R phi_bar^T
    Matrix g = multiply(*info_product, ft);
    symmetrize_in_place(g);
    const auto llt = factor_spd(g, "mil_rank_q_update(sifting)");
    const Matrix zt = llt.solve(phi_bar).transpose();  // phi_bar^T G^{-1}
    add_rank_update(out, (1.0 - lambda) / lambda, ft, zt);
  } else {
    // M^T = P_bar phi_bar^T, S = I + M phi_bar^T
    const Matrix mt = multiply(p.matrix(), ft);
    Matrix s = multiply_tn(mt, ft);
    s.diagonal().array() += 1.0;
    symmetrize_in_place(s);
    const auto llt = factor_spd(s, "mil_rank_q_update(measurement)");
    const Matrix yt = llt.solve(mt.transpose()).transpose();  // M^T S^{-1}
    add_rank_update(out, -1.0, mt, yt);
  }
  return SymMatrix(std::move(out));
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("multiply: " + shape(a) + " * " + shape(b));
  Matrix c(a.rows(), b.cols());
  if (c.size() == 0) return c;
  if (a.cols() == 0) return c.setZero();
  kernels::active_kernels().gemm_nn(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(b.cols()),
                                    static_cast<std::size_t>(a.cols()), a.data(), b.data(), c.data());
  return c;
}

Matrix multiply_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("multiply_tn: " + shape(a) + "^T * " + shape(b));
  Matrix c(a.cols(), b.cols());
  if (c.size() == 0) return c;
  if (a.rows() == 0) return c.setZero();
  kernels::active_kernels().gemm_tn(static_cast<std::size_t>(a.cols()), static_cast<std::size_t>(b.cols()),
                                    static_cast<std::size_t>(a.rows()), a.data(), b.data(), c.data());
  return c;
}

void add_rank_update(Matrix& c, double alpha, const Matrix& a, const Matrix& b) {
  const Index n = c.rows();
  if (c.cols() != n || a.rows() != n || b.rows() != n || a.cols() != b.cols())
    throw ShapeError("add_rank_update: c " + shape(c) + ", a " + shape(a) + ", b " + shape(b));
  if (n == 0 || a.cols() == 0) return;
  kernels::active_kernels().rank_update(static_cast<std::size_t>(n), static_cast<std::size_t>(a.cols()),
                                        alpha, a.data(), b.data(), c.data());
}

void symmetrize_in_place(Matrix& c) {
  if (c.rows() != c.cols()) throw ShapeError("symmetrize_in_place: " + shape(c));
  if (c.rows() > 1) kernels::active_kernels().symmetrize(static_cast<std::size_t>(c.rows()), c.data());
}

}  // namespace sift
