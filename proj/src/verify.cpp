#include "sift/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sift/bounds.hpp"
#include "sift/estimators.hpp"
#include "sift/harness.hpp"
#include "sift/subspace.hpp"

namespace sift::verify {
namespace {

using Rng = std::mt19937_64;

Matrix gaussian(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

// Q diag(ev) Q^T with eigenvalues log-uniform in [lo, hi].
SymMatrix random_spd(Rng& rng, Index n, double lo = 0.1, double hi = 10.0) {
  const Eigen::HouseholderQR<Matrix> qr(gaussian(rng, n, n));
  const Matrix q = qr.householderQ();
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  Vector ev(n);
  for (Index i = 0; i < n; ++i) ev(i) = std::exp(u(rng));
  return SymMatrix(q * ev.asDiagonal() * q.transpose());
}

// Regressor with every singular value in [smin, smax].
Matrix conditioned_regressor(Rng& rng, Index p, Index n, double smin, double smax) {
  const Eigen::JacobiSVD<Matrix> svd(gaussian(rng, p, n), Eigen::ComputeThinU | Eigen::ComputeThinV);
  std::uniform_real_distribution<double> u(smin, smax);
  Vector s(std::min(p, n));
  for (Index i = 0; i < s.size(); ++i) s(i) = u(rng);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

double rel_diff(const Matrix& a, const Matrix& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-300});
  return (a - b).norm() / scale;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

class Checker {
 public:
  explicit Checker(SuiteResult& r) : r_(r) {}
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      if (failures_ < 5) r_.details.push_back("FAIL " + what);
      ++failures_;
    }
  }
  void note(std::string line) { r_.details.push_back(std::move(line)); }
  bool ok() const { return failures_ == 0; }

 private:
  SuiteResult& r_;
  int failures_ = 0;
};

SuiteResult decomposition(const Options& opt) {
  SuiteResult r{"decomposition", false, {}};
  Checker c(r);
  Rng rng(opt.seed);
  std::uniform_int_distribution<int> dim(1, 8);
  double worst_dual = 0.0;
  double worst_basis = 0.0;
  const int instances = 100;
  for (int t = 0; t < instances; ++t) {
    const Index n = dim(rng);
    const Index p = std::uniform_int_distribution<int>(1, static_cast<int>(n))(rng);
    const SymMatrix a = random_spd(rng, n);
    const SubspaceBasis s(gaussian(rng, n, p));
    const auto d = decompose(a, s);
    const Vector ev = sym_eigvals(a);
    const double lmax = ev(n - 1);
    const std::string tag = " (instance " + std::to_string(t) + ")";

    c.expect(rel_diff(d.parallel.matrix() + d.orthogonal.matrix(), a.matrix()) < 1e-12, "A = par + orth" + tag);
    c.expect(sym_eigvals(d.parallel)(0) >= -kPsdTol * lmax, "parallel PSD" + tag);
    c.expect(sym_eigvals(d.orthogonal)(0) >= -kPsdTol * lmax, "orthogonal PSD" + tag);
    c.expect(numerical_rank(d.parallel.matrix()) == p, "rank(parallel) = p" + tag);
    c.expect(numerical_rank(d.orthogonal.matrix()) == n - p, "rank(orthogonal) = n-p" + tag);
    for (Index j = 0; j < p; ++j) {
      const Vector x = s.vectors().col(j);
      const Vector ax = a.matrix() * x;
      c.expect((d.parallel.matrix() * x - ax).norm() <= 1e-9 * ax.norm(), "parallel x = A x" + tag);
      c.expect((d.orthogonal.matrix() * x).norm() <= 1e-9 * a.matrix().norm() * x.norm(), "orthogonal x = 0" + tag);
    }

    Matrix tmat = gaussian(rng, p, p) + 2.0 * Matrix::Identity(p, p);
    const auto d2 = decompose(a, SubspaceBasis(s.vectors() * tmat));
    worst_basis = std::max(worst_basis, rel_diff(d.parallel.matrix(), d2.parallel.matrix()));

    c.expect(verify_uniqueness(a, s, d.parallel.matrix()), "uniqueness accepts parallel" + tag);
    if (p < n) c.expect(!verify_uniqueness(a, s, a.matrix()), "uniqueness rejects A" + tag);

    if (const auto comp = orthogonal_complement_basis(s, a)) {
      c.expect(comp->dim() == n - p, "dim of A-complement" + tag);
      const auto dc = decompose(a, *comp);
      worst_dual = std::max({worst_dual, rel_diff(d.parallel.matrix(), dc.orthogonal.matrix()),
                             rel_diff(d.orthogonal.matrix(), dc.parallel.matrix())});
      const Vector eo = sym_eigvals(d.orthogonal);
      for (Index i = p; i < n; ++i)
        c.expect(eo(i) >= ev(0) - 1e-9 * lmax && eo(i) <= lmax + 1e-9 * lmax, "orthogonal spectrum interval" + tag);
    }
  }
  c.expect(worst_basis <= 1e-8, "basis invariance, worst " + fmt(worst_basis));
  c.expect(worst_dual <= 1e-8, "duality, worst " + fmt(worst_dual));
  c.note(std::to_string(instances) + " instances; basis invariance " + fmt(worst_basis) + ", duality " +
         fmt(worst_dual));
  r.passed = c.ok();
  return r;
}

SuiteResult degeneration(const Options& opt) {
  SuiteResult r{"degeneration", false, {}};
  Checker c(r);
  Rng rng(opt.seed + 1);
  const SiftConfig cfg{0.7, 1e-2, 0};
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Index n = std::uniform_int_distribution<int>(1, 5)(rng);
    const Index p = n + std::uniform_int_distribution<int>(0, 2)(rng);
    const auto state = EstimatorState::from_info(gaussian(rng, n, 1), random_spd(rng, n));
    const RegressionSample sample(conditioned_regressor(rng, p, n, 0.2, 3.0), gaussian(rng, p, 1));
    const auto s = sift_step(state, sample, cfg).state;
    const auto e = ef_step(state, sample, cfg.lambda);
    worst = std::max({worst, rel_diff(s.theta, e.theta), rel_diff(s.info.matrix(), e.info.matrix()),
                      rel_diff(s.cov.matrix(), e.cov.matrix())});
  }
  c.expect(worst <= 1e-9, "SIFt equals EF when the whole space is excited, worst " + fmt(worst));
  c.note("50 steps; worst relative difference " + fmt(worst));
  r.passed = c.ok();
  return r;
}

SuiteResult path_equivalence(const Options& opt) {
  SuiteResult r{"path-equivalence", false, {}};
  Checker c(r);
  Rng rng(opt.seed + 2);
  double worst = 0.0;
  for (int run = 0; run < 4; ++run) {
    const Index n = std::uniform_int_distribution<int>(2, 6)(rng);
    const Index p = std::uniform_int_distribution<int>(1, 3)(rng);
    SiftConfig direct{0.6, 1e-3, 0};
    SiftConfig mil = direct;
    mil.q_max = std::min(p, n);
    auto a = EstimatorState::initial(n);
    auto b = a;
    for (int k = 0; k < 100; ++k) {
      const RegressionSample sample(gaussian(rng, p, n), gaussian(rng, p, 1));
      a = sift_step(a, sample, direct).state;
      b = sift_step(b, sample, mil).state;
      worst = std::max({worst, rel_diff(a.theta, b.theta), rel_diff(a.cov.matrix(), b.cov.matrix()),
                        rel_diff(a.info.matrix(), b.info.matrix())});
      c.expect(b.coherence_error() <= kInvTol, "MIL path keeps R P = I");
    }
  }
  c.expect(worst <= 1e-8, "q_max = 0 and q_max = min(p,n) agree, worst " + fmt(worst));
  c.note("400 steps; worst relative difference " + fmt(worst));
  r.passed = c.ok();
  return r;
}

SuiteResult monitor(const Options& opt) {
  SuiteResult r{"monitor", false, {}};
  Checker c(r);
  Rng rng(opt.seed + 3);
  const SiftConfig cfg{0.5, 1e-4, 0};
  std::size_t violations = 0;
  for (int run = 0; run < 3; ++run) {
    std::vector<RegressionSample> samples;
    for (int k = 0; k < 400; ++k) {
      Matrix phi = gaussian(rng, 2, 4);
      // Excite one coordinate pair for a while, then the other.
      if ((k / 100) % 2 == 0) phi.rightCols(2) *= 1e-3;
      else phi.leftCols(2) *= 1e-3;
      samples.emplace_back(std::move(phi), gaussian(rng, 2, 1));
    }
    const auto cert = sift_certificate(cfg, SymMatrix::identity(4), regressor_upper_bound(samples));
    SiftRls est(cfg, EstimatorState::initial(4));
    const auto result = run_estimator(est, samples, &cert);
    violations += result.violations.size();
    if (opt.inject_fault && run == 0) {
      // Shrink R until its smallest eigenvalue sits at half the certified bound.
      const double lmin = sym_eigvals(est.info())(0);
      const double scale = 0.5 * cert.r_min_lb / lmin;
      const auto corrupted = EstimatorState::from_info(est.theta(), SymMatrix(scale * est.info().matrix()));
      const auto report = monitor_step(corrupted, cert);
      violations += report.size();
      c.note("fault injected: monitor flagged " + std::to_string(report.size()) + " bound(s)");
    }
  }
  c.expect(violations == 0, "certified bounds violated " + std::to_string(violations) + " time(s)");
  c.note("3 runs x 400 steps; violations " + std::to_string(violations));
  r.passed = c.ok();
  return r;
}

SuiteResult stability(const Options& opt) {
  SuiteResult r{"stability", false, {}};
  Checker c(r);
  Rng rng(opt.seed + 4);
  const SiftConfig cfg{0.5, 1e-2, 0};
  const Vector truth = gaussian(rng, 4, 1);
  auto state = EstimatorState::initial(4);
  const double e0 = (state.theta - truth).norm();
  double e = e0;
  for (int k = 0; k < 200; ++k) {
    const Matrix phi = conditioned_regressor(rng, 2, 4, 0.2, 1.0);
    const Vector y = phi * truth;
    state = sift_step(state, RegressionSample(phi, y), cfg).state;
    e = (state.theta - truth).norm();
  }
  c.expect(e <= 1e-2 * e0, "error decays by two decades: " + fmt(e0) + " -> " + fmt(e));
  c.note("||theta - theta_true||: " + fmt(e0) + " -> " + fmt(e) + " over 200 steps");
  r.passed = c.ok();
  return r;
}

SuiteResult counterexample(const Options& opt) {
  (void)opt;
  SuiteResult r{"counterexample", false, {}};
  Checker c(r);
  const double lambda = 0.9;
  const double eps = 0.01;
  SymMatrix oblique = SymMatrix::diagonal(Eigen::Vector2d(eps * eps, 1.0));
  SiftRls sift(SiftConfig{lambda, eps * eps, 0}, EstimatorState::from_info(Vector::Zero(2), oblique));
  const double sift_floor = std::min(eps * eps / (1.0 - lambda), eps * eps);
  double worst = 0.0;
  std::optional<int> crossed;
  for (int k = 0; k <= 200; ++k) {
    // Closed form of the oblique update on this sequence.
    double geometric = 0.0;
    for (int i = 0; i <= k; ++i) geometric += std::pow(lambda, i);
    const double r11 = eps * eps * geometric;
    const double r22 = (k + 1) * std::pow(lambda, k);
    worst = std::max({worst, std::abs(oblique(0, 0) - r11) / r11, std::abs(oblique(1, 1) - r22) / r22});
    const double lmin_oblique = sym_eigvals(oblique)(0);
    const double lmin_sift = sym_eigvals(sift.info())(0);
    if (!crossed && lmin_oblique < 1e-6) crossed = k;
    c.expect(lmin_sift >= sift_floor * (1.0 - kMonitorTol), "SIFt lower bound at k=" + std::to_string(k));
    if (k % 20 == 0)
      c.note("k=" + std::to_string(k) + " lambda_min oblique " + fmt(lmin_oblique) + ", SIFt " + fmt(lmin_sift));

    Matrix phi = Matrix::Zero(2, 2);
    phi(0, 0) = eps;
    phi(1, 1) = std::pow(lambda, 0.5 * (k + 1));
    oblique = oblique_step(oblique, phi, lambda, eps);
    sift.step(RegressionSample(phi, Vector::Zero(2)));
  }
  c.expect(worst <= 1e-9, "oblique update matches closed form, worst " + fmt(worst));
  c.expect(crossed.has_value(), "oblique lambda_min falls below 1e-6");
  if (crossed) c.note("oblique lambda_min < 1e-6 from k=" + std::to_string(*crossed));
  r.passed = c.ok();
  return r;
}

using SuiteFn = SuiteResult (*)(const Options&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> suites = {
      {"decomposition", &decomposition}, {"degeneration", &degeneration},     {"path-equivalence", &path_equivalence},
      {"monitor", &monitor},             {"stability", &stability},           {"counterexample", &counterexample},
  };
  return suites;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

SuiteResult run_suite(std::string_view name, const Options& options) {
  for (const auto& [suite, fn] : registry())
    if (suite == name) {
      try {
        return fn(options);
      } catch (const std::exception& e) {
        return {suite, false, {std::string("exception: ") + e.what()}};
      }
    }
  throw std::invalid_argument("unknown suite '" + std::string(name) + "'");
}

}  // namespace sift::verify
