// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli_runner.hpp"
#include "sift/bounds.hpp"
#include "sift/estimators.hpp"
#include "sift/harness.hpp"
#include "sift/subspace.hpp"
#include "test_util.hpp"

using namespace sift;
using sift::testing::conditioned;
using sift::testing::gaussian;
using sift::testing::random_spd;
using sift::testing::rel_diff;
using sift::testing::Rng;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// 500 random (A, S) instances, n <= 8.
Outcome decomposition() {
  Rng rng(101);
  Outcome o;
  double w_psd = 0, w_fix = 0, w_basis = 0, w_unique = 0, w_dual = 0, w_interval = 0;
  int rank_misses = 0, unique_rejects = 0;
  for (int t = 0; t < 500; ++t) {
    const Index n = 1 + t % 8;
    const Index p = 1 + (t / 8) % n;
    const SymMatrix a(random_spd(rng, n, 0.01, 100.0));
    const SubspaceBasis s(gaussian(rng, n, p));
    const auto d = decompose(a, s);
    const Vector ev = sym_eigvals(a);
    const double lmax = ev(n - 1);

    w_psd = std::max({w_psd, -sym_eigvals(d.parallel)(0) / lmax, -sym_eigvals(d.orthogonal)(0) / lmax});
    rank_misses += numerical_rank(d.parallel.matrix()) != p;
    rank_misses += numerical_rank(d.orthogonal.matrix()) != n - p;
    for (Index j = 0; j < p; ++j) {
      const Vector ax = a.matrix() * s.vectors().col(j);
      w_fix = std::max(w_fix, (d.parallel.matrix() * s.vectors().col(j) - ax).norm() / ax.norm());
    }
    const Matrix tm = gaussian(rng, p, p) + 3.0 * Matrix::Identity(p, p);
    w_basis = std::max(w_basis, rel_diff(decompose(a, SubspaceBasis(s.vectors() * tm)).parallel.matrix(),
                                         d.parallel.matrix()));
    unique_rejects += !verify_uniqueness(a, s, d.parallel.matrix());
    w_unique = std::max(w_unique, rel_diff(decompose(a, s).parallel.matrix(), d.parallel.matrix()));
    if (const auto comp = orthogonal_complement_basis(s, a)) {
      const auto dc = decompose(a, *comp);
      w_dual = std::max({w_dual, rel_diff(d.parallel.matrix(), dc.orthogonal.matrix()),
                         rel_diff(d.orthogonal.matrix(), dc.parallel.matrix())});
      const Vector eo = sym_eigvals(d.orthogonal);
      for (Index i = p; i < n; ++i)
        w_interval = std::max({w_interval, (ev(0) - eo(i)) / lmax, (eo(i) - lmax) / lmax});
    }
  }
  o.pass = w_psd <= 1e-10 && rank_misses == 0 && w_fix <= 1e-9 && w_basis <= 1e-8 && unique_rejects == 0 &&
           w_unique <= 1e-8 && w_dual <= 1e-8 && w_interval <= 1e-9;
  o.detail = "psd " + sci(w_psd) + ", rank misses " + std::to_string(rank_misses) + ", A-fix " + sci(w_fix) +
             ", basis " + sci(w_basis) + ", uniqueness rejects " + std::to_string(unique_rejects) + ", duality " +
             sci(w_dual) + ", interval " + sci(w_interval);
  return o;
}

// 200 steps with p >= n and sigma_min(phi) >= sqrt(eps).
Outcome degeneration() {
  Rng rng(202);
  const SiftConfig cfg{0.7, 1e-4, 0};
  double worst = 0;
  for (int run = 0; run < 4; ++run) {
    const Index n = 2 + run, p = n + run % 2;
    auto state = EstimatorState::initial(n);
    for (int k = 0; k < 50; ++k) {
      const RegressionSample sample(conditioned(rng, p, n, 2 * std::sqrt(cfg.epsilon), 2.0), gaussian(rng, p, 1));
      const auto s = sift_step(state, sample, cfg).state;
      const auto e = ef_step(state, sample, cfg.lambda);
      worst = std::max({worst, rel_diff(s.theta, e.theta), rel_diff(s.info.matrix(), e.info.matrix()),
                        rel_diff(s.cov.matrix(), e.cov.matrix())});
      state = s;
    }
  }
  return {worst <= 1e-9, "worst relative difference " + sci(worst)};
}

// 10 seeded SIFt runs on the n=4, p=2 scenario, 1200 steps each.
Outcome certificate_runs() {
  std::size_t violations = 0, steps = 0;
  double tightest = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ScenarioConfig cfg;
    cfg.seed = seed;
    const auto samples = generate_scenario(cfg);
    const SiftConfig sc{0.5, 1e-4, 0};
    const auto cert = sift_certificate(sc, SymMatrix::identity(4), regressor_upper_bound(samples));
    SiftRls est(sc, EstimatorState::initial(4));
    const auto r = run_estimator(est, samples, &cert);
    violations += r.violations.size();
    steps += samples.size();
    for (const auto& p : r.trajectory.cov) tightest = std::max(tightest, spectral_radius(p) / cert.p_max_ub);
  }
  return {violations == 0, std::to_string(steps) + " steps, " + std::to_string(violations) +
                               " violations (r_min, r_max, p_min, p_max, kappa); peak rho(P)/bound " + sci(tightest)};
}

// q_max = 0 vs q_max = min(p, n), 500 random steps.
Outcome path_equivalence() {
  Rng rng(404);
  double worst = 0;
  for (int run = 0; run < 5; ++run) {
    const Index n = 2 + run, p = 1 + run % 3;
    const SiftConfig direct{0.5, 1e-4, 0};
    const SiftConfig mil{0.5, 1e-4, std::min(p, n)};
    auto a = EstimatorState::initial(n), b = a;
    for (int k = 0; k < 100; ++k) {
      Matrix phi = gaussian(rng, p, n);
      if (k % 9 == 4) phi.row(0) *= 1e-3;
      const RegressionSample sample(phi, gaussian(rng, p, 1));
      a = sift_step(a, sample, direct).state;
      b = sift_step(b, sample, mil).state;
      worst = std::max({worst, rel_diff(a.theta, b.theta), rel_diff(a.info.matrix(), b.info.matrix()),
                        rel_diff(a.cov.matrix(), b.cov.matrix())});
    }
  }
  return {worst <= 1e-8, "worst relative difference " + sci(worst)};
}

// Noiseless fixed-parameter run with full-rank random regressors.
Outcome stability() {
  Rng rng(505);
  const SiftConfig cfg{0.5, 1e-4, 0};
  const Vector truth = gaussian(rng, 4, 1);
  std::vector<RegressionSample> samples;
  for (int k = 0; k < 200; ++k) {
    const Matrix phi = conditioned(rng, 2, 4, 2 * std::sqrt(cfg.epsilon), 1.0);
    samples.emplace_back(phi, phi * truth);
  }
  const auto cert = sift_certificate(cfg, SymMatrix::identity(4), regressor_upper_bound(samples));
  const double c0 = std::sqrt(*cert.r_max_ub / cert.r_min_lb);

  SiftRls est(cfg, EstimatorState::initial(4));
  const auto traj = run_estimator(est, samples).trajectory;
  std::vector<double> err;
  for (const auto& th : traj.theta) err.push_back((th - truth).norm());
  const double e0 = err.front();
  const double decades = std::log10(e0 / std::max(err.back(), 1e-300));
  const bool lyapunov = std::all_of(err.begin(), err.end(), [&](double e) { return e <= c0 * e0; });

  // Least-squares fit of log e_k = log C + k log r, over the steps above the
  // rounding floor.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t k = 0; k < err.size(); ++k) {
    if (err[k] < 1e-13 * e0) break;
    const double x = static_cast<double>(k), y = std::log(err[k]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++m;
  }
  const double slope = m > 1 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
  const double rate = std::exp(slope);
  return {decades >= 2.0 && rate < 1.0 && lyapunov,
          "decrease " + sci(decades) + " decades, fitted rate " + sci(rate) + " over " + std::to_string(m) +
              " steps, bound C0 " + sci(c0) + (lyapunov ? " respected" : " exceeded")};
}

// Oblique-projection closed form and the bridged SIFt contrast.
Outcome counterexample() {
  const double lambda = 0.9, eps = 0.01;
  SymMatrix oblique = SymMatrix::diagonal(Eigen::Vector2d(eps * eps, 1.0));
  const SiftConfig bridged{lambda, eps * eps, 0};
  SiftRls sift(bridged, EstimatorState::from_info(Vector::Zero(2), oblique));
  const double floor = std::min(bridged.epsilon / (1 - lambda), eps * eps);

  // First k with (k+1) lambda^k < 1e-6; the other diagonal entry stays
  // above eps^2.
  int predicted = 0;
  while ((predicted + 1) * std::pow(lambda, predicted) >= 1e-6) ++predicted;

  double worst = 0, sift_min = INFINITY;
  int crossing = -1;
  double geometric = 0;
  for (int k = 0; k <= 200; ++k) {
    geometric += std::pow(lambda, k);
    const double r11 = eps * eps * geometric, r22 = (k + 1) * std::pow(lambda, k);
    worst = std::max({worst, std::abs(oblique(0, 0) - r11) / r11, std::abs(oblique(1, 1) - r22) / r22,
                      std::abs(oblique(0, 1)) / r11});
    if (crossing < 0 && sym_eigvals(oblique)(0) < 1e-6) crossing = k;
    sift_min = std::min(sift_min, sym_eigvals(sift.info())(0) / floor);

    Matrix phi = Matrix::Zero(2, 2);
    phi(0, 0) = eps;
    phi(1, 1) = std::pow(lambda, 0.5 * (k + 1));
    oblique = oblique_step(oblique, phi, lambda, eps);
    sift.step(RegressionSample(phi, Vector::Zero(2)));
  }
  return {worst <= 1e-9 && crossing == predicted && sift_min >= 1 - kMonitorTol,
          "closed form " + sci(worst) + ", lambda_min < 1e-6 at k=" + std::to_string(crossing) + " (predicted " +
              std::to_string(predicted) + "), SIFt min lambda_min/floor " + sci(sift_min)};
}

// Qualitative comparison on the default seed.
Outcome scenario() {
  const ScenarioConfig cfg;
  const auto samples = generate_scenario(cfg);
  const SiftConfig sc{0.5, 1e-4, 0};
  const auto cert = sift_certificate(sc, SymMatrix::identity(4), regressor_upper_bound(samples));
  SiftRls sift(sc, EstimatorState::initial(4));
  ExponentialForgettingRls ef(0.95, EstimatorState::initial(4));
  NoForgettingRls nf(EstimatorState::initial(4));
  const auto ms = compute_metrics(run_estimator(sift, samples).trajectory, cfg);
  const auto me = compute_metrics(run_estimator(ef, samples).trajectory, cfg);
  const auto mn = compute_metrics(run_estimator(nf, samples).trajectory, cfg);

  std::vector<double> rho;
  for (const auto& m : ms) rho.push_back(m.rho_p);
  const double sift_max = *std::max_element(rho.begin(), rho.end());
  std::nth_element(rho.begin(), rho.begin() + rho.size() / 2, rho.end());
  const double median = rho[rho.size() / 2];

  bool nf_monotone = true;
  for (std::size_t k = 1; k < mn.size(); ++k) nf_monotone &= mn[k].rho_p <= mn[k - 1].rho_p;

  double ef_phase3 = 0;
  for (const auto& m : me)
    if (m.k >= cfg.phase3_start) ef_phase3 = std::max(ef_phase3, m.rho_p);

  bool drift_ok = true;
  std::string drift;
  const std::pair<const char*, std::optional<double> MetricsRecord::*> fields[] = {
      {"delta34", &MetricsRecord::delta34}, {"delta12", &MetricsRecord::delta12}, {"delta_perp", &MetricsRecord::delta_perp}};
  for (const auto& [name, f] : fields) {
    const double s = *max_metric(ms, f), e = *max_metric(me, f);
    const bool ok = s <= 0.5 * e;
    drift_ok &= ok;
    drift += std::string(", ") + name + " sift/ef " + sci(s) + "/" + sci(e) + (ok ? "" : " FAIL");
  }

  const bool rho_ok = median < 10 && sift_max <= cert.p_max_ub;
  return {rho_ok && nf_monotone && ef_phase3 > 100 && drift_ok,
          "sift rho(P) median " + sci(median) + " max " + sci(sift_max) + " (bound " + sci(cert.p_max_ub) + ")" +
              ", nf nonincreasing " + (nf_monotone ? "yes" : "no") + ", ef phase-3 max " + sci(ef_phase3) + drift};
}

// Exponential forgetting with window-1 excitation alpha I <= phi^T phi <= beta I.
Outcome ef_bounds() {
  Rng rng(808);
  const double alpha = 0.25, beta = 4.0;
  std::size_t violations = 0, steps = 0;
  for (int run = 0; run < 3; ++run) {
    const Index n = 2 + run, p = n + run % 2;
    const double lambda = 0.8 + 0.07 * run;
    const SymMatrix r0(random_spd(rng, n, 0.1, 10.0));
    const auto cert = ef_certificate(lambda, r0, ExcitationBounds{alpha, beta, 1});
    ExponentialForgettingRls ef(lambda, EstimatorState::from_info(Vector::Zero(n), r0));
    for (int k = 0; k < 400; ++k) {
      ef.step(RegressionSample(conditioned(rng, p, n, std::sqrt(alpha), std::sqrt(beta)), gaussian(rng, p, 1)));
      violations += monitor_step(ef.state(), cert).size();
      ++steps;
    }
  }
  return {violations == 0, std::to_string(steps) + " steps, " + std::to_string(violations) + " violations"};
}

// Byte-identical output from repeated runs with the same seed.
Outcome determinism() {
  namespace fs = std::filesystem;
  const auto a = sift::testing::scratch_dir("accept_a"), b = sift::testing::scratch_dir("accept_b");
  const std::string args = "run --estimator sift --estimator ef --estimator nf --seed 7 --out ";
  const int ra = sift::testing::run_cli(args + a.string()).exit_code;
  const int rb = sift::testing::run_cli(args + b.string()).exit_code;
  int files = 0, differ = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    differ += sift::testing::slurp(e.path()) != sift::testing::slurp(b / e.path().filename());
  }
  fs::remove_all(a);
  fs::remove_all(b);
  return {ra == 0 && rb == 0 && files == 10 && differ == 0,
          std::to_string(files) + " files compared, " + std::to_string(differ) + " differ"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"decomposition properties on 500 random instances", decomposition},
      {"SIFt equals EF when p >= n and all singular values pass", degeneration},
      {"certified eigenvalue and condition bounds on 10 seeded runs", certificate_runs},
      {"inversion-lemma and direct-inversion paths agree", path_equivalence},
      {"exponential stability of the noiseless error", stability},
      {"oblique-projection counterexample and SIFt contrast", counterexample},
      {"qualitative scenario comparison on the default seed", scenario},
      {"EF bounds under window-1 persistent excitation", ef_bounds},
      {"repeated runs produce byte-identical CSVs", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << (i + 1) << ": " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << "  ["
              << o.detail << "]" << std::endl;
    failed += !o.pass;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
