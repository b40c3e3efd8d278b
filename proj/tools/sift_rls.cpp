// sift_rls: run the forgetting estimators on the built-in scenario or a sample
// file, or run the headless self-check suites.
//
//   sift_rls run --estimator sift --estimator ef --seed 7 --out results/
//   sift_rls run --input samples.csv --estimator nf
//   sift_rls verify [--suite counterexample]
//
// Exit codes: 0 ok, 1 runtime or suite failure, 2 usage.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "sift/bounds.hpp"
#include "sift/estimators.hpp"
#include "sift/harness.hpp"
#include "sift/kernels.hpp"
#include "sift/sample_io.hpp"
#include "sift/verify.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct RunOptions {
  std::vector<std::string> estimators;
  double lambda = 0.5;
  double ef_lambda = 0.95;
  double epsilon = 1e-4;
  long qmax = 0;
  std::uint64_t seed = 1;
  std::size_t horizon = 1201;
  std::string scenario = "nonuniform";
  std::string input;
  std::string out = ".";
};

struct VerifyOptions {
  std::vector<std::string> suites;
  std::uint64_t seed = 1;
  bool inject_fault = false;
};

const CLI::Validator kOpenUnit(
    [](std::string& s) -> std::string {
      double v = 0.0;
      if (!CLI::detail::lexical_cast(s, v)) return "value " + s + " is not a number";
      if (!(v > 0.0 && v < 1.0)) return "value " + s + " not in range (0,1)";
      return {};
    },
    "in (0,1)");

const CLI::Validator kPositive(
    [](std::string& s) -> std::string {
      double v = 0.0;
      if (!CLI::detail::lexical_cast(s, v)) return "value " + s + " is not a number";
      if (!(v > 0.0) || !std::isfinite(v)) return "value " + s + " must be positive";
      return {};
    },
    "> 0");

void write_file(const fs::path& path, const auto& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  writer(out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void print_certificate(const sift::BoundsCertificate& c) {
  std::cout << "certificate (sift):\n"
            << "  lambda_min(R) >= " << sift::format_real(c.r_min_lb) << "\n"
            << "  lambda_max(P) <= " << sift::format_real(c.p_max_ub) << "\n";
  if (c.r_max_ub) std::cout << "  lambda_max(R) <= " << sift::format_real(*c.r_max_ub) << "\n";
  if (c.p_min_lb) std::cout << "  lambda_min(P) >= " << sift::format_real(*c.p_min_lb) << "\n";
  if (c.kappa_ub) std::cout << "  cond(phi_bar R phi_bar^T) <= " << sift::format_real(*c.kappa_ub) << "\n";
}

// Metrics for arbitrary input data: only rho(P) is meaningful without the
// scenario's phase layout.
std::vector<sift::MetricsRecord> rho_only(const sift::Trajectory& traj) {
  std::vector<sift::MetricsRecord> out;
  for (std::size_t k = 0; k < traj.cov.size(); ++k) {
    sift::MetricsRecord r;
    r.k = k;
    r.rho_p = sift::spectral_radius(traj.cov[k]);
    out.push_back(r);
  }
  return out;
}

// Config values fill options the command line left unset.
void apply_config(CLI::App& cmd, const std::string& path) {
  for (const auto& item : CLI::ConfigINI().from_file(path)) {
    if (!item.parents.empty()) throw CLI::ConfigError("sections are not supported: " + item.fullname());
    if (item.name == "config") throw CLI::ConfigError("config files cannot include another config");
    CLI::Option* opt = cmd.get_option_no_throw("--" + item.name);
    if (opt == nullptr) throw CLI::ConfigError::Extras(item.name);
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

int cmd_run(const RunOptions& opt) {
  sift::SiftConfig sift_cfg{opt.lambda, opt.epsilon, static_cast<sift::Index>(opt.qmax)};
  sift_cfg.validate();

  sift::ScenarioConfig scenario;
  scenario.seed = opt.seed;
  scenario.horizon = opt.horizon;
  if (opt.scenario == "noiseless") scenario = sift::noiseless(scenario);

  std::vector<sift::RegressionSample> samples;
  bool builtin = opt.input.empty();
  if (builtin) {
    samples = sift::generate_scenario(scenario);
  } else {
    samples = sift::read_samples_csv(fs::path(opt.input));
    if (samples.empty()) throw std::runtime_error(opt.input + ": no samples");
  }
  const sift::Index n = samples.front().parameters();
  const sift::Index p = samples.front().measurements();

  // Input files with the scenario's shape get the drift metrics; the
  // tracking errors need the true parameters and stay empty.
  std::optional<sift::ScenarioConfig> metric_cfg;
  if (builtin) {
    metric_cfg = scenario;
  } else if (n == 4 && p == 2 && samples.size() > scenario.phase3_start + 1) {
    metric_cfg = scenario;
    metric_cfg->horizon = samples.size() + 1;
  }

  const fs::path out_dir(opt.out);
  fs::create_directories(out_dir);
  write_file(out_dir / "samples.csv", [&](std::ostream& os) { sift::write_samples_csv(os, samples); });

  std::cout << "samples: " << samples.size() << " (p=" << p << ", n=" << n << ")"
            << (builtin ? ", scenario " + opt.scenario + ", seed " + std::to_string(opt.seed)
                        : ", input " + opt.input)
            << "\nkernels: " << sift::kernels::active_kernels().name << "\n";

  bool monitor_ok = true;
  for (const auto& name : opt.estimators) {
    const auto kind = sift::parse_estimator_kind(name);
    const auto initial = sift::EstimatorState::initial(n);
    std::unique_ptr<sift::Estimator> est;
    std::optional<sift::BoundsCertificate> cert;
    switch (*kind) {
      case sift::EstimatorKind::Sift:
        est = std::make_unique<sift::SiftRls>(sift_cfg, initial);
        cert = sift::sift_certificate(sift_cfg, initial.info, sift::regressor_upper_bound(samples));
        print_certificate(*cert);
        break;
      case sift::EstimatorKind::ExponentialForgetting:
        est = std::make_unique<sift::ExponentialForgettingRls>(opt.ef_lambda, initial);
        break;
      case sift::EstimatorKind::NoForgetting:
        est = std::make_unique<sift::NoForgettingRls>(initial);
        break;
    }

    const auto result = sift::run_estimator(*est, samples, cert ? &*cert : nullptr);
    const auto metrics = metric_cfg ? sift::compute_metrics(result.trajectory, *metric_cfg,
                                                            builtin ? sift::TruthFn(sift::theta_true) : nullptr)
                                    : rho_only(result.trajectory);
    write_file(out_dir / ("metrics_" + name + ".csv"), [&](std::ostream& os) { sift::write_metrics_csv(os, metrics); });
    write_file(out_dir / ("trajectory_" + name + ".csv"),
               [&](std::ostream& os) { sift::write_trajectory_csv(os, result.trajectory); });
    write_file(out_dir / ("violations_" + name + ".csv"),
               [&](std::ostream& os) { sift::write_violations_csv(os, result.violations); });

    double rho_max = 0.0;
    for (const auto& m : metrics) rho_max = std::max(rho_max, m.rho_p);
    std::cout << name << ": max rho(P) " << sift::format_real(rho_max);
    if (cert) {
      std::cout << ", monitor " << (result.violations.empty() ? "PASS" : "FAIL") << " ("
                << result.violations.size() << " violations)";
      monitor_ok &= result.violations.empty();
    }
    std::cout << "\n";
  }
  return monitor_ok ? 0 : kExitRuntime;
}

int cmd_verify(const VerifyOptions& opt) {
  const auto& suites = opt.suites.empty() ? sift::verify::suite_names() : opt.suites;
  sift::verify::Options options{opt.seed, opt.inject_fault};
  int failed = 0;
  for (const auto& name : suites) {
    const auto r = sift::verify::run_suite(name, options);
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "\n";
    for (const auto& line : r.details) std::cout << "    " << line << "\n";
    failed += r.passed ? 0 : 1;
  }
  std::cout << (suites.size() - failed) << "/" << suites.size() << " suites passed\n";
  return failed == 0 ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recursive least squares with subspace information forgetting"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run estimators and write metrics, trajectory and violation CSVs");
  std::string config_path;
  run_cmd->add_option("--config", config_path, "Flat key=value file; command-line flags take precedence")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--estimator", run.estimators, "Estimator to run, repeatable")
      ->check(CLI::IsMember({"sift", "ef", "nf"}));
  run_cmd->add_option("--lambda", run.lambda, "SIFt forgetting factor")->check(kOpenUnit)->capture_default_str();
  run_cmd->add_option("--ef-lambda", run.ef_lambda, "Exponential forgetting factor")
      ->check(kOpenUnit)
      ->capture_default_str();
  run_cmd->add_option("--epsilon", run.epsilon, "Information threshold")->check(kPositive)->capture_default_str();
  run_cmd->add_option("--qmax", run.qmax, "Largest rank handled by the inversion-lemma path")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  auto* run_seed = run_cmd->add_option("--seed", run.seed, "Scenario seed (env SIFT_RLS_SEED)")->capture_default_str();
  run_cmd->add_option("--horizon", run.horizon, "Number of estimates including the initial one")
      ->check(CLI::Range(std::size_t{802}, std::size_t{100000000}))
      ->capture_default_str();
  run_cmd->add_option("--scenario", run.scenario, "Built-in scenario variant")
      ->check(CLI::IsMember({"nonuniform", "noiseless"}))
      ->capture_default_str();
  run_cmd->add_option("--input", run.input, "Sample CSV to use instead of the built-in scenario")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run.out, "Output directory")->capture_default_str();

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run the self-check suites");
  verify_cmd->add_option("--suite", verify.suites, "Suite to run, repeatable (default: all)")
      ->check(CLI::IsMember(sift::verify::suite_names()));
  verify_cmd->add_option("--seed", verify.seed, "Seed for the random instances")
      ->envname("SIFT_RLS_SEED")
      ->capture_default_str();
  verify_cmd->add_flag("--inject-fault", verify.inject_fault)->group("");

  try {
    app.parse(argc, argv);
    if (*run_cmd) {
      if (!config_path.empty()) apply_config(*run_cmd, config_path);
      if (run_seed->count() == 0)
        if (const char* env = std::getenv("SIFT_RLS_SEED"); env && *env) {
          run_seed->add_result(std::string(env));
          run_seed->run_callback();
        }
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run_cmd) {
      if (run.estimators.empty()) run.estimators = {"sift"};
      return cmd_run(run);
    }
    return cmd_verify(verify);
  } catch (const sift::SampleParseError& e) {
    std::cerr << "error: " << run.input << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitRuntime;
}
