// mylab: experiment runner.
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mylab/error.hpp"
#include "mylab/experiments.hpp"
#include "mylab/rng.hpp"
#include "mylab/specialfn.hpp"
#include "mylab/stats.hpp"
#include "mylab/trees.hpp"

namespace {

using mylab::experiments::ExperimentConfig;

constexpr int kExitFailedChecks = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

std::string experiments_footer() {
  std::string s = "\nExperiments and their CSV tables:\n";
  for (const auto& e : mylab::experiments::registry()) {
    s += "  " + e.name + "\n      " + e.summary + "\n";
    for (const auto& c : e.csv_columns) s += "      " + c + "\n";
    if (!e.tolerance_keys.empty()) {
      s += "      tolerances:";
      for (const auto& k : e.tolerance_keys) s += " " + k;
      s += "\n";
    }
  }
  return s;
}

void parse_tolerances(const std::vector<std::string>& items, ExperimentConfig& cfg) {
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw mylab::ConfigError("tolerance override must be key=value, got '" + item + "'");
    }
    std::size_t used = 0;
    const std::string value = item.substr(eq + 1);
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) {
      throw mylab::ConfigError("tolerance value is not a number: '" + item + "'");
    }
    cfg.tolerances[item.substr(0, eq)] = v;
  }
}

void print_verdicts(const mylab::experiments::ExperimentResult& r) {
  std::printf("%-16s %s (%.1f s)\n", r.experiment.c_str(), r.passed() ? "PASS" : "FAIL",
              r.seconds);
  for (const auto& c : r.checks) {
    std::printf("  [%s] %s  value=%.6g bound=%.6g%s%s\n", c.passed ? "pass" : "FAIL",
                c.name.c_str(), c.value, c.bound, c.detail.empty() ? "" : "  ",
                c.detail.c_str());
  }
}

// Fills options not given on the command line from `file`; unknown keys are errors.
void apply_config_file(CLI::App& cmd, const std::string& file) {
  for (const auto& item : CLI::ConfigINI().from_file(file)) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == "run")) {
      throw mylab::ConfigError("unknown config section '" + item.fullname() + "'");
    }
    if (item.name == "config" || item.name == "experiment") {
      throw mylab::ConfigError("config key '" + item.name + "' is not allowed in a file");
    }
    CLI::Option* opt = cmd.get_option_no_throw("--" + item.name);
    if (opt == nullptr) throw mylab::ConfigError("unknown config key '" + item.name + "'");
    if (opt->count() > 0) continue;
    for (const auto& v : item.inputs) opt->add_result(v);
    opt->run_callback();
  }
}

int selftest() {
  int failures = 0;
  const auto line = [&](const char* name, bool ok) {
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", name);
    failures += !ok;
  };
  const auto kat = mylab::philox4x32_10({0, 0, 0, 0}, {0, 0});
  line("philox4x32-10 known answer", kat[0] == 0x6627e8d5u && kat[1] == 0xe169c58du &&
                                         kat[2] == 0xbc57ac4cu && kat[3] == 0x9b00dbd8u);
  const double x = 1.7;
  const double closed = std::sqrt(M_PI / (2.0 * x)) * std::exp(-x);
  line("K_1/2 closed form",
       std::abs(mylab::specialfn::macdonald_k(0.5, x) - closed) < 1e-13 * closed);
  line("Gamma(5) = 24", std::abs(mylab::specialfn::gamma(5.0) - 24.0) < 1e-12);
  const auto b3 = mylab::trees::exact_distribution(mylab::trees::bessel3_kernel(), 0L, 10);
  line("pitman walk n=10 equals Bessel(3)", mylab::trees::pitman_walk_distribution(10) == b3);
  std::vector<double> a(200), b(200);
  mylab::RngStream ra(1, 0), rb(1, 1);
  for (auto& v : a) v = ra.normal();
  for (auto& v : b) v = rb.normal();
  line("KS identical batches", mylab::stats::ks_two_sample(a, a, 0.01).statistic == 0.0);
  return failures == 0 ? 0 : kExitFailedChecks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mylab: reproducible experiments on exponential functionals of Brownian motion"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::optional<int> q, p, n, seeds;
  std::optional<double> horizon, dt, lambda;
  std::optional<std::size_t> paths;
  std::vector<std::string> tolerances;
  std::string out = cfg.out_dir.string();

  auto* run = app.add_subcommand("run", "run one experiment and write report.json + CSV tables");
  run->add_option("experiment", cfg.name, "experiment name (see list-experiments)")->required();
  run->add_option("--q", q, "rank-one dimension parameter q");
  run->add_option("--p", p, "rank p");
  run->add_option("--n", n, "number of discrete steps (tree experiments)");
  run->add_option("--seeds", seeds, "number of replicate seeds");
  run->add_option("--T", horizon, "time horizon");
  run->add_option("--dt", dt, "time step");
  run->add_option("--paths", paths, "number of Monte Carlo paths");
  run->add_option("--lambda", lambda, "spectral / drift parameter lambda");
  run->add_option("--seed", cfg.seed, "master seed");
  run->add_option("--out", out, "output directory");
  run->add_option("--tol", tolerances, "tolerance override key=value (repeatable)");
  run->add_option("--workers", cfg.workers, "worker threads (0 = all cores)");
  std::string config_file;
  run->add_option("--config", config_file, "plain-text config file (INI/TOML); flags win")
      ->check(CLI::ExistingFile);
  run->footer(experiments_footer());

  app.add_subcommand("list-experiments", "print the experiment registry");
  app.add_subcommand("selftest", "quick built-in consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (app.got_subcommand("list-experiments")) {
    for (const auto& e : mylab::experiments::registry()) {
      std::printf("%-16s %s\n", e.name.c_str(), e.summary.c_str());
    }
    return 0;
  }
  if (app.got_subcommand("selftest")) return selftest();

  try {
    if (!config_file.empty()) apply_config_file(*run, config_file);
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", config_file.c_str(), e.what());
    return kExitUsage;
  } catch (const mylab::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }

  cfg.q = q;
  cfg.p = p;
  cfg.n = n;
  cfg.seeds = seeds;
  cfg.horizon = horizon;
  cfg.dt = dt;
  cfg.lambda = lambda;
  cfg.n_paths = paths;
  cfg.out_dir = out;
  try {
    parse_tolerances(tolerances, cfg);
    const auto result = mylab::experiments::run(cfg);
    mylab::experiments::write_artifacts(cfg, result);
    print_verdicts(result);
    std::printf("artifacts: %s\n", (cfg.out_dir / result.experiment).string().c_str());
    return result.passed() ? 0 : kExitFailedChecks;
  } catch (const mylab::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    std::fprintf(stderr, "%s", run->help().c_str());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
