#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "awflow/acceptance.hpp"
#include "awflow/calculus.hpp"
#include "awflow/errors.hpp"
#include "awflow/experiment.hpp"

namespace {

enum ExitCode { kPass = 0, kMonitorFailure = 1, kConfigError = 2, kRuntimeError = 3 };

int cmd_run(const std::string& path) {
  const auto config = awflow::load_config(path);
  const auto result = awflow::run_experiment(config);
  for (const auto& r : result.runs) {
    std::printf("run %d: %s at t = %.6g, %s\n", r.index, r.status.c_str(), r.t_final,
                r.passed() ? "monitors pass" : "monitor failure");
    for (const auto& m : r.monitors) {
      if (!m.passed) std::printf("    %s: %.6g > %.6g at t = %.6g\n", m.name.c_str(), m.worst_violation, m.tolerance, m.worst_time);
    }
    if (!r.error.empty()) std::printf("    error: %s\n", r.error.c_str());
  }
  std::printf("summary: %s/summary.json\n", awflow::resolved_output_dir(config).c_str());
  return result.all_passed() ? kPass : kMonitorFailure;
}

int cmd_sweep(const std::string& path, const std::vector<double>& gains) {
  const auto config = awflow::load_config(path);
  const auto rows = awflow::k_sweep_study(config, gains);
  const std::string csv = awflow::sweep_csv(rows);
  const std::filesystem::path dir = awflow::resolved_output_dir(config);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "sweep.csv", std::ios::trunc) << csv;
  std::fputs(csv.c_str(), stdout);
  return kPass;
}

int cmd_accept(std::uint64_t seed, const std::string& output_dir) {
  awflow::AcceptanceOptions options;
  options.output_dir = output_dir;
  const auto report = awflow::run_acceptance_suite(seed, options);
  for (const auto& c : report.criteria) {
    std::printf("criterion %d (%s): %s\n", c.id, c.name.c_str(), c.passed ? "PASS" : "FAIL");
  }
  return report.all_passed() ? kPass : kMonitorFailure;
}

int cmd_lemmas(const std::string& path, int samples, std::uint64_t seed) {
  const auto set = awflow::load_set_spec(path);
  const auto report = awflow::run_lemma_suite(set, samples, seed);
  std::printf("%s: %d samples\n", report.set_kind.c_str(), samples);
  for (const auto& p : report.properties) {
    std::printf("  %-36s %s  worst %.3e  tol %.1e  checked %d  excluded %d\n", p.name.c_str(),
                p.passed ? "PASS" : "FAIL", p.worst, p.tolerance, p.checked, p.excluded);
  }
  return report.all_passed() ? kPass : kMonitorFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anti-windup gradient flow experiments"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Integrate an experiment config and apply its monitors");
  run->add_option("config", config_path, "Experiment config (YAML)")->required();

  std::vector<double> gains;
  auto* sweep = app.add_subcommand("sweep", "Deviation from the projected gradient flow for each K");
  sweep->add_option("config", config_path, "Experiment config (YAML)")->required();
  sweep->add_option("--k", gains, "Gains, e.g. --k 0.2 0.1 0.05")->required()->delimiter(',');

  std::uint64_t seed = 1;
  std::string output_dir;
  auto* accept = app.add_subcommand("accept", "Run the acceptance suite");
  accept->add_option("--seed", seed, "Random seed");
  accept->add_option("--output-dir", output_dir, "Directory for report.json and witnesses");

  std::string set_path;
  int samples = 1000;
  auto* lemmas = app.add_subcommand("lemmas", "Run the projection property suite on a set");
  lemmas->add_option("set-spec", set_path, "Set spec (YAML)")->required();
  lemmas->add_option("--samples", samples, "Sample count")->check(CLI::PositiveNumber);
  lemmas->add_option("--seed", seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*sweep) return cmd_sweep(config_path, gains);
    if (*accept) return cmd_accept(seed, output_dir);
    if (*lemmas) return cmd_lemmas(set_path, samples, seed);
  } catch (const awflow::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kRuntimeError;
}
