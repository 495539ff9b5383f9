#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "igdsync/harness.hpp"

namespace {

// Flags shared by `run` and `sanity`. Values are kept as raw strings
// and routed through the config-file parser so a flag and its config
// key behave identically; flags override the file.
struct RawOptions {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_experiment_flags(CLI::App* cmd, RawOptions& raw) {
  cmd->add_option("--config", raw.config_file, "key = value config file");
  static const std::vector<std::pair<std::string, std::string>> flags = {
      {"--n", "n"},
      {"--nodes", "nodes"},
      {"--gamma-frac", "gamma-frac"},
      {"--gamma", "gamma"},
      {"--r", "r"},
      {"--eps", "eps"},
      {"--algos", "algos"},
      {"--trials", "trials"},
      {"--iters", "iters"},
      {"--seed", "seed"},
      {"--error-mode", "error-mode"},
      {"--topology", "topology"},
      {"--zeta", "zeta"},
      {"--out", "out"},
      {"--redraw-instance", "redraw-instance"},
      {"--certify", "certify"},
      {"--on-violation", "on-violation"},
      {"--grad-tol", "grad-tol"},
  };
  for (const auto& [flag, key] : flags) {
    const std::string k = key;
    cmd->add_option_function<std::string>(
        flag, [&raw, k](const std::string& v) { raw.overrides.emplace_back(k, v); });
  }
}

igdsync::ExperimentConfig build_config(const RawOptions& raw) {
  igdsync::ExperimentConfig config;
  if (!raw.config_file.empty()) {
    std::ifstream in(raw.config_file);
    if (!in) throw std::invalid_argument("cannot open config file: " + raw.config_file);
    config = igdsync::load_config(in, config);
  }
  for (const auto& [key, value] : raw.overrides) igdsync::apply_config_line(config, key, value);
  return config;
}

int cmd_run(const RawOptions& raw) {
  const auto config = build_config(raw);
  const auto agg = igdsync::run_experiment(config);
  std::cout.precision(17);
  for (const auto& cell : agg.cells)
    std::cout << igdsync::to_string(cell.algo) << " eps=" << cell.eps
              << ": final mean gap = " << cell.mean_gap.back()
              << ", syncs (mean) = " << cell.sync_mean_gap.size()
              << ", messages = " << cell.messages_indcomp + cell.messages_intsync << "\n";
  std::cout << "trials = " << agg.trials << ", certificate violations = "
            << agg.violations.size() << "\n";
  if (!config.out_dir.empty())
    std::cout << "wrote convergence.csv, syncs.csv, violations.csv to " << config.out_dir
              << "\n";
  if (!agg.violations.empty()) {
    igdsync::write_violations_csv(std::cerr, agg.violations);
    if (config.fail_on_violation) return 3;
  }
  return 0;
}

int cmd_certify(const std::string& trace_path) {
  std::ifstream in(trace_path);
  if (!in) throw std::invalid_argument("cannot open trace file: " + trace_path);
  const auto loaded = igdsync::load_trace(in);
  const auto rep = igdsync::certify_trace(loaded.trace, loaded.problem, loaded.config);
  std::cout << rep.summary();
  if (!rep.clean()) {
    rep.violations_csv(std::cout);
    return 3;
  }
  std::cout << "all certificates clean\n";
  return 0;
}

int cmd_bounds(double L, double ell, double gamma, double r, const std::string& eps_list,
               std::optional<double> zeta, int nodes) {
  igdsync::ExperimentConfig tmp;
  std::cout.precision(17);
  const auto cc = igdsync::contraction_q(gamma, L, ell, r);
  std::cout << "r_bar = " << cc.r_bar << ", r_max = " << cc.r_max << ", q = " << cc.q
            << (cc.contractive ? " (contractive)" : " (NOT contractive)") << "\n";
  igdsync::apply_config_line(tmp, "eps", eps_list);
  for (double eps : tmp.epsilons) {
    const auto b = igdsync::asymptotic_bounds(eps, zeta, nodes, L, ell, r);
    std::cout << "eps = " << eps << ": tau = " << b.tau << ", gap_bound = " << b.gap_bound
              << ", grad_bound = " << b.grad_bound << ", dist_bound = " << b.dist_bound
              << ", igdds_gap_bound = " << b.igdds_gap_bound << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized inexact gradient descent with triggered synchronization"};
  app.require_subcommand(1);

  RawOptions run_raw;
  auto* run_cmd = app.add_subcommand("run", "execute a seeded Monte-Carlo experiment");
  add_experiment_flags(run_cmd, run_raw);

  std::string trace_path;
  auto* certify_cmd = app.add_subcommand("certify", "re-check a saved trace's certificates");
  certify_cmd->add_option("--trace", trace_path, "trace file written by save_trace")->required();

  double b_L = 0, b_ell = 0, b_gamma = 0, b_r = 0;
  std::string b_eps;
  int b_nodes = 4;
  std::optional<double> b_zeta;
  auto* bounds_cmd = app.add_subcommand("bounds", "print the closed-form asymptotic bounds");
  bounds_cmd->add_option("--L", b_L)->required();
  bounds_cmd->add_option("--ell", b_ell)->required();
  bounds_cmd->add_option("--gamma", b_gamma)->required();
  bounds_cmd->add_option("--r", b_r)->required();
  bounds_cmd->add_option("--eps", b_eps)->required();
  bounds_cmd->add_option("--zeta", b_zeta);
  bounds_cmd->add_option("--nodes", b_nodes);

  RawOptions sanity_raw;
  auto* sanity_cmd = app.add_subcommand("sanity", "print instance diagnostics for a config");
  add_experiment_flags(sanity_cmd, sanity_raw);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_raw);
    if (certify_cmd->parsed()) return cmd_certify(trace_path);
    if (bounds_cmd->parsed()) return cmd_bounds(b_L, b_ell, b_gamma, b_r, b_eps, b_zeta, b_nodes);
    if (sanity_cmd->parsed()) std::cout << igdsync::sanity_report(build_config(sanity_raw));
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
