#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "igdsync/algo.hpp"
#include "igdsync/analysis.hpp"

namespace igdsync {

struct ExperimentConfig {
  int n = 10;
  int N = 4;
  double gamma_frac = 0.5;            // gamma = gamma_frac / L unless gamma set
  std::optional<double> gamma;        // explicit step size, overrides gamma_frac
  double r = 0.03;
  std::vector<double> epsilons = {0.01, 0.1, 1.0, 10.0};
  std::vector<Variant> algorithms = {Variant::alg1, Variant::igdds, Variant::gd};
  long trials = 1000;
  long max_global_iters = 3000;
  std::uint64_t seed = 7;
  std::string topology = "complete";  // "complete" or an edge-list file path
  ErrorMode error_mode = ErrorMode::ball;
  std::optional<double> zeta;
  std::string out_dir;                // empty: no CSV output
  bool redraw_instance = true;        // draw a fresh problem per trial
  bool certify = true;
  bool fail_on_violation = false;     // otherwise violations are only reported
  double grad_tol = 0.0;
};

/// Checks the cross-field invariants that do not need a generated
/// instance. Throws std::invalid_argument.
void validate(const ExperimentConfig& config);

/// Deterministic instance for one trial: attempt seeds derived from
/// (seed, trial, attempt) are tried until the drawn problem admits the
/// configured r and step size, so every derived AlgoConfig is valid.
/// With redraw_instance false every trial maps to trial 0's instance.
Problem instance_for_trial(const ExperimentConfig& config, long trial);

/// Common standard-normal initial point of the given trial.
Eigen::VectorXd initial_point(const ExperimentConfig& config, long trial);

/// The per-run configuration for one (algorithm, eps) cell. gd forces
/// eps = 0; igdds and gd force r = 0.
AlgoConfig algo_config_for(const ExperimentConfig& config, const Problem& problem,
                           Variant variant, double eps);

/// The error source for one cell. igdds draws are receiver-independent
/// regardless of the configured mode, matching its measurement model;
/// gd runs error-free.
ErrorModel error_model_for(const ExperimentConfig& config, Variant variant, double eps);

/// Per-(algorithm, eps) aggregates over trials.
struct CellResult {
  Variant algo = Variant::alg1;
  double eps = 0.0;
  std::vector<double> mean_gap;    // per global iteration 0..iters
  std::vector<double> std_gap;     // sample standard deviation
  std::vector<double> sync_mean_gap;        // index m-1 holds sync m
  std::vector<long> sync_trials;            // trials that reached sync m
  long messages_indcomp = 0;
  long messages_intsync = 0;
  std::vector<double> plateaus;             // trailing-10% max, per trial
  std::vector<std::vector<double>> trial_sync_gaps;  // per trial, gap at sync 1..M
};

struct AggregateResult {
  std::vector<CellResult> cells;
  std::vector<Violation> violations;
  long trials = 0;

  const CellResult& cell(Variant algo, double eps) const;
};

/// Runs the full seeded Monte-Carlo experiment: per trial, every
/// (algorithm, eps) cell sees the same problem and initial point;
/// traces are certified when enabled; aggregation reduces in trial
/// order. Writes convergence.csv, syncs.csv and violations.csv when an
/// output directory is configured.
AggregateResult run_experiment(const ExperimentConfig& config);

void write_convergence_csv(std::ostream& out, const AggregateResult& agg);
void write_syncs_csv(std::ostream& out, const AggregateResult& agg);
void write_violations_csv(std::ostream& out, const std::vector<Violation>& violations);

/// Instance diagnostics: aggregate constants, step size, trigger
/// constants, the closed-form bounds per eps, and whether the
/// gamma*L*rbar^2 term is negligible next to 1 - gamma*ell.
std::string sanity_report(const ExperimentConfig& config);
std::string sanity_report(const Problem& problem, const ExperimentConfig& config);

/// Line-oriented "key = value" config text, '#' comments. Keys mirror
/// the CLI flags. Unknown keys are rejected.
void apply_config_line(ExperimentConfig& config, const std::string& key,
                       const std::string& value);
ExperimentConfig load_config(std::istream& in, ExperimentConfig base = {});

}  // namespace igdsync
