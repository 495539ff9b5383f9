#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "igdsync/errors.hpp"
#include "igdsync/network.hpp"
#include "igdsync/objective.hpp"

namespace igdsync {

enum class Variant { alg1, alg2, igdds, gd };

Variant parse_variant(const std::string& s);
std::string to_string(Variant v);

struct AlgoConfig {
  double gamma = 0.0;
  double r = 0.0;
  double epsilon = 0.0;             // error bound of the measurement model
  std::optional<double> zeta;       // gradient bound, general-graph variant only
  Variant variant = Variant::alg1;
  long max_global_iters = 1000;
  double grad_tol = 0.0;            // 0 disables the gradient stopping test

  /// Effective bound in the trigger and the certificates: epsilon for
  /// the complete-graph variants, max(epsilon, zeta) for the general
  /// graph.
  double effective_bound() const;
};

/// Rejects configs violating the run preconditions: gamma in (0, 1/L],
/// r < sqrt(ell)/(sqrt(L)+sqrt(ell)) for the triggered variants, r = 0
/// for igdds/gd, epsilon = 0 for gd, zeta present for alg2.
void validate(const AlgoConfig& config, const Problem& problem);

/// Mutable per-run state; x_prev retains the pre-step iterates needed
/// for the rollback branch of the synchronization step.
struct RunState {
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> x_prev;
  long s = 0;   // last synchrony index
  int k = 0;    // local inner-loop index
  int m = 0;    // synchronization counter
  std::vector<double> h_norms;
  long trial = 0;
  long messages_indcomp = 0;
  long messages_intsync = 0;
};

/// One inner-loop step, recorded per node at the pre-step point.
struct StepRecord {
  long s = 0;
  int k = 0;           // local index of the measurement (0-based)
  long global = 0;     // s + k at measurement time
  std::vector<double> h_norm;
  std::vector<double> grad_norm;   // ||grad f(x_i)||
  std::vector<double> dev_norm;    // ||grad f(x_i) - h_i||
  std::vector<double> f_gap_pre;
  std::vector<double> f_gap_post;
  double mean_gap_post = 0.0;
  bool cond_held = false;  // continue-condition k <= r||h_i||/(2bN) - 1/2 for all i
  long messages = 0;
};

struct SyncRecord {
  int m = 0;
  long s_m = 0;
  int kappa = 0;     // inner-loop length that ended here
  int state = 0;     // 1: repeated more than once (rollback), 2: exactly once
  double gap_at_sync = 0.0;         // common post-average gap
  double pre_avg_gap_node0 = 0.0;   // gap at the synchrony point before this loop
  double grad_norm_at_loop_start = 0.0;
  long messages = 0;
};

struct RunTrace {
  std::vector<StepRecord> steps;
  std::vector<SyncRecord> syncs;
  /// Retained trajectory of the mean iterate: entry g is
  /// f(mean x^(g)) - f*, rollbacks overwritten, indices 0..final.
  std::vector<double> retained_mean_gap;
  double initial_gap = 0.0;
  double initial_grad_norm = 0.0;
  long messages_indcomp = 0;
  long messages_intsync = 0;
  long final_global = 0;
  bool aborted = false;
  std::string abort_reason;
};

/// h_i = sum_j measure(i, j, x_j) for every node from a common pre-step
/// snapshot, then x_i <- x_i - gamma h_i; increments k and the message
/// count. Fills `rec` when given. Throws std::runtime_error when an
/// iterate turns non-finite.
void indcomp_step(RunState& state, const Problem& problem, const Topology& topo,
                  const ErrorModel& model, const AlgoConfig& config,
                  StepRecord* rec = nullptr);

/// True iff some node's locally verifiable exit condition fired for the
/// most recent step: exists i with k-1 > r||h_i||/(2bN) - 1/2. r = 0
/// always fires; b = 0 with r > 0 never fires.
bool trigger(const RunState& state, const AlgoConfig& config);

/// The synchronization step: averages the retained iterates over the
/// spanning tree (discarding the newest step when the loop repeated
/// more than once), advances s, resets k. Fills `rec` when given.
void intsync(RunState& state, const Problem& problem, const Topology& topo,
             SyncRecord* rec = nullptr);

/// Full run from the common initial point x0: alternates inner-loop
/// steps with triggered synchronization until the retained global index
/// reaches max_global_iters or the mean iterate's gradient norm drops
/// below grad_tol.
RunTrace run(const Problem& problem, const Topology& topo, const AlgoConfig& config,
             const ErrorModel& model, const Eigen::VectorXd& x0, long trial);

/// Trace snapshot with enough detail to re-certify offline.
void save_trace(std::ostream& out, const RunTrace& trace, const Problem& problem,
                const AlgoConfig& config);
struct LoadedTrace {
  RunTrace trace;
  Problem problem;
  AlgoConfig config;
};
LoadedTrace load_trace(std::istream& in);

}  // namespace igdsync
