#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "igdsync/algo.hpp"
#include "igdsync/objective.hpp"

namespace igdsync {

struct ContractionConstants {
  double q = 0.0;      // 1 + gamma L rbar^2 - gamma ell
  double r_bar = 0.0;  // r/(1-r)
  double r_max = 0.0;  // sqrt(ell)/(sqrt(L)+sqrt(ell))
  bool contractive = false;  // q < 1, i.e. r < r_max
};

ContractionConstants contraction_q(double gamma, double L, double ell, double r);

struct BoundSet {
  double q = 0.0;
  double r_bar = 0.0;
  double r_max = 0.0;
  double gap_bound = 0.0;    // limsup f(x_i) - f*
  double grad_bound = 0.0;   // limsup ||grad f(x_i)||
  double dist_bound = 0.0;   // limsup ||x_i - x*||
  double igdds_gap_bound = 0.0;  // eps^2 N^2 / (2 ell)
  double tau = 0.0;          // effective bound used (eps, or max(eps, zeta))
};

/// Closed-form asymptotic bounds. With zeta present the general-graph
/// variant's tau = max(eps, zeta) replaces eps in the three limsup
/// bounds. Requires ell > L rbar^2.
BoundSet asymptotic_bounds(double eps, std::optional<double> zeta, int N, double L, double ell,
                           double r);

/// Worst-case gradient-representation drift after k steps since the
/// last synchrony: 2 eps N (k + 1/2).
double drift_bound(double eps, int N, long k);

struct Violation {
  std::string certificate;  // drift | trigger | lemma1 | lemma2 | exit_bound | plateau
  long trial = 0;
  long iter = 0;
  int node = -1;
  double measured = 0.0;
  double bound = 0.0;
};

struct CertificateReport {
  std::map<std::string, long> checked;
  std::vector<Violation> violations;
  long trigger_skips = 0;  // steps skipped because ||grad f|| < 1e-14
  long steps_total = 0;
  double plateau_max = 0.0;  // max mean gap over the trailing 10% window
  double gap_bound = 0.0;
  long trial = 0;

  bool clean() const { return violations.empty(); }
  std::string summary() const;
  void violations_csv(std::ostream& out, bool header = true) const;
};

/// Post-hoc certification of a trace against the per-step drift bound,
/// the trigger implication, the state-1 contraction, the state-2
/// single-step bound, the derived inner-loop exit bound, and the
/// asymptotic plateau. Relative tolerance 1e-9 with a 1e-14 gap floor.
CertificateReport certify_trace(const RunTrace& trace, const Problem& problem,
                                const AlgoConfig& config);

}  // namespace igdsync
