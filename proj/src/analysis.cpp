#include "igdsync/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace igdsync {

namespace {
constexpr double kRelTol = 1e-9;
constexpr double kGapFloor = 1e-14;

bool within(double measured, double bound) {
  return measured <= bound + std::max(kRelTol * std::abs(bound), kGapFloor);
}
}  // namespace

ContractionConstants contraction_q(double gamma, double L, double ell, double r) {
  if (!(gamma > 0.0) || gamma > 1.0 / L)
    throw std::invalid_argument("contraction_q: gamma must lie in (0, 1/L]");
  if (r < 0.0 || r >= 1.0) throw std::invalid_argument("contraction_q: r must lie in [0, 1)");
  ContractionConstants c;
  c.r_bar = r / (1.0 - r);
  c.q = 1.0 + gamma * L * c.r_bar * c.r_bar - gamma * ell;
  c.r_max = std::sqrt(ell) / (std::sqrt(L) + std::sqrt(ell));
  c.contractive = c.q < 1.0;
  return c;
}

BoundSet asymptotic_bounds(double eps, std::optional<double> zeta, int N, double L, double ell,
                           double r) {
  BoundSet b;
  b.r_bar = r / (1.0 - r);
  b.r_max = std::sqrt(ell) / (std::sqrt(L) + std::sqrt(ell));
  const double denom = ell - L * b.r_bar * b.r_bar;
  if (!(denom > 0.0))
    throw std::invalid_argument("asymptotic_bounds: ell <= L*rbar^2 (requires r < r_max = " +
                                std::to_string(b.r_max) + ")");
  b.tau = zeta ? std::max(eps, *zeta) : eps;
  const double bn2 = b.tau * b.tau * static_cast<double>(N) * static_cast<double>(N);
  b.gap_bound = bn2 / (2.0 * denom);
  b.grad_bound = std::sqrt(L * bn2 / denom);
  b.dist_bound = std::sqrt(L * bn2 / (ell * denom));
  b.igdds_gap_bound = eps * eps * static_cast<double>(N) * static_cast<double>(N) / (2.0 * ell);
  b.q = 0.0;  // filled by callers that know gamma
  return b;
}

double drift_bound(double eps, int N, long k) {
  return 2.0 * eps * static_cast<double>(N) * (static_cast<double>(k) + 0.5);
}

std::string CertificateReport::summary() const {
  std::ostringstream out;
  out << "steps checked: " << steps_total << ", trigger-implication skips: " << trigger_skips
      << "\n";
  for (const auto& [name, count] : checked) {
    long bad = 0;
    for (const auto& v : violations)
      if (v.certificate == name) ++bad;
    out << "  " << name << ": " << count << " checks, " << bad << " violations\n";
  }
  out << "  plateau (trailing 10% max): " << plateau_max << ", bound: " << gap_bound << "\n";
  return out.str();
}

void CertificateReport::violations_csv(std::ostream& out, bool header) const {
  if (header) out << "certificate,trial,iter,node,measured,bound\n";
  out.precision(17);
  for (const auto& v : violations)
    out << v.certificate << "," << v.trial << "," << v.iter << "," << v.node << "," << v.measured
        << "," << v.bound << "\n";
}

CertificateReport certify_trace(const RunTrace& trace, const Problem& problem,
                                const AlgoConfig& config) {
  if (trace.steps.empty()) throw std::invalid_argument("certify_trace: trace has no step records");
  CertificateReport rep;
  rep.steps_total = static_cast<long>(trace.steps.size());

  const int N = problem.N;
  const double b = config.effective_bound();
  const auto cc = contraction_q(config.gamma, problem.L, problem.ell, config.r);
  const double one_minus_gl = 1.0 - config.gamma * problem.ell;
  const double state2_noise = config.gamma * b * b * static_cast<double>(N) * static_cast<double>(N) / 2.0;

  auto flag = [&](const std::string& cert, long iter, int node, double measured, double bound) {
    rep.violations.push_back({cert, rep.trial, iter, node, measured, bound});
  };

  // (a) drift bound and (b) trigger implication, per step.
  for (const auto& st : trace.steps) {
    const double bd = drift_bound(b, N, st.k);
    for (int i = 0; i < N; ++i) {
      rep.checked["drift"]++;
      // Floor scaled to the gradient magnitude: h_i is a per-component
      // sum, so it differs from the aggregate gradient by rounding even
      // with exact measurements.
      const double tol = std::max(kRelTol * bd, 1e-12 * st.grad_norm[i] + kGapFloor);
      if (st.dev_norm[i] > bd + tol) flag("drift", st.global, i, st.dev_norm[i], bd);
      if (st.cond_held) {
        if (st.grad_norm[i] < 1e-14) {
          rep.trigger_skips++;
        } else {
          rep.checked["trigger"]++;
          const double e_i = st.dev_norm[i] / st.grad_norm[i];
          if (!within(e_i, cc.r_bar)) flag("trigger", st.global, i, e_i, cc.r_bar);
        }
      }
    }
  }

  // (c) state-1 contraction at every step whose continue-condition held.
  for (const auto& st : trace.steps) {
    if (!st.cond_held) continue;
    for (int i = 0; i < N; ++i) {
      rep.checked["lemma1"]++;
      if (!within(st.f_gap_post[i], cc.q * st.f_gap_pre[i]))
        flag("lemma1", st.global, i, st.f_gap_post[i], cc.q * st.f_gap_pre[i]);
    }
  }

  // (d) state-2 single-step bound, plus the post-average iterate, and
  // (e) retained length of consecutive state-1 stretches against the
  // derived exit bound.
  size_t step_idx = 0;
  bool in_stretch = false;
  double stretch_grad0 = 0.0;
  long stretch_retained = 0;
  long stretch_start_iter = 0;
  auto close_stretch = [&](long end_iter) {
    if (!in_stretch) return;
    in_stretch = false;
    if (config.r <= 0.0 || b <= 0.0 || !cc.contractive || stretch_grad0 <= 0.0) return;
    const double rhs = (b * N / cc.r_bar) * (b * N / cc.r_bar);
    const double ratio = rhs * problem.ell / (problem.L * stretch_grad0 * stretch_grad0);
    long t_star = 0;
    if (ratio <= 1.0)
      t_star = static_cast<long>(std::floor(std::log(ratio) / std::log(cc.q))) + 1;
    rep.checked["exit_bound"]++;
    if (stretch_retained > t_star)
      flag("exit_bound", end_iter, -1, static_cast<double>(stretch_retained),
           static_cast<double>(t_star));
  };
  for (const auto& sr : trace.syncs) {
    const size_t loop_begin = step_idx;
    step_idx += static_cast<size_t>(sr.kappa);
    if (sr.state == 2) {
      close_stretch(sr.s_m);
      const StepRecord& st = trace.steps.at(loop_begin);
      const double bound_d = one_minus_gl * st.f_gap_pre[0] + state2_noise;
      for (int i = 0; i < N; ++i) {
        rep.checked["lemma2"]++;
        const double bd_i = one_minus_gl * st.f_gap_pre[i] + state2_noise;
        if (!within(st.f_gap_post[i], bd_i)) flag("lemma2", sr.s_m, i, st.f_gap_post[i], bd_i);
      }
      rep.checked["lemma2"]++;
      if (!within(sr.gap_at_sync, bound_d)) flag("lemma2", sr.s_m, -1, sr.gap_at_sync, bound_d);
    } else {
      if (!in_stretch) {
        in_stretch = true;
        stretch_grad0 = sr.grad_norm_at_loop_start;
        stretch_retained = 0;
        stretch_start_iter = sr.s_m;
      }
      stretch_retained += sr.kappa - 1;
    }
  }
  close_stretch(trace.syncs.empty() ? trace.final_global : trace.syncs.back().s_m);
  (void)stretch_start_iter;

  // (f) plateau statistic over the trailing 10% of global iterations.
  // Reported, not flagged: the limsup bound is asymptotic and a finite
  // trace may still be in its transient.
  if (cc.r_max > config.r) {
    rep.gap_bound =
        asymptotic_bounds(config.epsilon, config.zeta, N, problem.L, problem.ell, config.r)
            .gap_bound;
    const long final_g = trace.final_global;
    const long from = final_g - final_g / 10;
    rep.plateau_max = 0.0;
    for (long g = from; g <= final_g; ++g)
      rep.plateau_max = std::max(rep.plateau_max, trace.retained_mean_gap[g]);
    rep.checked["plateau"]++;
  }
  return rep;
}

}  // namespace igdsync
