#include "igdsync/algo.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace igdsync {

Variant parse_variant(const std::string& s) {
  if (s == "alg1") return Variant::alg1;
  if (s == "alg2") return Variant::alg2;
  if (s == "igdds") return Variant::igdds;
  if (s == "gd") return Variant::gd;
  throw std::invalid_argument("unknown variant '" + s + "' (alg1|alg2|igdds|gd)");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::alg1: return "alg1";
    case Variant::alg2: return "alg2";
    case Variant::igdds: return "igdds";
    case Variant::gd: return "gd";
  }
  return "?";
}

double AlgoConfig::effective_bound() const {
  if (variant == Variant::alg2) return std::max(epsilon, zeta.value_or(0.0));
  return epsilon;
}

void validate(const AlgoConfig& config, const Problem& problem) {
  if (!(config.gamma > 0.0) || config.gamma > 1.0 / problem.L)
    throw std::invalid_argument("config: gamma must lie in (0, 1/L], 1/L = " +
                                std::to_string(1.0 / problem.L));
  if (config.epsilon < 0.0) throw std::invalid_argument("config: epsilon must be nonnegative");
  if (config.r < 0.0 || config.r >= 1.0) throw std::invalid_argument("config: r must lie in [0, 1)");
  if (config.max_global_iters < 1) throw std::invalid_argument("config: max_global_iters < 1");
  switch (config.variant) {
    case Variant::alg1:
    case Variant::alg2: {
      double r_max = std::sqrt(problem.ell) / (std::sqrt(problem.L) + std::sqrt(problem.ell));
      if (config.r >= r_max)
        throw std::invalid_argument("config: r = " + std::to_string(config.r) +
                                    " violates r < sqrt(ell)/(sqrt(L)+sqrt(ell)) = " +
                                    std::to_string(r_max));
      if (config.variant == Variant::alg2 && !config.zeta)
        throw std::invalid_argument("config: alg2 requires a gradient bound zeta");
      break;
    }
    case Variant::igdds:
      if (config.r != 0.0) throw std::invalid_argument("config: igdds requires r = 0");
      break;
    case Variant::gd:
      if (config.r != 0.0 || config.epsilon != 0.0)
        throw std::invalid_argument("config: gd requires r = 0 and epsilon = 0");
      break;
  }
}

void indcomp_step(RunState& state, const Problem& problem, const Topology& topo,
                  const ErrorModel& model, const AlgoConfig& config, StepRecord* rec) {
  const int N = problem.N;
  const long global = state.s + state.k;
  state.x_prev = state.x;

  if (rec) {
    rec->s = state.s;
    rec->k = state.k;
    rec->global = global;
    rec->h_norm.resize(N);
    rec->grad_norm.resize(N);
    rec->dev_norm.resize(N);
    rec->f_gap_pre.resize(N);
    rec->f_gap_post.resize(N);
  }
  state.h_norms.assign(N, 0.0);

  for (int i = 0; i < N; ++i) {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(problem.n);
    for (int j = 0; j < N; ++j)
      h += measure(topo, model, problem, i, j, state.x_prev[j], global, state.trial);
    state.h_norms[i] = h.norm();
    if (rec) {
      Eigen::VectorXd g = problem.gradient(state.x_prev[i]);
      rec->h_norm[i] = state.h_norms[i];
      rec->grad_norm[i] = g.norm();
      rec->dev_norm[i] = (g - h).norm();
      rec->f_gap_pre[i] = problem.gap(state.x_prev[i]);
    }
    state.x[i] = state.x_prev[i] - config.gamma * h;
    if (!state.x[i].allFinite())
      throw std::runtime_error("run diverged: non-finite iterate at node " + std::to_string(i) +
                               ", global iteration " + std::to_string(global));
  }
  state.messages_indcomp += 2L * static_cast<long>(topo.edges.size());
  state.k += 1;

  if (rec) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(problem.n);
    for (int i = 0; i < N; ++i) {
      rec->f_gap_post[i] = problem.gap(state.x[i]);
      mean += state.x[i];
    }
    mean /= static_cast<double>(N);
    rec->mean_gap_post = problem.gap(mean);
    rec->messages = state.messages_indcomp + state.messages_intsync;

    const double b = config.effective_bound();
    if (config.r == 0.0) {
      rec->cond_held = false;
    } else if (b == 0.0) {
      rec->cond_held = true;  // threshold is +infinity under zero error
    } else {
      rec->cond_held = true;
      const double t = static_cast<double>(state.k - 1);
      for (int i = 0; i < N; ++i)
        if (t > config.r * state.h_norms[i] / (2.0 * b * N) - 0.5) rec->cond_held = false;
    }
  }
}

bool trigger(const RunState& state, const AlgoConfig& config) {
  if (state.k < 1) throw std::logic_error("trigger: no step taken since last synchronization");
  if (config.r == 0.0) return true;
  const double b = config.effective_bound();
  if (b == 0.0) return false;
  const double t = static_cast<double>(state.k - 1);
  const int N = static_cast<int>(state.h_norms.size());
  for (double hn : state.h_norms)
    if (t > config.r * hn / (2.0 * b * N) - 0.5) return true;
  return false;
}

void intsync(RunState& state, const Problem& problem, const Topology& topo, SyncRecord* rec) {
  const int kappa = state.k;
  const auto& values = (kappa != 1) ? state.x_prev : state.x;
  auto [mean, messages] = tree_average(topo, values);
  state.s += (kappa != 1) ? kappa - 1 : 1;
  state.k = 0;
  state.m += 1;
  state.messages_intsync += messages;
  for (auto& xi : state.x) xi = mean;
  state.x_prev = state.x;
  if (rec) {
    rec->m = state.m;
    rec->s_m = state.s;
    rec->kappa = kappa;
    rec->state = (kappa != 1) ? 1 : 2;
    rec->gap_at_sync = problem.gap(mean);
    rec->messages = state.messages_indcomp + state.messages_intsync;
  }
}

RunTrace run(const Problem& problem, const Topology& topo, const AlgoConfig& config,
             const ErrorModel& model, const Eigen::VectorXd& x0, long trial) {
  validate(config, problem);
  if (config.variant == Variant::igdds && config.epsilon > 0.0 &&
      model.mode != ErrorMode::shared_per_source && model.mode != ErrorMode::none &&
      model.mode != ErrorMode::quantizer)
    throw std::invalid_argument("igdds requires receiver-independent (shared) errors");
  if (x0.size() != problem.n) throw std::invalid_argument("run: x0 has wrong dimension");

  RunState state;
  state.trial = trial;
  state.x.assign(problem.N, x0);
  state.x_prev = state.x;

  RunTrace trace;
  trace.initial_gap = problem.gap(x0);
  trace.initial_grad_norm = problem.gradient(x0).norm();
  trace.retained_mean_gap.assign(config.max_global_iters + 1,
                                 std::numeric_limits<double>::quiet_NaN());
  trace.retained_mean_gap[0] = trace.initial_gap;

  long loop_first_step = 0;  // index into trace.steps of the current loop's first step
  while (true) {
    const long g = state.s + state.k;
    if (g >= config.max_global_iters) break;
    if (config.grad_tol > 0.0) {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(problem.n);
      for (const auto& xi : state.x) mean += xi;
      mean /= static_cast<double>(problem.N);
      if (problem.gradient(mean).norm() <= config.grad_tol) break;
    }
    StepRecord rec;
    try {
      indcomp_step(state, problem, topo, model, config, &rec);
    } catch (const std::runtime_error& e) {
      trace.aborted = true;
      trace.abort_reason = e.what();
      break;
    }
    trace.retained_mean_gap[state.s + state.k] = rec.mean_gap_post;
    trace.steps.push_back(std::move(rec));

    if (trigger(state, config)) {
      SyncRecord srec;
      intsync(state, problem, topo, &srec);
      const StepRecord& first = trace.steps[loop_first_step];
      srec.pre_avg_gap_node0 = first.f_gap_pre[0];
      srec.grad_norm_at_loop_start = first.grad_norm[0];
      trace.retained_mean_gap[state.s] = srec.gap_at_sync;
      trace.syncs.push_back(srec);
      loop_first_step = static_cast<long>(trace.steps.size());
    }
  }
  trace.final_global = state.s + state.k;
  trace.retained_mean_gap.resize(trace.final_global + 1);
  trace.messages_indcomp = state.messages_indcomp;
  trace.messages_intsync = state.messages_intsync;
  return trace;
}

void save_trace(std::ostream& out, const RunTrace& trace, const Problem& problem,
                const AlgoConfig& config) {
  out.precision(17);
  out << "igdsync-trace 1\n";
  out << to_string(config.variant) << " " << config.gamma << " " << config.r << " "
      << config.epsilon << " " << (config.zeta ? 1 : 0) << " " << config.zeta.value_or(0.0) << " "
      << config.max_global_iters << " " << config.grad_tol << "\n";
  save_problem(out, problem);
  out << trace.initial_gap << " " << trace.initial_grad_norm << " " << trace.final_global << " "
      << trace.messages_indcomp << " " << trace.messages_intsync << " " << (trace.aborted ? 1 : 0)
      << "\n";
  out << trace.steps.size() << "\n";
  for (const auto& st : trace.steps) {
    out << st.s << " " << st.k << " " << st.global << " " << (st.cond_held ? 1 : 0) << " "
        << st.messages << " " << st.mean_gap_post;
    for (int i = 0; i < static_cast<int>(st.h_norm.size()); ++i)
      out << " " << st.h_norm[i] << " " << st.grad_norm[i] << " " << st.dev_norm[i] << " "
          << st.f_gap_pre[i] << " " << st.f_gap_post[i];
    out << "\n";
  }
  out << trace.syncs.size() << "\n";
  for (const auto& sr : trace.syncs)
    out << sr.m << " " << sr.s_m << " " << sr.kappa << " " << sr.state << " " << sr.gap_at_sync
        << " " << sr.pre_avg_gap_node0 << " " << sr.grad_norm_at_loop_start << " " << sr.messages
        << "\n";
  out << trace.retained_mean_gap.size() << "\n";
  for (size_t i = 0; i < trace.retained_mean_gap.size(); ++i)
    out << (i ? " " : "") << trace.retained_mean_gap[i];
  out << "\n";
}

LoadedTrace load_trace(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "igdsync-trace" || version != 1)
    throw std::invalid_argument("load_trace: not a trace file");
  LoadedTrace lt;
  std::string variant;
  int has_zeta = 0;
  double zeta = 0.0;
  in >> variant >> lt.config.gamma >> lt.config.r >> lt.config.epsilon >> has_zeta >> zeta >>
      lt.config.max_global_iters >> lt.config.grad_tol;
  lt.config.variant = parse_variant(variant);
  if (has_zeta) lt.config.zeta = zeta;
  lt.problem = load_problem(in);
  int aborted = 0;
  in >> lt.trace.initial_gap >> lt.trace.initial_grad_norm >> lt.trace.final_global >>
      lt.trace.messages_indcomp >> lt.trace.messages_intsync >> aborted;
  lt.trace.aborted = aborted != 0;
  size_t n_steps = 0;
  in >> n_steps;
  lt.trace.steps.resize(n_steps);
  const int N = lt.problem.N;
  for (auto& st : lt.trace.steps) {
    int cond = 0;
    in >> st.s >> st.k >> st.global >> cond >> st.messages >> st.mean_gap_post;
    st.cond_held = cond != 0;
    st.h_norm.resize(N);
    st.grad_norm.resize(N);
    st.dev_norm.resize(N);
    st.f_gap_pre.resize(N);
    st.f_gap_post.resize(N);
    for (int i = 0; i < N; ++i)
      in >> st.h_norm[i] >> st.grad_norm[i] >> st.dev_norm[i] >> st.f_gap_pre[i] >>
          st.f_gap_post[i];
  }
  size_t n_syncs = 0;
  in >> n_syncs;
  lt.trace.syncs.resize(n_syncs);
  for (auto& sr : lt.trace.syncs)
    in >> sr.m >> sr.s_m >> sr.kappa >> sr.state >> sr.gap_at_sync >> sr.pre_avg_gap_node0 >>
        sr.grad_norm_at_loop_start >> sr.messages;
  size_t n_gap = 0;
  in >> n_gap;
  lt.trace.retained_mean_gap.resize(n_gap);
  for (auto& g : lt.trace.retained_mean_gap) in >> g;
  if (!in) throw std::invalid_argument("load_trace: truncated file");
  return lt;
}

}  // namespace igdsync
