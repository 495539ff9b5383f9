#include "igdsync/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "igdsync/rng.hpp"

namespace igdsync {

namespace {

constexpr std::uint64_t kTrialTag = 0x747269616cull;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad numeric value for '" + key + "': " + value);
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad integer value for '" + key + "': " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("bad boolean value for '" + key + "': " + value);
}

double trailing_max(const std::vector<double>& series) {
  const long last = static_cast<long>(series.size()) - 1;
  double best = 0.0;
  for (long g = last - last / 10; g <= last; ++g) best = std::max(best, series[g]);
  return best;
}

}  // namespace

void validate(const ExperimentConfig& config) {
  if (config.n < 1 || config.N < 2)
    throw std::invalid_argument("experiment: need n >= 1 and N >= 2");
  if (config.trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  if (config.max_global_iters < 1)
    throw std::invalid_argument("experiment: iteration horizon must be >= 1");
  if (config.epsilons.empty()) throw std::invalid_argument("experiment: epsilon list is empty");
  for (double e : config.epsilons)
    if (e < 0.0) throw std::invalid_argument("experiment: epsilon must be nonnegative");
  if (config.algorithms.empty())
    throw std::invalid_argument("experiment: algorithm list is empty");
  if (!config.gamma && !(config.gamma_frac > 0.0 && config.gamma_frac <= 1.0))
    throw std::invalid_argument("experiment: gamma fraction must lie in (0, 1]");
  if (config.gamma && !(*config.gamma > 0.0))
    throw std::invalid_argument("experiment: explicit gamma must be positive");
  if (config.r < 0.0 || config.r >= 1.0)
    throw std::invalid_argument("experiment: r must lie in [0, 1)");
  for (Variant v : config.algorithms)
    if (v == Variant::alg2 && !config.zeta)
      throw std::invalid_argument("experiment: the general-graph variant needs zeta");
}

Problem instance_for_trial(const ExperimentConfig& config, long trial) {
  const std::uint64_t t = config.redraw_instance ? static_cast<std::uint64_t>(trial) : 0;
  const bool triggered = config.r > 0.0;
  for (std::uint64_t attempt = 0; attempt < 100000; ++attempt) {
    const std::uint64_t s = KeyedRng({config.seed, kTrialTag, t, attempt}).bits(0);
    Problem p = random_instance(config.n, config.N, s);
    if (triggered) {
      const double r_max = std::sqrt(p.ell) / (std::sqrt(p.L) + std::sqrt(p.ell));
      if (config.r >= r_max) continue;
    }
    if (config.gamma && *config.gamma > 1.0 / p.L) continue;
    return p;
  }
  throw std::runtime_error("instance_for_trial: no admissible instance after 100000 attempts");
}

Eigen::VectorXd initial_point(const ExperimentConfig& config, long trial) {
  return KeyedRng({config.seed, keytag::kInitPoint, static_cast<std::uint64_t>(trial)})
      .gaussian_vector(config.n);
}

AlgoConfig algo_config_for(const ExperimentConfig& config, const Problem& problem,
                           Variant variant, double eps) {
  AlgoConfig ac;
  ac.gamma = config.gamma ? *config.gamma : config.gamma_frac / problem.L;
  ac.variant = variant;
  ac.max_global_iters = config.max_global_iters;
  ac.grad_tol = config.grad_tol;
  switch (variant) {
    case Variant::alg1:
      ac.r = config.r;
      ac.epsilon = eps;
      break;
    case Variant::alg2:
      ac.r = config.r;
      ac.epsilon = eps;
      ac.zeta = config.zeta;
      break;
    case Variant::igdds:
      ac.r = 0.0;
      ac.epsilon = eps;
      break;
    case Variant::gd:
      ac.r = 0.0;
      ac.epsilon = 0.0;
      break;
  }
  return ac;
}

ErrorModel error_model_for(const ExperimentConfig& config, Variant variant, double eps) {
  ErrorModel m;
  m.seed = config.seed;
  if (variant == Variant::gd) {
    m.mode = ErrorMode::none;
    m.epsilon = 0.0;
    return m;
  }
  m.epsilon = eps;
  m.mode = config.error_mode;
  // The baseline's measurement model is receiver-independent, so
  // receiver-dependent modes collapse to the shared per-source draw.
  if (variant == Variant::igdds &&
      (m.mode == ErrorMode::ball || m.mode == ErrorMode::sphere))
    m.mode = ErrorMode::shared_per_source;
  return m;
}

const CellResult& AggregateResult::cell(Variant algo, double eps) const {
  for (const auto& c : cells)
    if (c.algo == algo && (algo == Variant::gd || c.eps == eps)) return c;
  throw std::out_of_range("AggregateResult::cell: no such (algorithm, eps) cell");
}

AggregateResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  Topology topo;
  if (config.topology == "complete") {
    topo = build_complete(config.N);
  } else {
    std::ifstream in(config.topology);
    if (!in) throw std::invalid_argument("cannot open topology file: " + config.topology);
    topo = load_edge_list(in, config.N);
  }

  AggregateResult agg;
  agg.trials = config.trials;
  for (Variant v : config.algorithms) {
    if (v == Variant::gd) {
      CellResult c;
      c.algo = v;
      c.eps = 0.0;
      agg.cells.push_back(std::move(c));
      continue;
    }
    for (double eps : config.epsilons) {
      CellResult c;
      c.algo = v;
      c.eps = eps;
      agg.cells.push_back(std::move(c));
    }
  }

  const size_t len = static_cast<size_t>(config.max_global_iters) + 1;
  std::vector<std::vector<double>> welford_m2(agg.cells.size());
  std::vector<std::vector<double>> sync_sum(agg.cells.size());
  for (size_t ci = 0; ci < agg.cells.size(); ++ci) {
    agg.cells[ci].mean_gap.assign(len, 0.0);
    agg.cells[ci].std_gap.assign(len, 0.0);
    welford_m2[ci].assign(len, 0.0);
  }

  for (long t = 0; t < config.trials; ++t) {
    const Problem problem = instance_for_trial(config, t);
    const Eigen::VectorXd x0 = initial_point(config, t);
    for (size_t ci = 0; ci < agg.cells.size(); ++ci) {
      CellResult& cell = agg.cells[ci];
      const AlgoConfig ac = algo_config_for(config, problem, cell.algo, cell.eps);
      const ErrorModel model = error_model_for(config, cell.algo, cell.eps);
      const RunTrace trace = run(problem, topo, ac, model, x0, t);

      if (config.certify) {
        CertificateReport rep = certify_trace(trace, problem, ac);
        for (Violation v : rep.violations) {
          v.trial = t;
          agg.violations.push_back(std::move(v));
        }
      }

      std::vector<double> series = trace.retained_mean_gap;
      series.resize(len, series.back());
      const double count = static_cast<double>(t + 1);
      for (size_t g = 0; g < len; ++g) {
        const double delta = series[g] - cell.mean_gap[g];
        cell.mean_gap[g] += delta / count;
        welford_m2[ci][g] += delta * (series[g] - cell.mean_gap[g]);
      }
      cell.plateaus.push_back(trailing_max(series));

      std::vector<double> gaps;
      gaps.reserve(trace.syncs.size());
      for (const auto& sr : trace.syncs) gaps.push_back(sr.gap_at_sync);
      if (sync_sum[ci].size() < gaps.size()) {
        sync_sum[ci].resize(gaps.size(), 0.0);
        cell.sync_trials.resize(gaps.size(), 0);
      }
      for (size_t m = 0; m < gaps.size(); ++m) {
        sync_sum[ci][m] += gaps[m];
        cell.sync_trials[m] += 1;
      }
      cell.trial_sync_gaps.push_back(std::move(gaps));

      cell.messages_indcomp += trace.messages_indcomp;
      cell.messages_intsync += trace.messages_intsync;
    }
  }

  for (size_t ci = 0; ci < agg.cells.size(); ++ci) {
    CellResult& cell = agg.cells[ci];
    if (config.trials > 1)
      for (size_t g = 0; g < len; ++g)
        cell.std_gap[g] = std::sqrt(welford_m2[ci][g] / static_cast<double>(config.trials - 1));
    cell.sync_mean_gap.resize(sync_sum[ci].size());
    for (size_t m = 0; m < sync_sum[ci].size(); ++m)
      cell.sync_mean_gap[m] = sync_sum[ci][m] / static_cast<double>(cell.sync_trials[m]);
  }

  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    const auto dir = std::filesystem::path(config.out_dir);
    std::ofstream conv(dir / "convergence.csv");
    write_convergence_csv(conv, agg);
    std::ofstream syncs(dir / "syncs.csv");
    write_syncs_csv(syncs, agg);
    std::ofstream viol(dir / "violations.csv");
    write_violations_csv(viol, agg.violations);
  }
  return agg;
}

void write_convergence_csv(std::ostream& out, const AggregateResult& agg) {
  out.precision(17);
  out << "algo,eps,iter,mean_gap,std_gap,trials\n";
  for (const auto& cell : agg.cells)
    for (size_t g = 0; g < cell.mean_gap.size(); ++g)
      out << to_string(cell.algo) << "," << cell.eps << "," << g << "," << cell.mean_gap[g]
          << "," << cell.std_gap[g] << "," << agg.trials << "\n";
}

void write_syncs_csv(std::ostream& out, const AggregateResult& agg) {
  out.precision(17);
  out << "algo,eps,m,mean_gap_at_sync,trials_contributing\n";
  for (const auto& cell : agg.cells)
    for (size_t m = 0; m < cell.sync_mean_gap.size(); ++m)
      out << to_string(cell.algo) << "," << cell.eps << "," << (m + 1) << ","
          << cell.sync_mean_gap[m] << "," << cell.sync_trials[m] << "\n";
}

void write_violations_csv(std::ostream& out, const std::vector<Violation>& violations) {
  out.precision(17);
  out << "certificate,trial,iter,node,measured,bound\n";
  for (const auto& v : violations)
    out << v.certificate << "," << v.trial << "," << v.iter << "," << v.node << ","
        << v.measured << "," << v.bound << "\n";
}

std::string sanity_report(const Problem& problem, const ExperimentConfig& config) {
  const double gamma = config.gamma ? *config.gamma : config.gamma_frac / problem.L;
  const auto cc = contraction_q(gamma, problem.L, problem.ell, config.r);
  const double drift_term = gamma * problem.L * cc.r_bar * cc.r_bar;
  const double contraction_term = 1.0 - gamma * problem.ell;
  std::ostringstream out;
  out.precision(17);
  out << "nodes = " << problem.N << ", dim = " << problem.n << "\n";
  out << "L = " << problem.L << ", ell = " << problem.ell << "\n";
  out << "gamma = " << gamma << "\n";
  out << "r = " << config.r << ", r_bar = " << cc.r_bar << ", r_max = " << cc.r_max << "\n";
  out << "q = " << cc.q << (cc.contractive ? " (contractive)" : " (NOT contractive)") << "\n";
  out << "gamma*L*rbar^2 = " << drift_term << "\n";
  out << "1 - gamma*ell = " << contraction_term << "\n";
  const bool negligible = drift_term < 0.01 * contraction_term;
  out << "drift term negligible (ratio < 0.01): " << (negligible ? "yes" : "no") << "\n";
  if (cc.contractive) {
    for (double eps : config.epsilons) {
      const auto b =
          asymptotic_bounds(eps, config.zeta, problem.N, problem.L, problem.ell, config.r);
      out << "eps = " << eps << ": tau = " << b.tau << ", gap_bound = " << b.gap_bound
          << ", grad_bound = " << b.grad_bound << ", dist_bound = " << b.dist_bound
          << ", igdds_gap_bound = " << b.igdds_gap_bound << "\n";
    }
  } else {
    out << "r >= r_max: asymptotic bounds unavailable\n";
  }
  return out.str();
}

std::string sanity_report(const ExperimentConfig& config) {
  validate(config);
  return sanity_report(instance_for_trial(config, 0), config);
}

void apply_config_line(ExperimentConfig& config, const std::string& key,
                       const std::string& value) {
  if (key == "n") {
    config.n = static_cast<int>(parse_int(key, value));
  } else if (key == "nodes") {
    config.N = static_cast<int>(parse_int(key, value));
  } else if (key == "gamma-frac") {
    config.gamma_frac = parse_real(key, value);
    config.gamma.reset();
  } else if (key == "gamma") {
    config.gamma = parse_real(key, value);
  } else if (key == "r") {
    config.r = parse_real(key, value);
  } else if (key == "eps") {
    config.epsilons.clear();
    for (const auto& item : split_list(value)) config.epsilons.push_back(parse_real(key, item));
  } else if (key == "algos") {
    config.algorithms.clear();
    for (const auto& item : split_list(value)) config.algorithms.push_back(parse_variant(item));
  } else if (key == "trials") {
    config.trials = parse_int(key, value);
  } else if (key == "iters") {
    config.max_global_iters = parse_int(key, value);
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "error-mode") {
    config.error_mode = parse_error_mode(value);
  } else if (key == "topology") {
    config.topology = value;
  } else if (key == "zeta") {
    config.zeta = parse_real(key, value);
  } else if (key == "out") {
    config.out_dir = value;
  } else if (key == "redraw-instance") {
    config.redraw_instance = parse_bool(key, value);
  } else if (key == "certify") {
    config.certify = parse_bool(key, value);
  } else if (key == "on-violation") {
    if (value == "warn")
      config.fail_on_violation = false;
    else if (value == "fail")
      config.fail_on_violation = true;
    else
      throw std::invalid_argument("on-violation must be 'warn' or 'fail', got: " + value);
  } else if (key == "grad-tol") {
    config.grad_tol = parse_real(key, value);
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

ExperimentConfig load_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    apply_config_line(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

}  // namespace igdsync
