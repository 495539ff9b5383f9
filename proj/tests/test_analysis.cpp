#include <doctest.h>

#include <cmath>

#include "igdsync/analysis.hpp"
#include "igdsync/rng.hpp"

using namespace igdsync;
using Eigen::VectorXd;

namespace {

struct Fixture {
  Problem problem;
  Topology topo;
  AlgoConfig config;
  ErrorModel model;
  RunTrace trace;
};

Fixture alg1_fixture(double eps, std::uint64_t seed, long iters = 200) {
  Fixture f;
  f.problem = random_instance(6, 3, seed);
  f.topo = build_complete(3);
  f.config.gamma = 0.5 / f.problem.L;
  f.config.variant = Variant::alg1;
  f.config.r =
      0.5 * std::sqrt(f.problem.ell) / (std::sqrt(f.problem.L) + std::sqrt(f.problem.ell));
  f.config.epsilon = eps;
  f.config.max_global_iters = iters;
  f.model = ErrorModel{ErrorMode::ball, eps, seed + 1};
  f.trace = run(f.problem, f.topo, f.config, f.model,
                KeyedRng({seed, 2}).gaussian_vector(6), 0);
  return f;
}

}  // namespace

TEST_CASE("contraction constants on hand-checked inputs") {
  const auto c0 = contraction_q(0.25, 4.0, 2.0, 0.0);
  CHECK(c0.q == doctest::Approx(0.5));
  CHECK(c0.r_bar == 0.0);
  CHECK(c0.contractive);

  const auto c1 = contraction_q(0.25, 4.0, 2.0, 0.03);
  CHECK(c1.r_bar == doctest::Approx(0.0309278).epsilon(1e-5));
  CHECK(c1.q == doctest::Approx(0.5009565).epsilon(1e-6));
  CHECK(c1.r_max == doctest::Approx(0.4142136).epsilon(1e-6));

  CHECK_THROWS_AS(contraction_q(0.0, 4.0, 2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(contraction_q(0.3, 4.0, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("q increases in r and approaches 1 at r_max") {
  const double L = 4.0, ell = 2.0, gamma = 0.25;
  const double r_max = std::sqrt(ell) / (std::sqrt(L) + std::sqrt(ell));
  double prev = contraction_q(gamma, L, ell, 0.0).q;
  for (int i = 1; i <= 100; ++i) {
    const double r = r_max * i / 101.0;
    const double q = contraction_q(gamma, L, ell, r).q;
    CHECK(q > prev);
    CHECK(q < 1.0);
    prev = q;
  }
  CHECK(contraction_q(gamma, L, ell, r_max * (1.0 - 1e-9)).q == doctest::Approx(1.0));
  CHECK_FALSE(contraction_q(gamma, L, ell, r_max * 1.01).contractive);
}

TEST_CASE("asymptotic bounds on hand-checked inputs") {
  const auto zero = asymptotic_bounds(0.0, std::nullopt, 2, 4.0, 2.0, 0.03);
  CHECK(zero.gap_bound == 0.0);
  CHECK(zero.grad_bound == 0.0);
  CHECK(zero.dist_bound == 0.0);

  const auto b = asymptotic_bounds(0.1, std::nullopt, 2, 4.0, 2.0, 0.03);
  CHECK(b.gap_bound == doctest::Approx(0.0100192).epsilon(1e-5));
  CHECK(b.igdds_gap_bound == doctest::Approx(0.01));

  CHECK(asymptotic_bounds(0.1, 5.0, 2, 4.0, 2.0, 0.03).tau == 5.0);
  CHECK_THROWS_AS(asymptotic_bounds(0.1, std::nullopt, 2, 4.0, 2.0, 0.9),
                  std::invalid_argument);
}

TEST_CASE("bound algebra holds over random parameter draws") {
  KeyedRng rng({314});
  for (int t = 0; t < 1000; ++t) {
    const double ell = 0.1 + 5.0 * rng.uniform(4 * t);
    const double L = ell * (1.0 + 10.0 * rng.uniform(4 * t + 1));
    const double r_max = std::sqrt(ell) / (std::sqrt(L) + std::sqrt(ell));
    const double r = r_max * rng.uniform(4 * t + 2);
    const double eps = 10.0 * rng.uniform(4 * t + 3);
    const int N = 2 + t % 6;
    const auto b = asymptotic_bounds(eps, std::nullopt, N, L, ell, r);
    CHECK(b.grad_bound * b.grad_bound ==
          doctest::Approx(2.0 * L * b.gap_bound).epsilon(1e-12));
    CHECK(b.dist_bound * b.dist_bound ==
          doctest::Approx(2.0 * L * b.gap_bound / ell).epsilon(1e-12));
    CHECK(b.gap_bound >= b.igdds_gap_bound);
  }
}

TEST_CASE("the r = 0 gap bound equals the per-iteration-sync bound exactly") {
  const auto b = asymptotic_bounds(0.37, std::nullopt, 5, 11.0, 3.0, 0.0);
  CHECK(b.gap_bound == b.igdds_gap_bound);
  // And it grows strictly with r.
  double prev = b.gap_bound;
  const double r_max = std::sqrt(3.0) / (std::sqrt(11.0) + std::sqrt(3.0));
  for (int i = 1; i < 20; ++i) {
    const double g = asymptotic_bounds(0.37, std::nullopt, 5, 11.0, 3.0, r_max * i / 21.0)
                         .gap_bound;
    CHECK(g > prev);
    prev = g;
  }
}

TEST_CASE("drift bound formula") {
  CHECK(drift_bound(0.0, 4, 10) == 0.0);
  CHECK(drift_bound(0.1, 2, 0) == doctest::Approx(0.2));
  CHECK(drift_bound(0.1, 2, 3) == doctest::Approx(1.4));
}

TEST_CASE("an error-free run certifies clean") {
  auto f = alg1_fixture(0.0, 400);
  // eps = 0, r > 0 never triggers; also certify a true gd run.
  auto rep = certify_trace(f.trace, f.problem, f.config);
  CHECK(rep.clean());

  AlgoConfig gd;
  gd.gamma = 0.5 / f.problem.L;
  gd.variant = Variant::gd;
  gd.max_global_iters = 200;
  ErrorModel none{ErrorMode::none, 0.0, 0};
  const auto trace = run(f.problem, f.topo, gd, none, KeyedRng({21}).gaussian_vector(6), 0);
  const auto rep2 = certify_trace(trace, f.problem, gd);
  CHECK(rep2.clean());
  CHECK(rep2.checked.at("drift") == 200 * 3);
}

TEST_CASE("noisy triggered runs certify clean across eps levels") {
  for (double eps : {0.1, 1.0}) {
    const auto f = alg1_fixture(eps, 500 + static_cast<std::uint64_t>(eps * 10), 400);
    const auto rep = certify_trace(f.trace, f.problem, f.config);
    CHECK_MESSAGE(rep.clean(), "eps = " << eps << "\n" << rep.summary());
    CHECK(rep.checked.at("drift") > 0);
    CHECK(rep.trigger_skips <= rep.steps_total * 3 / 1000);
  }
}

TEST_CASE("an inflated measurement deviation is flagged at exactly that step") {
  auto f = alg1_fixture(0.1, 600);
  auto rep = certify_trace(f.trace, f.problem, f.config);
  REQUIRE(rep.clean());

  RunTrace broken = f.trace;
  // Pick a step outside any continuing loop so only the drift
  // certificate can react to the inflated deviation.
  size_t victim = broken.steps.size();
  for (size_t i = 0; i < broken.steps.size(); ++i)
    if (!broken.steps[i].cond_held) victim = i;
  REQUIRE(victim < broken.steps.size());
  broken.steps[victim].dev_norm[1] =
      drift_bound(0.1, 3, broken.steps[victim].k) * 1.5 + 1.0;
  rep = certify_trace(broken, f.problem, f.config);
  REQUIRE(rep.violations.size() >= 1);
  long drift_flags = 0;
  for (const auto& v : rep.violations) {
    CHECK(v.certificate == "drift");
    CHECK(v.iter == broken.steps[victim].global);
    CHECK(v.node == 1);
    ++drift_flags;
  }
  CHECK(drift_flags == 1);
}

TEST_CASE("a broken contraction step is flagged under the lemma1 certificate") {
  auto f = alg1_fixture(0.1, 700, 300);
  // Find a step where the continue-condition held.
  size_t victim = f.trace.steps.size();
  for (size_t i = 0; i < f.trace.steps.size(); ++i)
    if (f.trace.steps[i].cond_held) victim = i;
  REQUIRE(victim < f.trace.steps.size());
  RunTrace broken = f.trace;
  broken.steps[victim].f_gap_post[0] = broken.steps[victim].f_gap_pre[0] * 2.0 + 1.0;
  const auto rep = certify_trace(broken, f.problem, f.config);
  bool found = false;
  for (const auto& v : rep.violations)
    if (v.certificate == "lemma1" && v.iter == broken.steps[victim].global && v.node == 0)
      found = true;
  CHECK(found);
}

TEST_CASE("violations are reported only beyond the stated tolerance") {
  auto f = alg1_fixture(0.1, 800);
  RunTrace nudged = f.trace;
  size_t victim = nudged.steps.size();
  for (size_t i = 0; i < nudged.steps.size(); ++i)
    if (!nudged.steps[i].cond_held) victim = i;
  REQUIRE(victim < nudged.steps.size());
  const double bound = drift_bound(0.1, 3, nudged.steps[victim].k);
  nudged.steps[victim].dev_norm[0] = bound * (1.0 + 5e-10);  // inside the 1e-9 slack
  CHECK(certify_trace(nudged, f.problem, f.config).clean());
  nudged.steps[victim].dev_norm[0] = bound * (1.0 + 1e-6);  // beyond it
  CHECK_FALSE(certify_trace(nudged, f.problem, f.config).clean());
}

TEST_CASE("reports serialize to a summary and violation CSV") {
  auto f = alg1_fixture(0.1, 900, 120);
  auto rep = certify_trace(f.trace, f.problem, f.config);
  rep.violations.push_back({"drift", 4, 17, 2, 3.5, 1.25});
  const std::string text = rep.summary();
  CHECK(text.find("drift") != std::string::npos);
  std::ostringstream csv;
  rep.violations_csv(csv);
  CHECK(csv.str().find("certificate,trial,iter,node,measured,bound") == 0);
  CHECK(csv.str().find("drift,4,17,2,3.5,1.25") != std::string::npos);
}
