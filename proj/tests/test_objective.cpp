#include <doctest.h>

#include <cmath>
#include <sstream>

#include "igdsync/objective.hpp"
#include "igdsync/rng.hpp"

using namespace igdsync;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd scalar_mat(double a) { return MatrixXd::Constant(1, 1, a); }
VectorXd scalar_vec(double c) { return VectorXd::Constant(1, c); }

Problem two_component_toy() {
  // f1(x) = x^2, f2(x) = x^2 + 2x; f = 2x^2 + 2x, x* = -1/2, f* = -1/2.
  return problem_summary(
      {make_component(scalar_mat(1.0), scalar_vec(0.0)),
       make_component(scalar_mat(1.0), scalar_vec(2.0))});
}

}  // namespace

TEST_CASE("component value and gradient on hand-checked points") {
  const auto comp = make_component(scalar_mat(1.0), scalar_vec(2.0));

  auto [v0, g0] = component_calculus(make_component(scalar_mat(1.0), scalar_vec(0.0)),
                                     scalar_vec(0.0));
  CHECK(v0 == 0.0);
  CHECK(g0[0] == 0.0);

  auto [v1, g1] = component_calculus(comp, scalar_vec(1.0));
  CHECK(v1 == doctest::Approx(3.0));
  CHECK(g1[0] == doctest::Approx(4.0));

  auto [v2, g2] = component_calculus(comp, scalar_vec(-0.5));
  CHECK(v2 == doctest::Approx(-0.75));
  CHECK(g2[0] == doctest::Approx(1.0));
}

TEST_CASE("component rejects dimension mismatch") {
  const auto comp = make_component(scalar_mat(1.0), scalar_vec(0.0));
  CHECK_THROWS_AS(component_calculus(comp, VectorXd::Zero(2)), std::invalid_argument);
}

TEST_CASE("convexity constants from eigenvalues") {
  auto [l1, L1] = component_constants(MatrixXd::Identity(2, 2));
  CHECK(l1 == doctest::Approx(2.0));
  CHECK(L1 == doctest::Approx(2.0));

  MatrixXd d(2, 2);
  d << 1, 0, 0, 3;
  auto [l2, L2] = component_constants(d);
  CHECK(l2 == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(L2 == doctest::Approx(6.0).epsilon(1e-9));

  auto [l3, L3] = component_constants(scalar_mat(1.0));
  CHECK(l3 == doctest::Approx(2.0));
  CHECK(L3 == doctest::Approx(2.0));
}

TEST_CASE("constants reject bad matrices") {
  MatrixXd asym(2, 2);
  asym << 1, 1, 0, 1;
  CHECK_THROWS_AS(component_constants(asym), std::invalid_argument);
  MatrixXd indef(2, 2);
  indef << 1, 0, 0, -1;
  CHECK_THROWS_AS(component_constants(indef), std::invalid_argument);
}

TEST_CASE("problem summary on hand-solved instances") {
  const auto sym = problem_summary({make_component(scalar_mat(1.0), scalar_vec(0.0)),
                                    make_component(scalar_mat(1.0), scalar_vec(0.0))});
  CHECK(sym.x_star[0] == doctest::Approx(0.0));
  CHECK(sym.f_star == doctest::Approx(0.0));
  CHECK(sym.L == doctest::Approx(4.0));
  CHECK(sym.ell == doctest::Approx(2.0));

  const auto toy = two_component_toy();
  CHECK(toy.x_star[0] == doctest::Approx(-0.5));
  CHECK(toy.f_star == doctest::Approx(-0.5));
  CHECK(toy.L == doctest::Approx(4.0));
  CHECK(toy.ell == doctest::Approx(2.0));

  const auto single = problem_summary({make_component(scalar_mat(1.0), scalar_vec(0.0))});
  CHECK(single.x_star[0] == doctest::Approx(0.0));
  CHECK(single.f_star == doctest::Approx(0.0));
}

TEST_CASE("random instances are deterministic, PD, and well-posed") {
  const auto p1 = random_instance(10, 4, 123);
  const auto p2 = random_instance(10, 4, 123);
  CHECK(p1.n == 10);
  CHECK(p1.N == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(p1.components[i].A == p2.components[i].A);
    CHECK(p1.components[i].c == p2.components[i].c);
    CHECK(p1.components[i].ell_i > 0.0);
  }
  CHECK(p1.x_star == p2.x_star);
  CHECK(random_instance(10, 4, 124).x_star != p1.x_star);

  // Stationarity of the solved optimum.
  CHECK(p1.gradient(p1.x_star).norm() <= 1e-9 * std::max(1.0, p1.c_sum.norm()));

  // f* is a lower bound at random probes.
  KeyedRng rng({77});
  for (int t = 0; t < 100; ++t) {
    const VectorXd x = p1.x_star + rng.gaussian_vector(10, 10 * t);
    CHECK(p1.value(x) >= p1.f_star);
  }
}

TEST_CASE("gradient matches central finite differences") {
  const auto p = random_instance(6, 3, 5);
  KeyedRng rng({11});
  const double h = 1e-5;
  for (int t = 0; t < 100; ++t) {
    const auto& comp = p.components[t % 3];
    const VectorXd x = rng.gaussian_vector(6, 20 * t);
    VectorXd dir = rng.gaussian_vector(6, 20 * t + 10);
    dir.normalize();
    auto [v, g] = component_calculus(comp, x);
    const double fd = (comp.value(x + h * dir) - comp.value(x - h * dir)) / (2.0 * h);
    const double dd = g.dot(dir);
    CHECK(fd == doctest::Approx(dd).epsilon(1e-5));
  }
}

TEST_CASE("strong convexity and smoothness hold with the computed constants") {
  const auto p = random_instance(6, 3, 9);
  KeyedRng rng({13});
  for (int t = 0; t < 100; ++t) {
    const auto& comp = p.components[t % 3];
    const VectorXd x = rng.gaussian_vector(6, 30 * t);
    const VectorXd y = rng.gaussian_vector(6, 30 * t + 15);
    auto [fx, gx] = component_calculus(comp, x);
    auto [fy, gy] = component_calculus(comp, y);
    const double lower = fx + gx.dot(y - x) + 0.5 * comp.ell_i * (y - x).squaredNorm();
    CHECK(fy >= lower - 1e-9 * std::max(1.0, std::abs(lower)));
    CHECK((gx - gy).norm() <= comp.L_i * (x - y).norm() * (1.0 + 1e-9));
  }
}

TEST_CASE("optimum is a strict minimum under small perturbations") {
  const auto p = random_instance(8, 4, 21);
  KeyedRng rng({17});
  for (int t = 0; t < 100; ++t) {
    VectorXd d = rng.gaussian_vector(8, 8 * t);
    d *= 1e-3 / d.norm();
    CHECK(p.value(p.x_star + d) > p.f_star);
  }
}

TEST_CASE("problem snapshot round-trips bitwise") {
  const auto p = random_instance(5, 3, 31);
  std::stringstream ss;
  save_problem(ss, p);
  const auto q = load_problem(ss);
  CHECK(q.n == p.n);
  CHECK(q.N == p.N);
  for (int i = 0; i < 3; ++i) {
    CHECK(q.components[i].A == p.components[i].A);
    CHECK(q.components[i].c == p.components[i].c);
  }
  CHECK(q.L == p.L);
  CHECK(q.ell == p.ell);
}
