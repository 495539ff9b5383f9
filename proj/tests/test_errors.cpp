#include <doctest.h>

#include <cmath>

#include "igdsync/errors.hpp"
#include "igdsync/rng.hpp"

using namespace igdsync;
using Eigen::VectorXd;

TEST_CASE("mode names parse") {
  CHECK(parse_error_mode("none") == ErrorMode::none);
  CHECK(parse_error_mode("ball") == ErrorMode::ball);
  CHECK(parse_error_mode("sphere") == ErrorMode::sphere);
  CHECK(parse_error_mode("shared") == ErrorMode::shared_per_source);
  CHECK(parse_error_mode("quant") == ErrorMode::quantizer);
  CHECK_THROWS_AS(parse_error_mode("uniform"), std::invalid_argument);
}

TEST_CASE("zero bound gives the zero vector in every mode") {
  for (ErrorMode mode : {ErrorMode::none, ErrorMode::ball, ErrorMode::sphere,
                         ErrorMode::shared_per_source}) {
    ErrorModel m{mode, 0.0, 42};
    CHECK(draw_error(m, 0, 1, 5, 3, 4).isZero(0.0));
  }
}

TEST_CASE("ball draws stay inside the bound") {
  ErrorModel m{ErrorMode::ball, 0.1, 7};
  for (long k = 0; k < 1000; ++k) CHECK(draw_error(m, 0, 1, k, 0, 10).norm() <= 0.1 + 1e-12);
}

TEST_CASE("sphere draws sit on the bound") {
  ErrorModel m{ErrorMode::sphere, 0.5, 7};
  for (long k = 0; k < 200; ++k)
    CHECK(draw_error(m, 1, 2, k, 0, 6).norm() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("shared mode is receiver-independent, ball mode is not") {
  ErrorModel shared{ErrorMode::shared_per_source, 0.2, 11};
  CHECK(draw_error(shared, 1, 3, 5, 0, 8) == draw_error(shared, 2, 3, 5, 0, 8));

  ErrorModel ball{ErrorMode::ball, 0.2, 11};
  CHECK(draw_error(ball, 1, 3, 5, 0, 8) != draw_error(ball, 2, 3, 5, 0, 8));
}

TEST_CASE("draws are keyed deterministically and vary with k") {
  ErrorModel m{ErrorMode::ball, 1.0, 3};
  CHECK(draw_error(m, 0, 1, 7, 2, 5) == draw_error(m, 0, 1, 7, 2, 5));
  CHECK(draw_error(m, 0, 1, 7, 2, 5) != draw_error(m, 0, 1, 8, 2, 5));
  CHECK(draw_error(m, 0, 1, 7, 2, 5) != draw_error(m, 0, 1, 7, 3, 5));
}

TEST_CASE("bound invariant over many keys in every random mode") {
  for (ErrorMode mode : {ErrorMode::ball, ErrorMode::sphere, ErrorMode::shared_per_source}) {
    ErrorModel m{mode, 0.3, 19};
    for (int t = 0; t < 10000; ++t)
      CHECK(draw_error(m, t % 3, 3 + t % 4, t / 7, t % 11, 6).norm() <= 0.3 + 1e-12);
  }
}

TEST_CASE("quantizer rounds to the grid, ties away from zero") {
  // n=1: delta = 2*0.1/1 = 0.2.
  CHECK(quantize(VectorXd::Constant(1, 0.2), 0.1)[0] == doctest::Approx(0.2));
  CHECK(quantize(VectorXd::Constant(1, 0.25), 0.1)[0] == doctest::Approx(0.2));
  // n=1, eps=0.5: delta = 1, so ties are exactly representable.
  CHECK(quantize(VectorXd::Constant(1, 1.5), 0.5)[0] == doctest::Approx(2.0));
  CHECK(quantize(VectorXd::Constant(1, -1.5), 0.5)[0] == doctest::Approx(-2.0));
  CHECK((quantize(VectorXd::Constant(1, 0.25), 0.1) - VectorXd::Constant(1, 0.25)).norm() <= 0.1);
  CHECK_THROWS_AS(quantize(VectorXd::Constant(1, 0.25), 0.0), std::invalid_argument);
}

TEST_CASE("quantizer error norm stays within the bound") {
  KeyedRng rng({101});
  for (int t = 0; t < 1000; ++t) {
    const VectorXd v = 10.0 * rng.gaussian_vector(10, 10 * t);
    CHECK((quantize(v, 1.0) - v).norm() <= 1.0 + 1e-12);
  }
}

TEST_CASE("quantizer mode returns the residual of the measured vector") {
  ErrorModel m{ErrorMode::quantizer, 0.5, 0};
  KeyedRng rng({55});
  const VectorXd g = rng.gaussian_vector(4, 0);
  const VectorXd e = draw_error(m, 0, 1, 0, 0, 4, &g);
  CHECK((g + e) == quantize(g, 0.5));
  CHECK(e.norm() <= 0.5 + 1e-12);
}
