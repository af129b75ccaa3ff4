#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "alohar/numerics.hpp"

using namespace alohar;

namespace {
const double kPi = std::acos(-1.0);
}

TEST_CASE("finite quadrature reproduces elementary integrals") {
  CHECK(num::integrate_finite([](double x) { return std::exp(-x); }, 0.0, 5.0) ==
        doctest::Approx(1.0 - std::exp(-5.0)).epsilon(1e-10));
  CHECK(std::abs(num::integrate_finite([](double x) { return std::sin(x); }, -kPi, kPi)) <=
        1e-10);
  CHECK(num::integrate_finite([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
  CHECK_THROWS_AS(num::integrate_finite([](double) { return 1.0; }, 1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("quadrature is linear in the integrand") {
  const double alpha = 2.375;
  auto f = [](double x) { return std::exp(-x); };
  auto g = [](double x) { return std::cos(x); };
  const double lhs = num::integrate_finite([&](double x) { return alpha * f(x) + g(x); }, 0.0, 4.0);
  const double rhs = alpha * num::integrate_finite(f, 0.0, 4.0) +
                     num::integrate_finite(g, 0.0, 4.0);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("semi-infinite quadrature handles power-law and exponential tails") {
  CHECK(num::integrate_semi_infinite([](double u) { return std::exp(-u); }, 0.0) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(num::integrate_semi_infinite([](double u) { return 1.0 / (1.0 + u * u); }, 0.0) ==
        doctest::Approx(kPi / 2.0).epsilon(1e-9));
  CHECK(num::integrate_semi_infinite([](double u) { return u / (1.0 + u * u * u * u); }, 0.0) ==
        doctest::Approx(kPi / 4.0).epsilon(1e-9));
  CHECK(num::integrate_semi_infinite([](double u) { return 1.0 / (u * u * u * u); }, 10.0) ==
        doctest::Approx(1.0 / 3000.0).epsilon(1e-9));
}

TEST_CASE("interference shape integral matches its closed form across exponents") {
  // integral over [0, inf) of du/(u^beta + 1) = (pi/beta)/sin(pi/beta)
  for (double beta : {2.5, 3.0, 4.0, 6.0}) {
    const double quad = num::integrate_semi_infinite(
        [beta](double u) { return 1.0 / (std::pow(u, beta) + 1.0); }, 0.0,
        num::Tolerance{1e-10, 1e-14, 2000});
    const double closed = kPi / (beta * std::sin(kPi / beta));
    CHECK(std::abs(quad - closed) <= 1e-8 * closed);
  }
}

TEST_CASE("non-integrable tails surface as a quadrature error") {
  CHECK_THROWS_AS(num::integrate_semi_infinite([](double u) { return 1.0 / (1.0 + u); }, 0.0),
                  num::QuadratureError);
}

TEST_CASE("nested 2d quadrature integrates a separable density to one") {
  const double v = num::integrate_2d_nested(
      [](double s, double t) { return std::exp(-s - t); }, num::Tolerance{1e-9, 1e-12, 2000});
  CHECK(v == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("two-sided lattice sum reaches the quartic zeta value") {
  // sum over n != 0 of 1/n^4 = pi^4/45
  const double target = std::pow(kPi, 4) / 45.0;
  const num::LatticeSum plain =
      num::lattice_log_sum([](long n) { return 1.0 / std::pow(static_cast<double>(n), 4); });
  CHECK(plain.value == doctest::Approx(target).epsilon(1e-9));
  CHECK(plain.truncation >= 8);
  const num::LatticeSum hinted = num::lattice_log_sum(
      [](long n) { return 1.0 / std::pow(static_cast<double>(n), 4); }, {}, 4.0);
  CHECK(hinted.value == doctest::Approx(target).epsilon(1e-9));
}

TEST_CASE("lattice sum rejects non-decaying terms") {
  CHECK_THROWS_AS(num::lattice_log_sum([](long) { return 1.0; }), num::QuadratureError);
}

TEST_CASE("bisection and golden section land on known optima") {
  const double root = num::find_root([](double x) { return x * x - 2.0; }, {0.0, 2.0});
  CHECK(root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK_THROWS_AS(num::find_root([](double x) { return x * x + 1.0; }, {0.0, 2.0}),
                  std::invalid_argument);

  const num::Peak peak = num::maximize_unimodal(
      [](double x) { return -(x - kPi / 4.0) * (x - kPi / 4.0); }, {0.0, 2.0});
  CHECK(peak.argmax == doctest::Approx(kPi / 4.0).epsilon(1e-8));
  CHECK(std::abs(peak.max) <= 1e-12);
}

TEST_CASE("tolerance validation rejects nonsense") {
  CHECK_THROWS_AS(num::integrate_finite([](double) { return 1.0; }, 0.0, 1.0,
                                        num::Tolerance{-1.0, 1e-12, 2000}),
                  std::invalid_argument);
  CHECK_THROWS_AS(num::integrate_finite([](double) { return 1.0; }, 0.0, 1.0,
                                        num::Tolerance{1e-8, 1e-12, 0}),
                  std::invalid_argument);
}
