#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../support.hpp"
#include "rpif/errors.hpp"
#include "rpif/mathieu.hpp"

using namespace rpif;

namespace {

DimensionlessParams barium_params() {
  const auto t = rpif::testing::barium_trap();
  return dimensionless(
      effective_frequency(derive_frequency_coefficients(t, Axis::X), rpif::testing::barium_measurement(), t));
}

DimensionlessParams make(cplx p, double q) { return {p, q, q != 0.0 ? (p - 1.0 - q) / q : cplx(std::nan(""))}; }

}  // namespace

TEST_SUITE("mathieu") {
  TEST_CASE("coefficient identities") {
    const auto on_curve = mathieu_series(make(1.0 + 0.37, 0.37), 4);
    CHECK(std::abs(on_curve.c[0] - 1.0) == 0.0);
    CHECK(std::abs(on_curve.c[1]) < 1e-15);
    CHECK(std::abs(on_curve.c[2] + 1.0) < 1e-13);
    const auto p25 = mathieu_series(make(25.0, 0.8), 4);
    CHECK(std::abs(p25.c[3]) == 0.0);
    const auto d = barium_params();
    const auto s = mathieu_series(d, 2);
    CHECK(s.terms() == 2);
    CHECK(std::abs(s.c[1] - d.alpha) < 1e-15);
    CHECK(s.c[1].real() == doctest::Approx(-2.62).epsilon(0.004));
  }

  TEST_CASE("coefficients against the printed formulas") {
    const cplx p{0.4, -0.2};
    const double q = 0.7;
    const auto s = mathieu_series(make(p, q), 4);
    const cplx b = (p - 9.0) * (p - 1.0 - q) - q * q;
    CHECK(std::abs(s.c[2] - b / (q * q)) < 1e-14);
    CHECK(std::abs(s.c[3] - (p - 25.0) * b / (q * q * q)) < 1e-12);
  }

  TEST_CASE("argument errors") {
    CHECK_THROWS_AS(mathieu_series(make(0.5, 0.0), 2), Error);
    try {
      mathieu_series(make(0.5, 0.2), 5);
      FAIL("expected OutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OutOfRange);
    }
    CHECK_THROWS_AS(mathieu_series(make(0.5, 0.2), 0), Error);
    CHECK_THROWS_AS(integrate_mathieu_ode(make(0.5, 0.2), {1.0, 1.0}, 1.0, 0.0), Error);
  }

  TEST_CASE("evaluate f at special points") {
    const auto d = barium_params();
    const auto s = mathieu_series(d, 2);
    CHECK(std::abs(evaluate_f(s, 0.0) - (1.0 + d.alpha)) < 1e-15);
    CHECK(std::abs(evaluate_f(s, std::numbers::pi / 2)) < 1e-15);
    const cplx quarter = (1.0 - d.alpha) / std::sqrt(2.0);
    CHECK(std::abs(evaluate_f(s, std::numbers::pi / 4) - quarter) < 1e-14);
    CHECK(quarter.real() == doctest::Approx(2.56).epsilon(0.002));
    CHECK(quarter.imag() == doctest::Approx(1.99e-11).epsilon(0.002));
    CHECK(std::abs(evaluate_f_derivative(s, 0.0)) == 0.0);
    CHECK(std::abs(evaluate_f_derivative(s, std::numbers::pi / 2) - (-1.0 + 3.0 * d.alpha)) < 1e-14);
  }

  TEST_CASE("derivatives agree with central differences") {
    const auto s = mathieu_series(make({0.3, -0.1}, 0.45), 4);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    const double h = 1e-6;
    for (int i = 0; i < 10; ++i) {
      const double t = u(rng);
      const cplx fd = (evaluate_f(s, t + h) - evaluate_f(s, t - h)) / (2.0 * h);
      CHECK(rpif::testing::rel(evaluate_f_derivative(s, t), fd) < 1e-8);
      const cplx fdd = (evaluate_f_derivative(s, t + h) - evaluate_f_derivative(s, t - h)) / (2.0 * h);
      CHECK(rpif::testing::rel(evaluate_f_second_derivative(s, t), fdd) < 1e-8);
    }
  }

  TEST_CASE("residual harmonics equal the directly evaluated residual") {
    const auto d = barium_params();
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto s = mathieu_series(d, n);
      for (double t : {0.0, 0.2, 0.9, 1.7, 2.8}) {
        const cplx direct = evaluate_f_second_derivative(s, t) + (d.p - 2.0 * d.q * std::cos(2.0 * t)) * evaluate_f(s, t);
        CHECK(std::abs(series_residual(s, t) - direct) <= 1e-12 * (1.0 + std::abs(direct)));
      }
    }
  }

  TEST_CASE("truncation cancels all but the top two harmonics") {
    const auto d = make({0.2, -0.01}, 0.02);
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto s = mathieu_series(d, n);
      const auto h = series_residual_harmonics(s);
      double scale = 0.0;
      for (const auto& c : s.c) scale = std::max(scale, std::abs(c) * (std::abs(d.p) + 49.0 + 2.0 * d.q));
      const std::size_t exact = n == 4 ? 3 : 2 * n - 3;
      for (std::size_t j = 0; j + 1 <= exact + 1 && n > 1; ++j) CHECK(std::abs(h[j]) <= 1e-13 * scale);
      // the fourth coefficient omits the c3 coupling, which survives at cos(5t)
      if (n == 4) CHECK(std::abs(h[5] + d.q * s.c[1]) <= 1e-13 * scale);
      REQUIRE(h.size() >= 2 * n + 2);
      CHECK(std::abs(h[2 * n + 1]) > 0.0);
    }
  }

  TEST_CASE("ode: constant coefficient and free limits") {
    const double p = 0.7;
    const auto cos_sol = integrate_mathieu_ode(make(p, 0.0), {0.0, 6.0}, 1.0, 0.0, {1e-12, {}});
    for (std::size_t i = 0; i < cos_sol.grid.size(); ++i) {
      CHECK(std::abs(cos_sol.psi[i] - std::cos(std::sqrt(p) * cos_sol.grid[i])) < 1e-10);
    }
    const cplx a{0.3, -1.0}, b{2.0, 0.5};
    const auto free = integrate_mathieu_ode(make(0.0, 0.0), {0.0, 4.0}, a, b, {1e-12, {1.0, 2.5, 4.0}});
    REQUIRE(free.grid.size() == 4);
    for (std::size_t i = 0; i < free.grid.size(); ++i) CHECK(std::abs(free.psi[i] - (a + b * free.grid[i])) < 1e-12);
  }

  TEST_CASE("ode: Wronskian conservation and linearity") {
    const auto d = make({0.11, -0.05}, 0.55);
    const double tol = 1e-12;
    const std::vector<double> pts{0.5, 1.0, 2.0, 3.0, 5.0};
    const auto s1 = integrate_mathieu_ode(d, {0.0, 5.0}, 1.0, 0.0, {tol, pts});
    const auto s2 = integrate_mathieu_ode(d, {0.0, 5.0}, 0.0, 1.0, {tol, pts});
    const cplx w0 = s1.psi[0] * s2.psi_dot[0] - s2.psi[0] * s1.psi_dot[0];
    for (std::size_t i = 1; i < s1.grid.size(); ++i) {
      const cplx w = s1.psi[i] * s2.psi_dot[i] - s2.psi[i] * s1.psi_dot[i];
      CHECK(std::abs(w - w0) <= 10.0 * tol * std::abs(w0) * 100.0);
    }
    const cplx lambda{-1.5, 0.25};
    const auto s3 = integrate_mathieu_ode(d, {0.0, 5.0}, lambda, 0.0, {tol, pts});
    for (std::size_t i = 0; i < s1.grid.size(); ++i) CHECK(rpif::testing::rel(s3.psi[i], lambda * s1.psi[i]) < 1e-10);
  }

  TEST_CASE("four-term series against the ode with matched initial data") {
    const auto d = barium_params();
    const auto s = mathieu_series(d, 4);
    const double bound = series_residual_max(s, 0.0, std::numbers::pi);
    std::vector<double> pts;
    for (int i = 1; i <= 50; ++i) pts.push_back(0.01 * i);
    const auto sol = integrate_mathieu_ode(d, {0.0, 0.5}, evaluate_f(s, 0.0), evaluate_f_derivative(s, 0.0), {1e-12, pts});
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
      CHECK(std::abs(sol.psi[i] - evaluate_f(s, sol.grid[i])) <= 2.0 * bound);
    }
  }
}
