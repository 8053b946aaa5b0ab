#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "../support.hpp"
#include "rpif/errors.hpp"
#include "rpif/oracle.hpp"

using namespace rpif;
using std::numbers::pi;

namespace {

const cplx I{0.0, 1.0};
constexpr double kInf = std::numeric_limits<double>::infinity();

AxisProblem unmeasured_problem(double U, double T, double x0, double x1, double hbar) {
  const auto trap = rpif::testing::unit_trap(U, 0.0, 1.0, hbar);
  return rpif::testing::make_problem(trap, Axis::X, {0.0, T, kInf}, ConstantRecord{0.0}, x0, x1, 2);
}

cplx harmonic_log_amplitude(double w, double T, double x0, double x1, double hbar) {
  const double s = std::sin(w * T);
  return 0.5 * std::log(cplx(w / (2.0 * pi * hbar * s), 0.0)) - I * pi / 4.0 +
         I * w / (2.0 * hbar * s) * ((x0 * x0 + x1 * x1) * std::cos(w * T) - 2.0 * x0 * x1);
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("lattice") {
    const SlicedLattice l(1.0, 3.0, 8);
    CHECK(l.epsilon == 0.25);
    CHECK(l.endpoint(8) == 3.0);
    CHECK(l.midpoint(0) == 1.125);
    CHECK_THROWS_AS(SlicedLattice(0.0, 1.0, 1), Error);
    CHECK_THROWS_AS(SlicedLattice(1.0, 1.0, 4), Error);
  }

  TEST_CASE("free particle is exact for every N") {
    const double T = 1.3, x0 = 0.2, x1 = -0.5, hbar = 0.4;
    const cplx exact = 0.5 * std::log(cplx(1.0 / (2.0 * pi * hbar * T), 0.0)) - I * pi / 4.0 +
                       I * (x1 - x0) * (x1 - x0) / (2.0 * hbar * T);
    const auto p = unmeasured_problem(0.0, T, x0, x1, hbar);
    for (std::size_t n : {2, 16, 256}) {
      CHECK(std::abs(discrete_propagator(p, n) - exact) <= 1e-12 * std::abs(exact));
    }
  }

  TEST_CASE("harmonic convergence is second order") {
    const double w = 1.2, T = 2.0, x0 = 0.3, x1 = 0.8, hbar = 1.0;
    const auto p = unmeasured_problem(w * w, T, x0, x1, hbar);
    const cplx exact = harmonic_log_amplitude(w, T, x0, x1, hbar);
    std::vector<double> err;
    for (std::size_t n : {256, 512, 1024, 2048}) err.push_back(std::abs(discrete_propagator(p, n) - exact));
    for (std::size_t i = 1; i < err.size(); ++i) {
      const double slope = std::log2(err[i - 1] / err[i]);
      CHECK(slope >= 1.8);
      CHECK(slope <= 2.2);
    }
    const cplx v1 = discrete_propagator(p, 1024), v2 = discrete_propagator(p, 2048);
    const auto r = richardson(v1, v2);
    CHECK(std::abs(r.value - exact) < std::abs(v2 - exact));
    CHECK(std::abs(r.value - exact) < std::abs(v1 - exact));
  }

  TEST_CASE("left-endpoint sampling converges at first order") {
    const double w = 1.2, T = 2.0;
    const auto trap = rpif::testing::unit_trap(w * w, 0.3, 2.0, 1.0);
    const auto p = rpif::testing::make_problem(trap, Axis::X, {0.0, T, 0.8}, SinusoidRecord{0.2, 1.0, 0.0}, 0.3, 0.8, 65);
    OracleOptions left;
    left.sampling = SliceSampling::LeftEndpoint;
    const cplx ref = richardson(discrete_propagator(p, 4096), discrete_propagator(p, 8192)).value;
    const double e1 = std::abs(discrete_propagator(p, 512, left) - ref);
    const double e2 = std::abs(discrete_propagator(p, 1024, left) - ref);
    CHECK(std::log2(e1 / e2) == doctest::Approx(1.0).epsilon(0.2));
  }

  TEST_CASE("richardson") {
    const cplx c{1.5, -2.0};
    const auto same = richardson(c, c);
    CHECK(same.value == c);
    CHECK(same.error == 0.0);
    const cplx k{0.3, 0.7};
    const double eps = 0.01;
    const auto r = richardson(c + k * eps * eps, c + k * eps * eps / 4.0);
    CHECK(std::abs(r.value - c) < 1e-15);
    const auto sheet = richardson(c, c + 2.0 * pi * I);
    CHECK(std::abs(sheet.value.real() - c.real()) < 1e-12);
    CHECK(std::abs(std::remainder(sheet.value.imag() - c.imag(), 2.0 * pi)) < 1e-12);
    CHECK(sheet.error < 1e-12);
  }

  TEST_CASE("discrete caustic") {
    const auto p = unmeasured_problem(2.0, 2.0, 0.1, 0.2, 1.0);
    try {
      discrete_propagator(p, 2);
      FAIL("expected SingularSlice");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularSlice);
    }
  }

  TEST_CASE("measured problem agrees with the continuum propagator") {
    const auto trap = rpif::testing::unit_trap(0.6, 1.1, 3.0, 0.3);
    const MeasurementConfig meas{0.0, 2.5, 0.7};
    for (Axis axis : {Axis::X, Axis::Z}) {
      const auto p = rpif::testing::make_problem(trap, axis, meas, SinusoidRecord{0.2, 0.9, 0.4}, 0.1, -0.3, 33);
      const auto r = richardson(discrete_propagator(p, 1024), discrete_propagator(p, 2048));
      const cplx c = restricted_propagator(p).log_amplitude;
      CHECK(std::abs(r.value.real() - c.real()) < 1e-5);
      CHECK(std::abs(std::remainder(r.value.imag() - c.imag(), 2.0 * pi)) < 1e-5);
    }
  }
}
