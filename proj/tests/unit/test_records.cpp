#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "../support.hpp"
#include "rpif/errors.hpp"
#include "rpif/records.hpp"

using namespace rpif;

TEST_SUITE("records") {
  const MeasurementConfig meas{0.0, 30.0, 2e-6};

  TEST_CASE("render") {
    const auto zero = render(ConstantRecord{0.0}, meas, 5);
    for (double v : zero.samples()) CHECK(v == 0.0);
    const auto sine = render(SinusoidRecord{1.5e-6, 0.2, 0.0}, meas, 11);
    CHECK(sine.samples().front() == 1.5e-6);
    CHECK(sine.t_end() == doctest::Approx(30.0).epsilon(1e-15));
    const std::vector<double> vals{1.0, -2.0, 3.5, 0.25};
    const auto sampled = render(SampledRecord{vals}, meas, 1000);
    CHECK(sampled.samples() == vals);
    CHECK_THROWS_AS(render(ConstantRecord{1.0}, meas, 1), Error);
    CHECK_THROWS_AS(MeasurementRecord(0.0, 0.0, {1.0, 2.0}), Error);
    CHECK_THROWS_AS(MeasurementRecord(0.0, 1.0, {1.0, std::nan("")}), Error);
  }

  TEST_CASE("record norm integral") {
    const double A = 1.3e-6;
    CHECK(record_norm_integral(render(ConstantRecord{A}, meas, 7)) == doctest::Approx(A * A * 30.0).epsilon(1e-15));
    CHECK(record_norm_integral(render(ConstantRecord{0.0}, meas, 7)) == 0.0);
    const double Om = 2.0 * std::numbers::pi * 3.0 / 30.0;
    const auto s = render(SinusoidRecord{A, Om, 0.0}, meas, 10000);
    CHECK(record_norm_integral(s) == doctest::Approx(A * A * 30.0 / 2.0).epsilon(1e-6));
  }

  TEST_CASE("norm integral scales quadratically and refines at second order") {
    const auto rec = render(SinusoidRecord{1e-6, 0.7, 0.3}, meas, 101);
    CHECK(record_norm_integral(rec.scaled(3.0)) == doctest::Approx(9.0 * record_norm_integral(rec)).epsilon(1e-14));
    const double exact = [] {
      // int_0^30 cos^2(0.7 t + 0.3) dt
      const double T = 30.0, w = 0.7, ph = 0.3;
      return 1e-12 * (T / 2.0 + (std::sin(2.0 * (w * T + ph)) - std::sin(2.0 * ph)) / (4.0 * w));
    }();
    const double e1 = std::abs(record_norm_integral(render(SinusoidRecord{1e-6, 0.7, 0.3}, meas, 201)) - exact);
    const double e2 = std::abs(record_norm_integral(render(SinusoidRecord{1e-6, 0.7, 0.3}, meas, 401)) - exact);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  }

  TEST_CASE("record term") {
    const auto rec = render(ConstantRecord{1e-6}, meas, 3);
    CHECK(record_term(rec, meas) == doctest::Approx(-2.0 / (30.0 * 4e-12) * 1e-12 * 30.0).epsilon(1e-14));
    MeasurementConfig off = meas;
    off.resolution = std::numeric_limits<double>::infinity();
    CHECK(record_term(rec, off) == 0.0);
  }

  TEST_CASE("forcing") {
    const auto t = rpif::testing::barium_trap();
    const auto zero = forcing(render(ConstantRecord{0.0}, meas, 4), meas, t);
    CHECK(zero.identically_zero());
    const auto f = forcing(render(ConstantRecord{1e-6}, meas, 4), meas, t);
    const double expected = 4.0 * 1.054571817e-34 * 1e-6 / (30.0 * 4e-12);
    CHECK(f.at(12.0).real() == 0.0);
    CHECK(f.at(12.0).imag() == doctest::Approx(-expected).epsilon(1e-14));
    CHECK(std::abs(f.at(5.0)) == doctest::Approx(3.51e-30).epsilon(1e-3));

    const auto a = render(SinusoidRecord{1e-6, 0.4, 0.1}, meas, 31);
    const auto b = render(ConstantRecord{0.5e-6}, meas, 31);
    std::vector<double> sum(a.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = a.samples()[i] + b.samples()[i];
    const auto fs = forcing(MeasurementRecord(0.0, a.dt(), sum), meas, t);
    const auto fa = forcing(a, meas, t), fb = forcing(b, meas, t);
    for (double tt : {0.0, 0.37, 11.1, 29.99, 30.0}) {
      CHECK(std::abs(fs.at(tt) - fa.at(tt) - fb.at(tt)) <= 1e-15 * std::abs(fs.at(tt)));
    }
    CHECK_THROWS_AS(render(ConstantRecord{1.0}, {0.0, 10.0, 1e-6}, 3).check_window(meas), Error);
  }

  TEST_CASE("piecewise-linear interpolation and slopes") {
    const MeasurementRecord rec(1.0, 0.5, {0.0, 1.0, 3.0});
    CHECK(rec.value_at(1.25) == doctest::Approx(0.5));
    CHECK(rec.value_at(1.75) == doctest::Approx(2.0));
    CHECK(rec.value_at(-4.0) == 0.0);
    CHECK(rec.value_at(9.0) == 3.0);
    const ForcingProfile fp(1.0, 0.5, {cplx(0.0), cplx(1.0), cplx(3.0)});
    CHECK(fp.slope_at(1.1).real() == doctest::Approx(2.0));
    CHECK(fp.slope_at(1.6).real() == doctest::Approx(4.0));
  }

  TEST_CASE("csv round trip") {
    const auto rec = render(SinusoidRecord{2e-6, 0.3, 1.0}, meas, 17);
    std::stringstream ss;
    write_record_csv(ss, rec);
    CHECK(ss.str().rfind("time_s,value_m\n", 0) == 0);
    const auto back = read_record_csv(ss);
    CHECK(back.samples() == rec.samples());
    CHECK(back.dt() == doctest::Approx(rec.dt()).epsilon(1e-15));
    std::stringstream bad("time_s,value_m\n0,1\n1,2\n3,3\n");
    CHECK_THROWS_AS(read_record_csv(bad), Error);
    std::stringstream noheader("0,1\n1,2\n");
    CHECK_THROWS_AS(read_record_csv(noheader), Error);
  }
}
