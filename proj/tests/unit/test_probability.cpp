#include <doctest.h>

#include <cmath>
#include <limits>

#include "../support.hpp"
#include "rpif/errors.hpp"
#include "rpif/probability.hpp"

using namespace rpif;

TEST_SUITE("probability") {
  TEST_CASE("modulus only") {
    CHECK(probability_from_amplitude(cplx(1.25, 0.0)).log_p == 2.5);
    CHECK(probability_from_amplitude(cplx(1.25, 123.4)).log_p == 2.5);
    PropagatorResult r;
    r.log_amplitude = {-3.0, 7.0};
    CHECK(probability_from_amplitude(r).log_p == -6.0);
  }

  TEST_CASE("joint law") {
    CHECK(joint_probability({std::log(0.5)}, {std::log(0.5)}).log_p == doctest::Approx(std::log(0.25)));
    CHECK(joint_probability({-4.2}, {0.0}).log_p == -4.2);
  }

  TEST_CASE("axis checks") {
    const auto trap = rpif::testing::unit_trap(0.3, 0.8, 2.5, 0.2);
    const MeasurementConfig meas{0.0, 2.0, 0.4};
    const auto px = rpif::testing::make_problem(trap, Axis::X, meas, ConstantRecord{0.1}, 0.0, 0.0);
    const auto pz = rpif::testing::make_problem(trap, Axis::Z, meas, ConstantRecord{0.1}, 0.0, 0.0);
    CHECK(std::isfinite(probability_x(px).log_p));
    CHECK(std::isfinite(probability_z(pz).log_p));
    CHECK_THROWS_AS(probability_x(pz), Error);
    CHECK_THROWS_AS(probability_z(px), Error);
  }

  TEST_CASE("ranking") {
    const auto single = rank_records({{-2.0}});
    REQUIRE(single.size() == 1);
    CHECK(single[0].log_odds == 0.0);
    const auto r = rank_records({{-3.0}, {-1.0}, {-3.0}, {-1.0}});
    REQUIRE(r.size() == 4);
    CHECK(r[0].id == 1);
    CHECK(r[1].id == 3);
    CHECK(r[2].id == 0);
    CHECK(r[3].id == 2);
    CHECK(r[1].log_odds == 0.0);
    CHECK(r[3].log_odds == -2.0);
  }

  TEST_CASE("switched-off measurement: record independence") {
    const auto trap = rpif::testing::unit_trap(0.3, 0.8, 2.5, 0.2);
    const MeasurementConfig off{0.0, 3.0, std::numeric_limits<double>::infinity()};
    const double base = probability_x(rpif::testing::make_problem(trap, Axis::X, off, ConstantRecord{0.0}, 0.1, 0.3)).log_p;
    for (const RecordSpec& rec : std::vector<RecordSpec>{ConstantRecord{1.0}, SinusoidRecord{0.5, 2.0, 0.3},
                                                        SampledRecord{{0.1, -0.4, 0.9, 0.0}}}) {
      const double lp = probability_x(rpif::testing::make_problem(trap, Axis::X, off, rec, 0.1, 0.3)).log_p;
      CHECK(std::abs(lp - base) <= 1e-8 * std::abs(base));
    }
  }

  TEST_CASE("record term scales quadratically") {
    const MeasurementConfig meas{0.0, 3.0, 0.4};
    const auto rec = render(SinusoidRecord{0.3, 1.1, 0.0}, meas, 101);
    for (double lambda : {0.5, 2.0, 7.0}) {
      CHECK(record_term(rec.scaled(lambda), meas) == doctest::Approx(lambda * lambda * record_term(rec, meas)).epsilon(1e-13));
    }
  }

  TEST_CASE("parallel ranking matches serial") {
    const auto trap = rpif::testing::unit_trap(0.3, 0.8, 2.5, 0.2);
    const MeasurementConfig meas{0.0, 4.0, 0.4};
    const AxisPropagator ap(trap, Axis::X, meas, {0.0, 0.0, 0.0, 4.0});
    std::vector<MeasurementRecord> recs;
    for (int i = 0; i < 9; ++i) recs.push_back(render(ConstantRecord{0.05 * (i % 4)}, meas, 17));
    const auto serial = rank_records(ap, recs, 1);
    const auto parallel = rank_records(ap, recs, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(serial[i].id == parallel[i].id);
      CHECK(serial[i].log_p == parallel[i].log_p);
    }
    CHECK(serial[0].id == 0);
    CHECK(serial[1].id == 4);
    CHECK(serial[2].id == 8);
  }

  TEST_CASE("trap scenario: larger constant offsets are less likely") {
    const auto trap = rpif::testing::barium_trap();
    const auto meas = rpif::testing::barium_measurement();
    const AxisPropagator ap(trap, Axis::X, meas, {0.0, 0.0, 0.0, 30.0});
    std::vector<MeasurementRecord> recs;
    for (double a : {0.0, 2e-6, 4e-6}) recs.push_back(render(ConstantRecord{a}, meas, 65));
    const auto ranked = rank_records(ap, recs, 3);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].id == 0);
    CHECK(ranked[1].id == 1);
    CHECK(ranked[2].id == 2);
    CHECK(ranked[0].log_p > ranked[1].log_p);
    CHECK(ranked[1].log_p > ranked[2].log_p);
  }
}
