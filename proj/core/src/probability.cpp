#include "rpif/probability.hpp"

#include <algorithm>
#include <numeric>

#include "rpif/errors.hpp"

namespace rpif {

LogProbability probability_from_amplitude(cplx log_amplitude) noexcept { return {2.0 * log_amplitude.real()}; }

LogProbability probability_from_amplitude(const PropagatorResult& result) noexcept {
  return probability_from_amplitude(result.log_amplitude);
}

LogProbability probability_x(const AxisProblem& problem, const PropagatorOptions& options) {
  if (problem.axis != Axis::X) fail(ErrorCode::InvalidArgument, "probability_x needs an x-axis problem");
  return probability_from_amplitude(restricted_propagator(problem, options));
}

LogProbability probability_z(const AxisProblem& problem, const PropagatorOptions& options) {
  if (problem.axis != Axis::Z) fail(ErrorCode::InvalidArgument, "probability_z needs a z-axis problem");
  return probability_from_amplitude(restricted_propagator(problem, options));
}

LogProbability joint_probability(LogProbability px, LogProbability pz) noexcept { return {px.log_p + pz.log_p}; }

std::vector<RankedRecord> rank_records(const std::vector<LogProbability>& log_ps) {
  std::vector<RankedRecord> out(log_ps.size());
  for (std::size_t i = 0; i < log_ps.size(); ++i) out[i] = {i, log_ps[i].log_p, 0.0};
  std::stable_sort(out.begin(), out.end(), [](const RankedRecord& a, const RankedRecord& b) { return a.log_p > b.log_p; });
  if (!out.empty()) {
    const double best = out.front().log_p;
    for (auto& r : out) r.log_odds = r.log_p - best;
  }
  return out;
}

std::vector<RankedRecord> rank_records(const AxisPropagator& axis, const std::vector<MeasurementRecord>& records,
                                       unsigned threads) {
  std::vector<LogProbability> lp(records.size());
  parallel_for(records.size(), threads,
               [&](std::size_t i) { lp[i] = probability_from_amplitude(axis.evaluate(records[i])); });
  return rank_records(lp);
}

}  // namespace rpif
