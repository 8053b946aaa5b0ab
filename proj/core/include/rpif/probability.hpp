#pragma once

#include <cstddef>
#include <vector>

#include "rpif/propagator.hpp"

namespace rpif {

/// Natural log of an unnormalized probability density over records.
struct LogProbability {
  double log_p = 0.0;
};

/// |U|^2 in log form: 2 Re(log U). The phase never enters.
LogProbability probability_from_amplitude(cplx log_amplitude) noexcept;
LogProbability probability_from_amplitude(const PropagatorResult& result) noexcept;

/// Throws InvalidArgument unless problem.axis is X (resp. Z).
LogProbability probability_x(const AxisProblem& problem, const PropagatorOptions& options = {});
LogProbability probability_z(const AxisProblem& problem, const PropagatorOptions& options = {});

LogProbability joint_probability(LogProbability px, LogProbability pz) noexcept;

struct RankedRecord {
  std::size_t id = 0;
  double log_p = 0.0;
  /// log_p minus the best log_p (<= 0).
  double log_odds = 0.0;
};

/// Sorts descending by log_p; ties keep input order.
std::vector<RankedRecord> rank_records(const std::vector<LogProbability>& log_ps);

/// Evaluates every record on a shared axis propagator (threads > 1 runs in
/// parallel; the result does not depend on the thread count) and ranks them.
std::vector<RankedRecord> rank_records(const AxisPropagator& axis, const std::vector<MeasurementRecord>& records,
                                       unsigned threads = 1);

/// Applies fn(i) for i in [0, n) on up to `threads` worker threads.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn);

}  // namespace rpif

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace rpif {

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1U, threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rpif
