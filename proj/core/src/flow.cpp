#include "rpif/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>

#include "rpif/dop853.hpp"
#include "rpif/errors.hpp"

namespace rpif {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double principal_arg(cplx z) noexcept {
  return std::atan2(z.imag() == 0.0 ? 0.0 : z.imag(), z.real());
}

bool upper_half(cplx z) noexcept { return z.imag() > 0.0 || (z.imag() == 0.0 && z.real() < 0.0); }

/// Shortest oscillation time scale of the problem: the drive period or the
/// period of sqrt(|U~| + |V|), whichever is shorter.
double characteristic_time(const EffectiveFrequencySpec& spec, double window) {
  double scale = std::min(spec.period(), window);
  const double wmax = std::abs(spec.U_tilde) + std::abs(spec.V);
  if (wmax > 0.0) scale = std::min(scale, kTwoPi / std::sqrt(wmax));
  return scale;
}

cplx load(std::span<const double> y, std::size_t i) { return {y[i], y[i + 1]}; }
void store(std::span<double> y, std::size_t i, cplx v) {
  y[i] = v.real();
  y[i + 1] = v.imag();
}

ode::Dop853Options direct_options(double tol, double max_step, std::size_t n_controlled) {
  ode::Dop853Options opt;
  opt.rtol = tol;
  opt.atol = 1e-300;
  opt.max_step = max_step;
  opt.n_controlled = n_controlled;
  return opt;
}

// Symmetric 4x4 index pairs (i <= j) used for the quadratic-moment tables.
constexpr std::array<std::array<int, 2>, 10> kPairs{{{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1},
                                                      {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}}};

/// One-period tables for period stepping, built at the phase of t0.
struct PeriodTables {
  double period = 0.0;
  // Homogeneous one-period propagator acting on (q, q').
  cplx m00{}, m01{}, m10{}, m11{};
  // q-row of the fundamental matrix at intra-period sample points sigma_s, s = 1..S.
  std::vector<std::array<cplx, 2>> d_row;
  // Responses at sigma = P to F = 1 and F = sigma, zero initial data.
  cplx r2q{}, r2v{}, r3q{}, r3v{};
  // Quadratic moments over one period in z = (q, q', F_k, G).
  std::array<std::array<cplx, 4>, 4> qf{}, ql{};
};

PeriodTables build_tables(const EffectiveFrequencySpec& spec, double mass, double t0, int samples,
                          double tol, bool with_forced) {
  PeriodTables tab;
  const double P = spec.period();
  tab.period = P;
  const int ncols = with_forced ? 4 : 2;
  const std::size_t ncontrolled = static_cast<std::size_t>(4 * ncols);
  const std::size_t n = ncontrolled + (with_forced ? 40 : 0);
  const double inv_m = 1.0 / mass;

  auto rhs = [&](double sigma, std::span<const double> y, std::span<double> dy) {
    const cplx w2 = spec.at(t0 + sigma);
    const std::array<double, 4> f{0.0, 0.0, 1.0, sigma};
    std::array<cplx, 4> q{}, v{};
    for (int j = 0; j < ncols; ++j) {
      q[j] = load(y, 4 * j);
      v[j] = load(y, 4 * j + 2);
      store(dy, 4 * j, v[j]);
      store(dy, 4 * j + 2, -w2 * q[j] + f[j] * inv_m);
    }
    if (!with_forced) return;
    for (std::size_t k = 0; k < kPairs.size(); ++k) {
      const int i = kPairs[k][0], j = kPairs[k][1];
      const cplx fq = 0.5 * (f[i] * q[j] + f[j] * q[i]);
      store(dy, 16 + 2 * k, fq);
      store(dy, 36 + 2 * k, 0.5 * mass * v[i] * v[j] - 0.5 * mass * w2 * q[i] * q[j] + fq);
    }
  };

  std::vector<double> y(n, 0.0);
  y[0] = 1.0;  // column 0: q = 1
  y[6] = 1.0;  // column 1: q' = 1

  ode::Dop853 stepper(direct_options(tol, P / 8.0, ncontrolled));
  tab.d_row.resize(static_cast<std::size_t>(samples));
  double sigma = 0.0;
  for (int s = 1; s <= samples; ++s) {
    const double next = (s == samples) ? P : P * static_cast<double>(s) / samples;
    stepper.integrate(rhs, sigma, next, y);
    sigma = next;
    tab.d_row[static_cast<std::size_t>(s - 1)] = {load(y, 0), load(y, 4)};
  }
  tab.m00 = load(y, 0);
  tab.m10 = load(y, 2);
  tab.m01 = load(y, 4);
  tab.m11 = load(y, 6);
  if (with_forced) {
    tab.r2q = load(y, 8);
    tab.r2v = load(y, 10);
    tab.r3q = load(y, 12);
    tab.r3v = load(y, 14);
    for (std::size_t k = 0; k < kPairs.size(); ++k) {
      const int i = kPairs[k][0], j = kPairs[k][1];
      tab.qf[i][j] = tab.qf[j][i] = load(y, 16 + 2 * k);
      tab.ql[i][j] = tab.ql[j][i] = load(y, 36 + 2 * k);
    }
  }
  return tab;
}

std::size_t whole_periods(double t0, double t1, double P) {
  const double k = std::floor((t1 - t0) / P);
  if (k <= 0.0) return 0;
  auto K = static_cast<std::size_t>(k);
  // Guard the last period against rounding past t1.
  while (K > 0 && t0 + static_cast<double>(K) * P > t1) --K;
  return K;
}

/// Times strictly inside (t0, t1) where the forcing slope changes.
std::vector<double> kink_times(const ForcingProfile& force, double t0, double t1) {
  std::vector<double> out;
  if (force.empty()) return out;
  const auto& nodes = force.nodes();
  for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
    const cplx left = nodes[i] - nodes[i - 1];
    const cplx right = nodes[i + 1] - nodes[i];
    if (left == right) continue;
    const double t = force.node_time(i);
    if (t > t0 && t < t1) out.push_back(t);
  }
  return out;
}

struct DenseSink {
  bool enabled = false;
  std::vector<double> grid;
  std::vector<cplx> q, q_dot;
  void push(double t, cplx a, cplx b) {
    if (!enabled) return;
    grid.push_back(t);
    q.push_back(a);
    q_dot.push_back(b);
  }
};

class ForcedIntegrator {
 public:
  ForcedIntegrator(const EffectiveFrequencySpec& spec, double mass, const ForcingProfile& force,
                   const std::vector<double>& kinks, double tol, double max_step)
      : spec_(spec), mass_(mass), force_(force), kinks_(kinks),
        stepper_(direct_options(tol, max_step, 4)) {}

  /// Integrates state from ta to tb, splitting at forcing kinks.
  void run(double ta, double tb, ForcedState& st, DenseSink* dense) {
    std::vector<double> y{st.q.real(), st.q.imag(), st.q_dot.real(), st.q_dot.imag(),
                          st.int_force_q.real(), st.int_force_q.imag(),
                          st.int_lagrangian.real(), st.int_lagrangian.imag()};
    auto rhs = [this](double t, std::span<const double> s, std::span<double> ds) {
      const cplx w2 = spec_.at(t);
      const cplx F = force_.empty() ? cplx{} : force_.at(t);
      const cplx q = load(s, 0), v = load(s, 2);
      store(ds, 0, v);
      store(ds, 2, -w2 * q + F / mass_);
      store(ds, 4, F * q);
      store(ds, 6, 0.5 * mass_ * v * v - 0.5 * mass_ * w2 * q * q + F * q);
    };
    auto observe = [dense](double t, std::span<const double> s) {
      if (dense) dense->push(t, load(s, 0), load(s, 2));
    };
    auto it = std::upper_bound(kinks_.begin(), kinks_.end(), ta);
    double t = ta;
    while (t < tb) {
      const double stop = (it != kinks_.end() && *it < tb) ? *it++ : tb;
      stepper_.integrate(rhs, t, stop, y, observe);
      t = stop;
    }
    st.q = load(y, 0);
    st.q_dot = load(y, 2);
    st.int_force_q = load(y, 4);
    st.int_lagrangian = load(y, 6);
  }

 private:
  const EffectiveFrequencySpec& spec_;
  double mass_;
  const ForcingProfile& force_;
  const std::vector<double>& kinks_;
  ode::Dop853 stepper_;
};

void thin(std::vector<double>& grid, std::vector<cplx>& q, std::vector<cplx>& v, std::size_t max_points) {
  if (grid.size() <= max_points || max_points < 2) return;
  std::vector<double> g;
  std::vector<cplx> a, b;
  g.reserve(max_points);
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < max_points; ++i) {
    const std::size_t k = (i * (n - 1)) / (max_points - 1);
    g.push_back(grid[k]);
    a.push_back(q[k]);
    b.push_back(v[k]);
  }
  grid.swap(g);
  q.swap(a);
  v.swap(b);
}

void check_window(double t0, double t1) {
  if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1)) {
    fail(ErrorCode::InvalidArgument, "flow: window requires finite t1 > t0");
  }
}

}  // namespace

PhaseTracker::PhaseTracker(cplx direction) : prev_(direction) {}

void PhaseTracker::push(cplx z) noexcept {
  if (z == cplx{}) return;
  const cplx w = z * std::conj(prev_);
  if (w.real() > 0.0) {
    // Less than a quarter turn: only a pass across the negative real axis changes the count.
    const bool was_upper = upper_half(prev_);
    const bool is_upper = upper_half(z);
    if (was_upper != is_upper && prev_.real() + z.real() < 0.0) turns_ += was_upper ? 1 : -1;
  } else {
    double delta = principal_arg(w);
    if (delta < 0.5 * std::numbers::pi) delta += kTwoPi;
    const double target = principal_arg(prev_) + kTwoPi * static_cast<double>(turns_) + delta;
    turns_ = std::lround((target - principal_arg(z)) / kTwoPi);
  }
  prev_ = z;
}

double PhaseTracker::unwrapped() const noexcept {
  return principal_arg(prev_) + kTwoPi * static_cast<double>(turns_);
}

bool uses_period_stepping(const EffectiveFrequencySpec& spec, double t0, double t1,
                          const FlowOptions& options) noexcept {
  switch (options.stepping) {
    case Stepping::Direct: return false;
    case Stepping::Periodic: return (t1 - t0) >= spec.period();
    case Stepping::Automatic: break;
  }
  return (t1 - t0) / spec.period() >= options.min_periods_for_stepping;
}

HomogeneousResult propagate_homogeneous(const EffectiveFrequencySpec& spec, double t0, double t1,
                                        const FlowOptions& options, const DSampleObserver& observer) {
  check_window(t0, t1);
  const int S = std::max(options.samples_per_period, 4);
  HomogeneousResult res;
  PhaseTracker tracker;
  auto sample = [&](double t, cplx d) {
    tracker.push(d);
    res.d_max = std::max(res.d_max, std::abs(d));
    ++res.samples;
    if (observer) observer(t, d);
  };

  cplx h0{1.0, 0.0}, h0d{}, h1{}, h1d{1.0, 0.0};
  double t = t0;

  if (uses_period_stepping(spec, t0, t1, options)) {
    const auto tab = build_tables(spec, 1.0, t0, S, options.period_tol, false);
    const double P = tab.period;
    const std::size_t K = whole_periods(t0, t1, P);
    const bool watch = static_cast<bool>(observer);
    for (std::size_t k = 0; k < K; ++k) {
      const double tk = t0 + static_cast<double>(k) * P;
      for (int s = 0; s < S; ++s) {
        const auto& row = tab.d_row[static_cast<std::size_t>(s)];
        const cplx d = row[0] * h1 + row[1] * h1d;
        tracker.push(d);
        const double mag2 = std::norm(d);
        if (mag2 > res.d_max * res.d_max) res.d_max = std::sqrt(mag2);
        if (watch) observer(tk + P * static_cast<double>(s + 1) / S, d);
      }
      res.samples += static_cast<std::size_t>(S);
      const cplx a0 = tab.m00 * h0 + tab.m01 * h0d, b0 = tab.m10 * h0 + tab.m11 * h0d;
      const cplx a1 = tab.m00 * h1 + tab.m01 * h1d, b1 = tab.m10 * h1 + tab.m11 * h1d;
      h0 = a0;
      h0d = b0;
      h1 = a1;
      h1d = b1;
    }
    if (!std::isfinite(std::abs(h0)) || !std::isfinite(std::abs(h1))) {
      fail(ErrorCode::ToleranceNotMet, "homogeneous solution overflowed during period stepping");
    }
    res.periods_stepped = K;
    t = t0 + static_cast<double>(K) * P;
  }

  if (t < t1) {
    const double max_step = characteristic_time(spec, t1 - t0) / S;
    ode::Dop853 stepper(direct_options(options.tol, max_step, 8));
    std::vector<double> y{h0.real(), h0.imag(), h0d.real(), h0d.imag(),
                          h1.real(), h1.imag(), h1d.real(), h1d.imag()};
    auto rhs = [&spec](double tt, std::span<const double> s, std::span<double> ds) {
      const cplx w2 = spec.at(tt);
      store(ds, 0, load(s, 2));
      store(ds, 2, -w2 * load(s, 0));
      store(ds, 4, load(s, 6));
      store(ds, 6, -w2 * load(s, 4));
    };
    stepper.integrate(rhs, t, t1, y, [&](double tt, std::span<const double> s) { sample(tt, load(s, 4)); });
    h0 = load(y, 0);
    h0d = load(y, 2);
    h1 = load(y, 4);
    h1d = load(y, 6);
  }
  if (!std::isfinite(std::abs(h0)) || !std::isfinite(std::abs(h1)) || !std::isfinite(std::abs(h1d))) {
    fail(ErrorCode::ToleranceNotMet, "homogeneous solution is not finite at the window end");
  }
  res.h0 = h0;
  res.h0_dot = h0d;
  res.h1 = h1;
  res.h1_dot = h1d;
  res.d_arg = tracker.unwrapped();
  res.d_turns = tracker.turns();
  return res;
}

ForcedResult propagate_forced(const EffectiveFrequencySpec& spec, double mass, const ForcingProfile& force,
                              double t0, double t1, cplx q0, cplx v0, const FlowOptions& options,
                              bool dense) {
  check_window(t0, t1);
  if (!(mass > 0.0)) fail(ErrorCode::InvalidArgument, "flow: mass must be positive");
  ForcedResult res;
  ForcedState st{q0, v0, {}, {}};
  DenseSink sink;
  sink.enabled = dense;
  sink.push(t0, q0, v0);

  const auto kinks = kink_times(force, t0, t1);
  const int S = std::max(options.samples_per_period, 4);
  const double max_step = characteristic_time(spec, t1 - t0) / S;
  ForcedIntegrator direct(spec, mass, force, kinks, options.tol, max_step);
  double t = t0;

  const bool trivial = q0 == cplx{} && v0 == cplx{} && (force.empty() || force.identically_zero());
  if (trivial) {
    sink.push(t1, {}, {});
    res.end = st;
    res.grid = std::move(sink.grid);
    res.q = std::move(sink.q);
    res.q_dot = std::move(sink.q_dot);
    return res;
  }

  if (uses_period_stepping(spec, t0, t1, options)) {
    const auto tab = build_tables(spec, mass, t0, S, options.period_tol, true);
    const double P = tab.period;
    const std::size_t K = whole_periods(t0, t1, P);
    const std::size_t stride =
        dense ? std::max<std::size_t>(1, K / std::max<std::size_t>(options.max_dense_points, 2)) : 0;
    auto next_kink = kinks.begin();
    const double edge = 1e-9 * P;
    const bool has_force = !force.empty();
    for (std::size_t k = 0; k < K; ++k) {
      const double tk = t0 + static_cast<double>(k) * P;
      const double tk1 = tk + P;
      while (next_kink != kinks.end() && *next_kink <= tk + edge) ++next_kink;
      if (next_kink != kinks.end() && *next_kink < tk1 - edge) {
        direct.run(tk, tk1, st, nullptr);
      } else {
        const cplx F = has_force ? force.at(tk) : cplx{};
        const cplx G = has_force ? force.slope_at(tk + 0.5 * P) : cplx{};
        const std::array<cplx, 4> z{st.q, st.q_dot, F, G};
        cplx jf{}, jl{};
        for (int i = 0; i < 4; ++i) {
          cplx rf{}, rl{};
          for (int j = 0; j < 4; ++j) {
            rf += tab.qf[i][j] * z[j];
            rl += tab.ql[i][j] * z[j];
          }
          jf += z[i] * rf;
          jl += z[i] * rl;
        }
        st.int_force_q += jf;
        st.int_lagrangian += jl;
        const cplx q = tab.m00 * st.q + tab.m01 * st.q_dot + F * tab.r2q + G * tab.r3q;
        const cplx v = tab.m10 * st.q + tab.m11 * st.q_dot + F * tab.r2v + G * tab.r3v;
        st.q = q;
        st.q_dot = v;
      }
      if (dense && (k + 1) % stride == 0) sink.push(tk1, st.q, st.q_dot);
    }
    res.periods_stepped = K;
    t = t0 + static_cast<double>(K) * P;
  }

  if (t < t1) direct.run(t, t1, st, dense ? &sink : nullptr);
  if (!std::isfinite(std::abs(st.q)) || !std::isfinite(std::abs(st.q_dot)) ||
      !std::isfinite(std::abs(st.int_lagrangian))) {
    fail(ErrorCode::ToleranceNotMet, "forced trajectory is not finite at the window end");
  }
  if (dense && (sink.grid.empty() || sink.grid.back() != t1)) sink.push(t1, st.q, st.q_dot);
  res.end = st;
  if (dense) {
    thin(sink.grid, sink.q, sink.q_dot, options.max_dense_points);
    res.grid = std::move(sink.grid);
    res.q = std::move(sink.q);
    res.q_dot = std::move(sink.q_dot);
  }
  return res;
}

}  // namespace rpif
