#pragma once

// Adaptive explicit Runge-Kutta integrator of order 8 with embedded 5th and
// 3rd order error estimators (Dormand-Prince 8(5,3), after Hairer & Wanner's
// DOP853). Step control follows the original Fortran code; dense output is not
// provided, callers integrate piecewise between the points they need.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rpif/errors.hpp"

namespace rpif::ode {

struct Dop853Options {
  double rtol = 1e-10;
  /// Absolute floor added to every component scale.
  double atol = 1e-300;
  /// Only the first n components enter the error norm (0 = all). Trailing
  /// components are quadratures carried along with the solution.
  std::size_t n_controlled = 0;
  /// Treat components (2k, 2k+1) as the real and imaginary parts of one complex
  /// value and scale both by its modulus.
  bool complex_pairs = true;
  /// Include the running maximum magnitude of each component in its scale, so
  /// zero crossings of oscillatory components do not force tiny steps.
  bool running_max_scale = true;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;
  std::size_t max_steps = 50'000'000;
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

namespace dop853_tableau {
inline constexpr double c2 = 0.526001519587677318785587544488e-01;
inline constexpr double c3 = 0.789002279381515978178381316732e-01;
inline constexpr double c4 = 0.118350341907227396726757197510e+00;
inline constexpr double c5 = 0.281649658092772603273242802490e+00;
inline constexpr double c6 = 0.333333333333333333333333333333e+00;
inline constexpr double c7 = 0.25e+00;
inline constexpr double c8 = 0.307692307692307692307692307692e+00;
inline constexpr double c9 = 0.651282051282051282051282051282e+00;
inline constexpr double c10 = 0.6e+00;
inline constexpr double c11 = 0.857142857142857142857142857142e+00;

inline constexpr double a21 = 5.26001519587677318785587544488e-2;
inline constexpr double a31 = 1.97250569845378994544595329183e-2;
inline constexpr double a32 = 5.91751709536136983633785987549e-2;
inline constexpr double a41 = 2.95875854768068491816892993775e-2;
inline constexpr double a43 = 8.87627564304205475450678981324e-2;
inline constexpr double a51 = 2.41365134159266685502369798665e-1;
inline constexpr double a53 = -8.84549479328286085344864962717e-1;
inline constexpr double a54 = 9.24834003261792003115737966543e-1;
inline constexpr double a61 = 3.7037037037037037037037037037e-2;
inline constexpr double a64 = 1.70828608729473871279604482173e-1;
inline constexpr double a65 = 1.25467687566822425016691814123e-1;
inline constexpr double a71 = 3.7109375e-2;
inline constexpr double a74 = 1.70252211019544039314978060272e-1;
inline constexpr double a75 = 6.02165389804559606850219397283e-2;
inline constexpr double a76 = -1.7578125e-2;
inline constexpr double a81 = 3.70920001185047927108779319836e-2;
inline constexpr double a84 = 1.70383925712239993810214054705e-1;
inline constexpr double a85 = 1.07262030446373284651809199168e-1;
inline constexpr double a86 = -1.53194377486244017527936158236e-2;
inline constexpr double a87 = 8.27378916381402288758473766002e-3;
inline constexpr double a91 = 6.24110958716075717114429577812e-1;
inline constexpr double a94 = -3.36089262944694129406857109825e0;
inline constexpr double a95 = -8.68219346841726006818189891453e-1;
inline constexpr double a96 = 2.75920996994467083049415600797e1;
inline constexpr double a97 = 2.01540675504778934086186788979e1;
inline constexpr double a98 = -4.34898841810699588477366255144e1;
inline constexpr double a101 = 4.77662536438264365890433908527e-1;
inline constexpr double a104 = -2.48811461997166764192642586468e0;
inline constexpr double a105 = -5.90290826836842996371446475743e-1;
inline constexpr double a106 = 2.12300514481811942347288949897e1;
inline constexpr double a107 = 1.52792336328824235832596922938e1;
inline constexpr double a108 = -3.32882109689848629194453265587e1;
inline constexpr double a109 = -2.03312017085086261358222928593e-2;
inline constexpr double a111 = -9.3714243008598732571704021658e-1;
inline constexpr double a114 = 5.18637242884406370830023853209e0;
inline constexpr double a115 = 1.09143734899672957818500254654e0;
inline constexpr double a116 = -8.14978701074692612513997267357e0;
inline constexpr double a117 = -1.85200656599969598641566180701e1;
inline constexpr double a118 = 2.27394870993505042818970056734e1;
inline constexpr double a119 = 2.49360555267965238987089396762e0;
inline constexpr double a1110 = -3.0467644718982195003823669022e0;
inline constexpr double a121 = 2.27331014751653820792359768449e0;
inline constexpr double a124 = -1.05344954667372501984066689879e1;
inline constexpr double a125 = -2.00087205822486249909675718444e0;
inline constexpr double a126 = -1.79589318631187989172765950534e1;
inline constexpr double a127 = 2.79488845294199600508499808837e1;
inline constexpr double a128 = -2.85899827713502369474065508674e0;
inline constexpr double a129 = -8.87285693353062954433549289258e0;
inline constexpr double a1210 = 1.23605671757943030647266201528e1;
inline constexpr double a1211 = 6.43392746015763530355970484046e-1;

inline constexpr double b1 = 5.42937341165687622380535766363e-2;
inline constexpr double b6 = 4.45031289275240888144113950566e0;
inline constexpr double b7 = 1.89151789931450038304281599044e0;
inline constexpr double b8 = -5.8012039600105847814672114227e0;
inline constexpr double b9 = 3.1116436695781989440891606237e-1;
inline constexpr double b10 = -1.52160949662516078556178806805e-1;
inline constexpr double b11 = 2.01365400804030348374776537501e-1;
inline constexpr double b12 = 4.47106157277725905176885569043e-2;

inline constexpr double bhh1 = 0.244094488188976377952755905512e+00;
inline constexpr double bhh2 = 0.733846688281611857341361741547e+00;
inline constexpr double bhh3 = 0.220588235294117647058823529412e-01;

inline constexpr double er1 = 0.1312004499419488073250102996e-01;
inline constexpr double er6 = -0.1225156446376204440720569753e+01;
inline constexpr double er7 = -0.4957589496572501915214079952e+00;
inline constexpr double er8 = 0.1664377182454986536961530415e+01;
inline constexpr double er9 = -0.3503288487499736816886487290e+00;
inline constexpr double er10 = 0.3341791187130174790297318841e+00;
inline constexpr double er11 = 0.8192320648511571246570742613e-01;
inline constexpr double er12 = -0.2235530786388629525884427845e-01;
}  // namespace dop853_tableau

/// Reusable DOP853 stepper. `System` is callable as
/// `void(double t, std::span<const double> y, std::span<double> dydt)`.
/// `Observer` is called after every accepted step as `void(double t, std::span<const double> y)`.
class Dop853 {
 public:
  explicit Dop853(Dop853Options options = {}) : opt_(options) {}

  const Dop853Options& options() const noexcept { return opt_; }
  const StepStats& stats() const noexcept { return stats_; }

  /// Integrates y from t0 to t1 (t1 > t0 or t1 < t0), landing exactly on t1.
  /// The last accepted step size is retained as the guess for the next call.
  template <class System, class Observer>
  void integrate(System&& f, double t0, double t1, std::vector<double>& y, Observer&& observe);

  template <class System>
  void integrate(System&& f, double t0, double t1, std::vector<double>& y) {
    integrate(f, t0, t1, y, [](double, std::span<const double>) {});
  }

  /// Forget the step-size guess carried over from the previous call.
  void reset_step() noexcept { h_guess_ = 0.0; }

 private:
  void resize(std::size_t n);
  void update_running_max(const std::vector<double>& y);
  double scale(std::size_t i, const std::vector<double>& y_old, const std::vector<double>& y_new) const;
  std::size_t controlled(std::size_t n) const {
    return opt_.n_controlled == 0 ? n : std::min(opt_.n_controlled, n);
  }

  Dop853Options opt_;
  StepStats stats_;
  double h_guess_ = 0.0;
  std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, k8_, k9_, k10_, yw_, runmax_;
};

inline void Dop853::resize(std::size_t n) {
  for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &k8_, &k9_, &k10_, &yw_}) v->assign(n, 0.0);
  runmax_.assign(n, 0.0);
}

inline void Dop853::update_running_max(const std::vector<double>& y) {
  if (!opt_.running_max_scale) return;
  const std::size_t n = controlled(y.size());
  if (opt_.complex_pairs) {
    for (std::size_t i = 0; i + 1 < n; i += 2) {
      const double m = std::hypot(y[i], y[i + 1]);
      runmax_[i] = std::max(runmax_[i], m);
      runmax_[i + 1] = runmax_[i];
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) runmax_[i] = std::max(runmax_[i], std::abs(y[i]));
  }
}

inline double Dop853::scale(std::size_t i, const std::vector<double>& y_old,
                            const std::vector<double>& y_new) const {
  double mag;
  if (opt_.complex_pairs && (i ^ 1U) < y_old.size()) {
    const std::size_t j = i & ~std::size_t{1};
    mag = std::max(std::hypot(y_old[j], y_old[j + 1]), std::hypot(y_new[j], y_new[j + 1]));
  } else {
    mag = std::max(std::abs(y_old[i]), std::abs(y_new[i]));
  }
  if (opt_.running_max_scale) mag = std::max(mag, runmax_[i]);
  return opt_.atol + opt_.rtol * mag;
}

template <class System, class Observer>
void Dop853::integrate(System&& f, double t0, double t1, std::vector<double>& y, Observer&& observe) {
  using namespace dop853_tableau;
  const std::size_t n = y.size();
  if (t1 == t0) return;
  if (k1_.size() != n) resize(n);
  std::fill(runmax_.begin(), runmax_.end(), 0.0);
  update_running_max(y);

  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span_len = std::abs(t1 - t0);
  const std::size_t nc = controlled(n);
  auto eval = [&](double t, const std::vector<double>& state, std::vector<double>& out) {
    f(t, std::span<const double>(state), std::span<double>(out));
    ++stats_.evaluations;
  };

  eval(t0, y, k1_);

  double h = h_guess_;
  if (opt_.initial_step > 0.0) h = opt_.initial_step;
  if (!(h > 0.0)) {
    // Hairer's starting step heuristic for an order-8 method.
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < nc; ++i) {
      const double sk = scale(i, y, y);
      d0 += (y[i] / sk) * (y[i] / sk);
      d1 += (k1_[i] / sk) * (k1_[i] / sk);
    }
    double h0 = (d0 <= 1e-10 || d1 <= 1e-10) ? 1e-6 * span_len : 0.01 * std::sqrt(d0 / d1);
    h0 = std::min(h0, opt_.max_step);
    for (std::size_t i = 0; i < n; ++i) yw_[i] = y[i] + dir * h0 * k1_[i];
    eval(t0 + dir * h0, yw_, k2_);
    double d2 = 0.0;
    for (std::size_t i = 0; i < nc; ++i) {
      const double sk = scale(i, y, y);
      d2 += ((k2_[i] - k1_[i]) / sk) * ((k2_[i] - k1_[i]) / sk);
    }
    d2 = std::sqrt(d2) / h0;
    const double dm = std::max(std::sqrt(d1), d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 8.0);
    h = std::min({100.0 * h0, h1});
    if (!(h > 0.0) || !std::isfinite(h)) h = 1e-6 * span_len;
  }
  h = std::min({h, opt_.max_step, span_len});

  double t = t0;
  bool last_rejected = false;
  const double uround = std::numeric_limits<double>::epsilon();
  std::size_t steps = 0;

  while (true) {
    if (++steps > opt_.max_steps) {
      fail(ErrorCode::ToleranceNotMet, "DOP853: maximum number of steps exceeded");
    }
    bool last = false;
    if ((t + dir * h - t1) * dir >= 0.0 || std::abs(t1 - t - dir * h) < 1e-12 * span_len) {
      h = std::abs(t1 - t);
      last = true;
    }
    if (h <= 10.0 * uround * std::max(std::abs(t), span_len) && !last) {
      fail(ErrorCode::ToleranceNotMet, "DOP853: step size underflow near t = " + std::to_string(t));
    }
    const double hs = dir * h;

    for (std::size_t i = 0; i < n; ++i) yw_[i] = y[i] + hs * a21 * k1_[i];
    eval(t + c2 * hs, yw_, k2_);
    for (std::size_t i = 0; i < n; ++i) yw_[i] = y[i] + hs * (a31 * k1_[i] + a32 * k2_[i]);
    eval(t + c3 * hs, yw_, k3_);
    for (std::size_t i = 0; i < n; ++i) yw_[i] = y[i] + hs * (a41 * k1_[i] + a43 * k3_[i]);
    eval(t + c4 * hs, yw_, k4_);
    for (std::size_t i = 0; i < n; ++i) yw_[i] = y[i] + hs * (a51 * k1_[i] + a53 * k3_[i] + a54 * k4_[i]);
    eval(t + c5 * hs, yw_, k5_);
    for (std::size_t i = 0; i < n; ++i) yw_[i] = y[i] + hs * (a61 * k1_[i] + a64 * k4_[i] + a65 * k5_[i]);
    eval(t + c6 * hs, yw_, k6_);
    for (std::size_t i = 0; i < n; ++i)
      yw_[i] = y[i] + hs * (a71 * k1_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
    eval(t + c7 * hs, yw_, k7_);
    for (std::size_t i = 0; i < n; ++i)
      yw_[i] = y[i] + hs * (a81 * k1_[i] + a84 * k4_[i] + a85 * k5_[i] + a86 * k6_[i] + a87 * k7_[i]);
    eval(t + c8 * hs, yw_, k8_);
    for (std::size_t i = 0; i < n; ++i)
      yw_[i] = y[i] + hs * (a91 * k1_[i] + a94 * k4_[i] + a95 * k5_[i] + a96 * k6_[i] + a97 * k7_[i] +
                            a98 * k8_[i]);
    eval(t + c9 * hs, yw_, k9_);
    for (std::size_t i = 0; i < n; ++i)
      yw_[i] = y[i] + hs * (a101 * k1_[i] + a104 * k4_[i] + a105 * k5_[i] + a106 * k6_[i] +
                            a107 * k7_[i] + a108 * k8_[i] + a109 * k9_[i]);
    eval(t + c10 * hs, yw_, k10_);
    for (std::size_t i = 0; i < n; ++i)
      yw_[i] = y[i] + hs * (a111 * k1_[i] + a114 * k4_[i] + a115 * k5_[i] + a116 * k6_[i] +
                            a117 * k7_[i] + a118 * k8_[i] + a119 * k9_[i] + a1110 * k10_[i]);
    eval(t + c11 * hs, yw_, k2_);
    for (std::size_t i = 0; i < n; ++i)
      yw_[i] = y[i] + hs * (a121 * k1_[i] + a124 * k4_[i] + a125 * k5_[i] + a126 * k6_[i] +
                            a127 * k7_[i] + a128 * k8_[i] + a129 * k9_[i] + a1210 * k10_[i] +
                            a1211 * k2_[i]);
    const double t_new = last ? t1 : t + hs;
    eval(t + hs, yw_, k3_);
    for (std::size_t i = 0; i < n; ++i) {
      k4_[i] = b1 * k1_[i] + b6 * k6_[i] + b7 * k7_[i] + b8 * k8_[i] + b9 * k9_[i] + b10 * k10_[i] +
               b11 * k2_[i] + b12 * k3_[i];
      k5_[i] = y[i] + hs * k4_[i];
    }

    double err = 0.0, err2 = 0.0;
    for (std::size_t i = 0; i < nc; ++i) {
      const double sk = scale(i, y, k5_);
      const double e3 = k4_[i] - bhh1 * k1_[i] - bhh2 * k9_[i] - bhh3 * k3_[i];
      const double e5 = er1 * k1_[i] + er6 * k6_[i] + er7 * k7_[i] + er8 * k8_[i] + er9 * k9_[i] +
                        er10 * k10_[i] + er11 * k2_[i] + er12 * k3_[i];
      err2 += (e3 / sk) * (e3 / sk);
      err += (e5 / sk) * (e5 / sk);
    }
    double deno = err + 0.01 * err2;
    if (deno <= 0.0) deno = 1.0;
    err = h * err * std::sqrt(1.0 / (static_cast<double>(nc) * deno));
    if (!std::isfinite(err)) {
      fail(ErrorCode::ToleranceNotMet, "DOP853: non-finite error estimate near t = " + std::to_string(t));
    }

    double fac = std::pow(err, 0.125) / 0.9;
    fac = std::clamp(fac, 1.0 / 6.0, 3.0);
    double h_new = h / fac;

    if (err <= 1.0) {
      ++stats_.accepted;
      eval(t_new, k5_, k4_);
      std::swap(k1_, k4_);
      y.swap(k5_);
      t = t_new;
      update_running_max(y);
      observe(t, std::span<const double>(y));
      if (last) {
        h_guess_ = std::min(h_new, opt_.max_step);
        return;
      }
      if (last_rejected) h_new = std::min(h_new, h);
      last_rejected = false;
      h = std::min(h_new, opt_.max_step);
    } else {
      ++stats_.rejected;
      last_rejected = true;
      h = h / std::min(3.0, std::pow(err, 0.125) / 0.9);
    }
  }
}

}  // namespace rpif::ode
