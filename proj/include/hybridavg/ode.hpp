#ifndef HYBRIDAVG_ODE_HPP
#define HYBRIDAVG_ODE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hybridavg {

enum class OdeMethod { rk4, adaptive };

struct OdeOptions {
  OdeMethod method = OdeMethod::adaptive;
  /// Base step. The effective step never exceeds time_scale * dt0.
  double dt0 = 0.1;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  /// Jump localization tolerance on the integrated hazard.
  double hazard_tol = 1e-10;
};

/// Throws std::invalid_argument if any option is non-positive.
inline void check_options(const OdeOptions& opts) {
  if (!(opts.dt0 > 0.0) || !(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0) ||
      !(opts.hazard_tol > 0.0)) {
    throw std::invalid_argument("ODE options: dt0 and all tolerances must be positive");
  }
}

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
bool all_finite(const State<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

namespace ode_detail {

template <std::size_t N>
State<N> axpy(const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
  State<N> out = y;
  for (std::size_t i = 0; i < N; ++i) {
    double acc = 0.0;
    for (const auto& [c, k] : terms) acc += c * (*k)[i];
    out[i] += h * acc;
  }
  return out;
}

}  // namespace ode_detail

/// One explicit step of size h. `rhs(t, y)` returns dy/dt.
/// For the adaptive method, `err` receives the scaled error norm (<= 1 means
/// acceptable); for RK4 it is set to 0.
template <std::size_t N, class Rhs>
State<N> ode_step(const Rhs& rhs, OdeMethod method, double t, const State<N>& y, double h,
                  const OdeOptions& opts, double* err = nullptr) {
  using ode_detail::axpy;
  if (method == OdeMethod::rk4) {
    const State<N> k1 = rhs(t, y);
    const State<N> k2 = rhs(t + 0.5 * h, axpy<N>(y, h, {{0.5, &k1}}));
    const State<N> k3 = rhs(t + 0.5 * h, axpy<N>(y, h, {{0.5, &k2}}));
    const State<N> k4 = rhs(t + h, axpy<N>(y, h, {{1.0, &k3}}));
    if (err) *err = 0.0;
    return axpy<N>(y, h, {{1.0 / 6, &k1}, {1.0 / 3, &k2}, {1.0 / 3, &k3}, {1.0 / 6, &k4}});
  }

  // Dormand-Prince 5(4).
  const State<N> k1 = rhs(t, y);
  const State<N> k2 = rhs(t + h / 5, axpy<N>(y, h, {{1.0 / 5, &k1}}));
  const State<N> k3 = rhs(t + 3 * h / 10, axpy<N>(y, h, {{3.0 / 40, &k1}, {9.0 / 40, &k2}}));
  const State<N> k4 = rhs(t + 4 * h / 5,
                          axpy<N>(y, h, {{44.0 / 45, &k1}, {-56.0 / 15, &k2}, {32.0 / 9, &k3}}));
  const State<N> k5 = rhs(t + 8 * h / 9, axpy<N>(y, h,
                                                  {{19372.0 / 6561, &k1},
                                                   {-25360.0 / 2187, &k2},
                                                   {64448.0 / 6561, &k3},
                                                   {-212.0 / 729, &k4}}));
  const State<N> k6 = rhs(t + h, axpy<N>(y, h,
                                         {{9017.0 / 3168, &k1},
                                          {-355.0 / 33, &k2},
                                          {46732.0 / 5247, &k3},
                                          {49.0 / 176, &k4},
                                          {-5103.0 / 18656, &k5}}));
  const State<N> y5 = axpy<N>(y, h,
                              {{35.0 / 384, &k1},
                               {500.0 / 1113, &k3},
                               {125.0 / 192, &k4},
                               {-2187.0 / 6784, &k5},
                               {11.0 / 84, &k6}});
  if (err) {
    const State<N> k7 = rhs(t + h, y5);
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    double norm = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale = opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      norm = std::max(norm, std::abs(e) / scale);
    }
    *err = norm;
  }
  return y5;
}

/// Step-size controller shared by all integrators in the library.
class StepController {
 public:
  StepController(const OdeOptions& opts, double h_max)
      : opts_(opts), h_max_(h_max), h_(h_max) {}

  double proposal() const { return h_; }
  double h_max() const { return h_max_; }
  bool adaptive() const { return opts_.method == OdeMethod::adaptive; }

  /// Returns true if a step with error norm `err` taken with size `h` is
  /// accepted, and updates the next proposal either way.
  bool update(double h, double err) {
    if (!adaptive()) {
      h_ = h_max_;
      return true;
    }
    double factor = 0.2;
    if (err == 0.0) {
      factor = 5.0;
    } else if (std::isfinite(err)) {
      factor = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    }
    if (err <= 1.0) {
      // A step clipped to a stop must not shrink the next proposal.
      double next = h * factor;
      if (h < h_) next = std::max(next, h_);
      h_ = std::min(h_max_, next);
      return true;
    }
    h_ = h * factor;
    if (h_ < min_step()) {
      throw std::runtime_error("ODE step size underflow");
    }
    return false;
  }

 private:
  double min_step() const { return 1e-14 * h_max_; }

  OdeOptions opts_;
  double h_max_;
  double h_;
};

/// Integrates y' = rhs(t, y) from (t0, y0) and returns the state at every
/// requested time in `stops` (nondecreasing, all >= t0). Steps are clipped to
/// land on stops and never exceed h_max.
template <std::size_t N, class Rhs>
std::vector<State<N>> integrate_to(const Rhs& rhs, double t0, const State<N>& y0,
                                   const std::vector<double>& stops, const OdeOptions& opts,
                                   double h_max) {
  std::vector<State<N>> out;
  out.reserve(stops.size());
  StepController ctl(opts, h_max);
  double t = t0;
  State<N> y = y0;
  for (double stop : stops) {
    if (stop < t) throw std::invalid_argument("integrate_to: stops must be nondecreasing");
    while (t < stop) {
      const double h = std::min(ctl.proposal(), stop - t);
      double err = 0.0;
      const State<N> trial = ode_step<N>(rhs, opts.method, t, y, h, opts, &err);
      const bool finite = all_finite<N>(trial);
      if (!finite) err = std::numeric_limits<double>::infinity();
      if (!ctl.update(h, err)) continue;
      if (!finite) throw std::runtime_error("ODE state became non-finite");
      y = trial;
      t = (stop - t - h) <= 0.0 ? stop : t + h;
    }
    out.push_back(y);
  }
  return out;
}

}  // namespace hybridavg

#endif  // HYBRIDAVG_ODE_HPP
