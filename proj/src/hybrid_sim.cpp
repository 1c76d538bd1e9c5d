#include "hybridavg/hybrid_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hybridavg/rng.hpp"

namespace hybridavg {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

class HybridRun {
 public:
  HybridRun(const ModelSpec& model, double epsilon, const OdeOptions& ode,
            const RecordOptions& record, std::uint64_t seed)
      : model_(model), epsilon_(epsilon), ode_(ode), record_(record), rng_(seed),
        ctl_(ode, epsilon * ode.dt0) {}

 private:
  // dx/dt = g/epsilon and the integrated hazard dLambda/dt = b + d at the current n.
  auto rhs() const {
    return [this](double, const State<2>& s) {
      return State<2>{model_.g(s[0], n_) / epsilon_, model_.b(s[0], n_) + model_.d(s[0], n_)};
    };
  }

 public:
  HybridTrajectory run(double x0, Count n0, double t_end) {
    traj_.epsilon = epsilon_;
    n_ = n0;
    y_ = {x0, 0.0};
    t_ = 0.0;
    traj_.samples.push_back({0.0, x0, n0});
    if (n_ == 0) traj_.absorbed_at = 0.0;
    target_ = rng_.exponential();

    std::int64_t grid_index = 1;
    double next_grid = record_.sample_dt;

    while (t_ < t_end) {
      if (n_ == 0 && !record_.continue_after_absorption) break;
      double stop = t_end;
      if (record_.mode == Recording::grid) stop = std::min(stop, next_grid);

      const double h = std::min(ctl_.proposal(), stop - t_);
      double err = 0.0;
      const State<2> trial = ode_step<2>(rhs(), ode_.method, t_, y_, h, ode_, &err);
      const bool finite = all_finite<2>(trial);
      if (!finite) err = std::numeric_limits<double>::infinity();
      if (!ctl_.update(h, err)) continue;
      if (!finite) throw std::runtime_error(non_finite_message());

      if (n_ > 0 && trial[1] >= target_) {
        jump(h, trial);
        continue;
      }
      t_ = (stop - t_ - h) <= 0.0 ? stop : t_ + h;
      y_ = trial;

      if (record_.mode == Recording::full) {
        traj_.samples.push_back({t_, y_[0], n_});
      } else if (record_.mode == Recording::grid && t_ >= next_grid) {
        traj_.samples.push_back({t_, y_[0], n_});
        ++grid_index;
        next_grid = static_cast<double>(grid_index) * record_.sample_dt;
      }
    }

    if (traj_.samples.back().t < t_) traj_.samples.push_back({t_, y_[0], n_});
    traj_.t_final = t_;
    traj_.n_final = n_;
    traj_.x_final = y_[0];
    return std::move(traj_);
  }

 private:
  std::string non_finite_message() const {
    return "hybrid simulation: non-finite state at t = " + std::to_string(t_) +
           ", n = " + std::to_string(n_);
  }

  // The hazard crosses target_ inside (t_, t_ + h]. Locate the crossing with
  // Newton steps on tau (the hazard's derivative is the total rate), falling
  // back to bisection whenever Newton leaves the bracket.
  void jump(double h, const State<2>& at_h) {
    double lo = 0.0, hi = h;
    const double lam0 = y_[1];
    double tau = h * (target_ - lam0) / (at_h[1] - lam0);
    State<2> s = at_h;
    for (int iter = 0; iter < 200; ++iter) {
      s = ode_step<2>(rhs(), ode_.method, t_, y_, tau, ode_);
      const double f = s[1] - target_;
      if (std::abs(f) <= ode_.hazard_tol) break;
      if (f < 0.0) {
        lo = tau;
      } else {
        hi = tau;
      }
      if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, t_ + hi)) break;
      const double rate = model_.b(s[0], n_) + model_.d(s[0], n_);
      const double newton = rate > 0.0 ? tau - f / rate : -1.0;
      tau = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
    }
    if (!all_finite<2>(s)) throw std::runtime_error(non_finite_message());

    t_ += tau;
    const double x = s[0];
    const double b = model_.b(x, n_);
    const double d = model_.d(x, n_);
    const bool birth = rng_.uniform() * (b + d) < b;
    const Count before = n_;
    n_ += birth ? 1 : -1;
    if (record_.events) {
      traj_.events.push_back({t_, before, n_, birth ? JumpKind::birth : JumpKind::death, x});
    }
    y_ = {x, 0.0};
    target_ = rng_.exponential();
    if (n_ == 0) traj_.absorbed_at = t_;
  }

  const ModelSpec& model_;
  double epsilon_;
  OdeOptions ode_;
  RecordOptions record_;
  Rng rng_;
  StepController ctl_;
  HybridTrajectory traj_;
  double t_ = 0.0;
  State<2> y_{};
  Count n_ = 0;
  double target_ = 0.0;
};

void check_common(double x0, double t_end, const OdeOptions& ode, const RecordOptions& record) {
  require(x0 > 0.0 && std::isfinite(x0), "initial x0 must be positive and finite");
  require(t_end > 0.0 && std::isfinite(t_end), "t_end must be positive and finite");
  check_options(ode);
  require(record.mode != Recording::grid || record.sample_dt > 0.0,
          "grid recording needs sample_dt > 0");
}

}  // namespace

HybridTrajectory simulate_hybrid(const ModelSpec& model, double epsilon, double x0, Count n0,
                                 double t_end, std::uint64_t seed, const OdeOptions& ode,
                                 const RecordOptions& record) {
  require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0, 1]");
  require(n0 >= 0, "n0 must be nonnegative");
  check_common(x0, t_end, ode, record);
  return HybridRun(model, epsilon, ode, record, seed).run(x0, n0, t_end);
}

std::vector<PathPoint> solve_frozen_ode(const ModelSpec& model, Count n, double epsilon, double x0,
                                        const std::vector<double>& times, const OdeOptions& ode) {
  require(epsilon > 0.0, "epsilon must be positive");
  check_options(ode);
  auto rhs = [&](double, const State<1>& s) { return State<1>{model.g(s[0], n) / epsilon}; };
  const auto states = integrate_to<1>(rhs, 0.0, State<1>{x0}, times, ode, epsilon * ode.dt0);
  std::vector<PathPoint> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = {times[i], states[i][0]};
  return out;
}

std::array<double, 2> deterministic_field(const ModelParams& p, double x, double y) {
  const double mu = p.mu_max * x / (p.mu_half + x);
  return {p.D * (p.x_in - x) - (p.alpha / p.V) * mu * y, (p.beta * mu - p.gamma * p.D) * y};
}

std::vector<DeterministicPoint> solve_deterministic_limit(const ModelParams& params, double x0,
                                                          double y0,
                                                          const std::vector<double>& times,
                                                          const OdeOptions& ode) {
  require(x0 >= 0.0 && y0 >= 0.0, "deterministic limit needs x0, y0 >= 0");
  check_options(ode);
  auto rhs = [&](double, const State<2>& s) { return deterministic_field(params, s[0], s[1]); };
  const auto states = integrate_to<2>(rhs, 0.0, State<2>{x0, y0}, times, ode, ode.dt0);
  std::vector<DeterministicPoint> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = {times[i], states[i][0], states[i][1]};
  return out;
}

HybridTrajectory simulate_rescaled(const ModelParams& params, Count N, double x0, double y0,
                                   double t_end, std::uint64_t seed, const OdeOptions& ode,
                                   const RecordOptions& record) {
  require(N >= 1, "rescaling factor N must be >= 1");
  require(y0 > 0.0, "initial density must be positive");
  ModelParams scaled = params;
  scaled.V = params.V * static_cast<double>(N);
  const auto k0 = static_cast<Count>(std::llround(static_cast<double>(N) * y0));
  HybridTrajectory traj = simulate_hybrid(chemostat_model(scaled), 1.0, x0, k0, t_end, seed, ode, record);
  traj.n_scale = static_cast<double>(N);
  return traj;
}

double sup_distance_to_limit(const HybridTrajectory& traj, const ModelParams& params,
                             const OdeOptions& ode) {
  if (traj.samples.empty()) throw std::invalid_argument("sup_distance_to_limit: empty trajectory");
  // Pairs of (time, x, density) to compare, including both sides of every jump.
  struct Point {
    double t, x, y;
  };
  std::vector<Point> pts;
  const double scale = traj.n_scale;
  for (const auto& s : traj.samples) pts.push_back({s.t, s.x, static_cast<double>(s.n) / scale});
  for (const auto& e : traj.events) {
    pts.push_back({e.t, e.x, static_cast<double>(e.n_before) / scale});
    pts.push_back({e.t, e.x, static_cast<double>(e.n_after) / scale});
  }
  std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.t < b.t; });
  std::vector<double> times(pts.size());
  std::transform(pts.begin(), pts.end(), times.begin(), [](const Point& p) { return p.t; });
  const Sample& s0 = traj.samples.front();
  const auto det =
      solve_deterministic_limit(params, s0.x, static_cast<double>(s0.n) / scale, times, ode);
  double sup = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    sup = std::max({sup, std::abs(pts[i].x - det[i].x), std::abs(pts[i].y - det[i].y)});
  }
  return sup;
}

}  // namespace hybridavg
