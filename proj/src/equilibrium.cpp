#include "hybridavg/equilibrium.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

#include "hybridavg/hybrid_sim.hpp"

namespace hybridavg {

double equilibrium_bracket(const ModelSpec& model) {
  if (!(model.dissipativity_rate > 0.0) || !(model.g_zero_sup > 0.0)) {
    throw std::domain_error("model " + model.name +
                            " lacks a positive dissipativity rate or g(0, n) bound");
  }
  return model.g_zero_sup / model.dissipativity_rate + 1.0;
}

double equilibrium(const ModelSpec& model, Count n, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("equilibrium: tol must be positive");
  if (n < 0) throw std::invalid_argument("equilibrium: n must be nonnegative");
  double lo = 0.0;
  double hi = equilibrium_bracket(model);
  const double g_lo = model.g(lo, n);
  const double g_hi = model.g(hi, n);
  if (!(g_lo > 0.0) || !(g_hi < 0.0)) {
    throw std::domain_error("equilibrium: g(., " + std::to_string(n) +
                            ") does not change sign on [0, " + std::to_string(hi) + "]");
  }
  for (int iter = 0; iter < 400 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double gm = model.g(mid, n);
    if (gm == 0.0) return mid;
    if (gm > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double closed_form_slope(const ModelParams& p) { return p.alpha * p.mu_max / (p.V * p.D); }

double closed_form_equilibrium(Count n, const ModelParams& params) {
  if (!(params == reference_params())) {
    throw std::invalid_argument("closed_form_equilibrium: only defined for the reference parameters");
  }
  if (n < 0) throw std::invalid_argument("closed_form_equilibrium: n must be nonnegative");
  // Clearing denominators in g(x, n) = 0 gives x^2 + u_n x - v = 0 with
  // u_n = (alpha mu_max / (V D)) n + mu_half - x_in and v = x_in mu_half.
  const double u = closed_form_slope(params) * static_cast<double>(n) + params.mu_half - params.x_in;
  const double v = params.x_in * params.mu_half;
  // Rationalized root, stable for large u.
  const double disc = std::sqrt(u * u + 4.0 * v);
  return u > 0.0 ? 2.0 * v / (disc + u) : 0.5 * (disc - u);
}

EquilibriumTable::EquilibriumTable(ModelSpec model, double tol)
    : model_(std::move(model)), tol_(tol), upper_bound_(equilibrium_bracket(model_)) {
  if (!(tol_ > 0.0)) throw std::invalid_argument("EquilibriumTable: tol must be positive");
}

double EquilibriumTable::at(Count n) const {
  if (n < 0) throw std::invalid_argument("EquilibriumTable: n must be nonnegative");
  const auto idx = static_cast<std::size_t>(n);
  {
    std::shared_lock lock(mutex_);
    if (idx < entries_.size()) return entries_[idx];
  }
  std::unique_lock lock(mutex_);
  while (entries_.size() <= idx) {
    entries_.push_back(equilibrium(model_, static_cast<Count>(entries_.size()), tol_));
  }
  return entries_[idx];
}

Count EquilibriumTable::size() const {
  std::shared_lock lock(mutex_);
  return static_cast<Count>(entries_.size());
}

double relaxation_check(const ModelSpec& model, Count n, double x0, double epsilon,
                        std::span<const double> t_grid, const OdeOptions& opts) {
  if (!(x0 > 0.0)) throw std::invalid_argument("relaxation_check: x0 must be positive");
  if (!(epsilon > 0.0) || epsilon > 1.0) {
    throw std::invalid_argument("relaxation_check: epsilon must lie in (0, 1]");
  }
  const double x_star = equilibrium(model, n);
  const double delta = model.dissipativity_rate;
  const std::vector<double> times(t_grid.begin(), t_grid.end());
  const auto path = solve_frozen_ode(model, n, epsilon, x0, times, opts);
  const double d0 = std::abs(x0 - x_star);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [t, x] : path) {
    const double excess = std::abs(x - x_star) - d0 * std::exp(-t * delta / epsilon);
    worst = std::max(worst, excess);
  }
  return worst;
}

EquilibriumBound equilibrium_bound_check(const ModelSpec& model, Count n_max) {
  if (n_max < 0) throw std::invalid_argument("equilibrium_bound_check: n_max must be >= 0");
  EquilibriumBound r;
  r.bound = model.g_zero_sup / model.dissipativity_rate;
  r.max_value = -std::numeric_limits<double>::infinity();
  for (Count n = 0; n <= n_max; ++n) {
    const double x = equilibrium(model, n);
    if (x > r.max_value) {
      r.max_value = x;
      r.argmax = n;
    }
  }
  // x*_0 = bound exactly for the chemostat; allow for the root tolerance.
  r.holds = r.max_value <= r.bound + kDefaultRootTol * (1.0 + r.bound);
  return r;
}

}  // namespace hybridavg
