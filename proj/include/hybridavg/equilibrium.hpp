#ifndef HYBRIDAVG_EQUILIBRIUM_HPP
#define HYBRIDAVG_EQUILIBRIUM_HPP

#include <shared_mutex>
#include <span>
#include <vector>

#include "hybridavg/model.hpp"
#include "hybridavg/ode.hpp"

namespace hybridavg {

inline constexpr double kDefaultRootTol = 1e-12;

/// Upper end of the root bracket, g_zero_sup / delta + 1.
double equilibrium_bracket(const ModelSpec& model);

/// Quasi-equilibrium x*_n: the unique positive root of g(., n), by bisection
/// on [0, equilibrium_bracket(model)] down to a bracket width of `tol`.
/// Throws std::domain_error if g does not change sign on the bracket.
double equilibrium(const ModelSpec& model, Count n, double tol = kDefaultRootTol);

/// Closed form of x*_n for the reference Monod parameters:
///   x*_n = (sqrt(u_n^2 + 4v) - u_n) / 2,  u_n = 0.75 n - 6,  v = 7.
/// Throws std::invalid_argument for any other parameter set.
double closed_form_equilibrium(Count n, const ModelParams& params);

/// Slope of u_n in the closed form, alpha mu_max / (V D) (0.75 for the
/// reference parameters).
double closed_form_slope(const ModelParams& params);

/// Memoized x*_n for n = 0..(largest n requested). Lookups are thread-safe;
/// entries never change once computed.
class EquilibriumTable {
 public:
  explicit EquilibriumTable(ModelSpec model, double tol = kDefaultRootTol);

  EquilibriumTable(const EquilibriumTable&) = delete;
  EquilibriumTable& operator=(const EquilibriumTable&) = delete;

  double at(Count n) const;
  Count size() const;
  double tol() const { return tol_; }
  double upper_bound() const { return upper_bound_; }
  const ModelSpec& model() const { return model_; }

 private:
  ModelSpec model_;
  double tol_;
  double upper_bound_;
  mutable std::shared_mutex mutex_;
  mutable std::vector<double> entries_;
};

/// Integrates the frozen fast subsystem dx/dt = g(x, n)/epsilon over
/// `t_grid` and returns max_t |x_t - x*_n| - |x_0 - x*_n| exp(-t delta/epsilon).
/// The exponential bound holds exactly, so the result is <= 0 up to
/// integration error.
double relaxation_check(const ModelSpec& model, Count n, double x0, double epsilon,
                        std::span<const double> t_grid, const OdeOptions& opts = {});

struct EquilibriumBound {
  bool holds = false;
  double bound = 0.0;      ///< g_zero_sup / delta
  double max_value = 0.0;  ///< max_{n <= n_max} x*_n
  Count argmax = 0;
};

/// Checks x*_n <= g_zero_sup / delta for n = 0..n_max.
EquilibriumBound equilibrium_bound_check(const ModelSpec& model, Count n_max);

}  // namespace hybridavg

#endif  // HYBRIDAVG_EQUILIBRIUM_HPP
