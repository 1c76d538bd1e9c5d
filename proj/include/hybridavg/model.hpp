#ifndef HYBRIDAVG_MODEL_HPP
#define HYBRIDAVG_MODEL_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hybridavg {

/// Predator count. Signed so that n - 1 at n = 0 is representable in checks.
using Count = std::int64_t;

/// Parameters of the chemostat predator-prey model with Monod consumption.
struct ModelParams {
  double x_in = 7.0;     ///< prey inflow concentration
  double D = 0.1;        ///< dilution rate
  double V = 1.0;        ///< volume
  double alpha = 0.5;    ///< prey-side conversion efficiency
  double beta = 1.0;     ///< predator-side conversion efficiency
  double gamma = 1.0;    ///< predator death ratio
  double mu_max = 0.15;  ///< Monod plateau
  double mu_half = 1.0;  ///< Monod half-saturation constant

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// The reference parameter set (x_in=7, D=0.1, V=1, alpha=0.5, beta=gamma=1,
/// mu(x) = 0.15x/(1+x)).
ModelParams reference_params();

/// Throws std::invalid_argument naming the first non-positive field.
void check_params(const ModelParams& p);

/// Monod uptake mu_max x / (mu_half + x). Throws std::invalid_argument for x < 0.
double monod_mu(double x, const ModelParams& p);

/// Prey drift D(x_in - x) - (alpha/V) mu(x) n.
double drift_g(double x, Count n, const ModelParams& p);

/// beta mu(x) n
double birth_rate(double x, Count n, const ModelParams& p);

/// gamma D n
double death_rate(double x, Count n, const ModelParams& p);

/// A hybrid model: the prey drift g and the predator jump rates b, d.
///
/// The evaluators must be pure. `dissipativity_rate` and `g_zero_sup` are the
/// structural constants the equilibrium bracket relies on: g(., n) has secant
/// slopes <= -dissipativity_rate and sup_n g(0, n) = g_zero_sup.
struct ModelSpec {
  using Evaluator = std::function<double(double, Count)>;

  std::string name;
  Evaluator drift;
  Evaluator birth;
  Evaluator death;
  double dissipativity_rate = 0.0;
  double g_zero_sup = 0.0;
  /// Present only for the built-in chemostat instance.
  std::optional<ModelParams> params;

  double g(double x, Count n) const { return drift(x, n); }
  double b(double x, Count n) const { return birth(x, n); }
  double d(double x, Count n) const { return death(x, n); }
};

/// Builds the chemostat instance. No validation is done here so that invalid
/// parameter sets can be fed to validate_assumptions.
ModelSpec chemostat_model(const ModelParams& p);

/// Uniform grid lo, lo + step, ..., up to and including hi.
struct XGrid {
  double lo = 0.0;
  double hi = 10.0;
  double step = 0.01;

  std::vector<double> points() const;
};

struct Violation {
  std::string assumption;  ///< e.g. "rates.nonnegative_b"
  double x = 0.0;
  Count n = 0;
  std::string detail;
};

struct AssumptionReport {
  double dissipativity_rate_delta = 0.0;  ///< -max secant slope of g(., n)
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double g_zero_bound = 0.0;  ///< max_n g(0, n)
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

/// Numerically checks the structural assumptions of the model on the grid
/// for n = 0..n_max. Violations are collected, never thrown.
AssumptionReport validate_assumptions(const ModelSpec& model, const XGrid& grid,
                                      Count n_max);

}  // namespace hybridavg

#endif  // HYBRIDAVG_MODEL_HPP
