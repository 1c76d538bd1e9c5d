#ifndef HYBRIDAVG_AVERAGED_HPP
#define HYBRIDAVG_AVERAGED_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "hybridavg/equilibrium.hpp"
#include "hybridavg/model.hpp"
#include "hybridavg/trajectory.hpp"

namespace hybridavg {

struct BirthDeathRates {
  double birth = 0.0;
  double death = 0.0;
};

/// Birth-death chain on N_0 absorbed at 0. Built either from a hybrid model,
/// with rates b(x*_n, n), d(x*_n, n) at the quasi-equilibria, or from explicit
/// rate functions. Copies share the equilibrium cache.
class AveragedChain {
 public:
  using RateFunction = std::function<BirthDeathRates(Count)>;

  explicit AveragedChain(ModelSpec model, double root_tol = kDefaultRootTol);

  /// A chain with the given rates; state 0 is forced absorbing.
  static AveragedChain from_rates(RateFunction rates);

  BirthDeathRates rates(Count n) const;

  bool has_model() const { return table_ != nullptr; }
  /// x*_n; throws std::logic_error for chains built from explicit rates.
  double quasi_equilibrium(Count n) const;
  const EquilibriumTable& equilibria() const;

 private:
  AveragedChain() = default;

  std::shared_ptr<const EquilibriumTable> table_;
  RateFunction rates_;
};

/// (b_n, d_n) of the averaged chain.
inline BirthDeathRates averaged_rates(const AveragedChain& chain, Count n) {
  return chain.rates(n);
}

inline constexpr double kUntilAbsorption = std::numeric_limits<double>::infinity();

struct AveragedRecord {
  bool events = true;
  /// Fill the x column with x*_n (needs a model-backed chain).
  bool reconstruct = false;
};

/// Exact (Gillespie direct) simulation from n0 up to t_end, or until
/// absorption when t_end is kUntilAbsorption. The result has epsilon = 0,
/// a sample at t = 0 and at the stopping time, and the jump list.
HybridTrajectory simulate_averaged(const AveragedChain& chain, Count n0, double t_end,
                                   std::uint64_t seed, const AveragedRecord& record = {});

/// Piecewise-constant path t -> x*_{n_t}: one point at t = 0 and one at every
/// jump, holding until the next point.
std::vector<Sample> reconstruct_fast(const AveragedChain& chain, const HybridTrajectory& traj);

/// Writes x*_n into the samples and events of an averaged trajectory.
void attach_fast_variable(const AveragedChain& chain, HybridTrajectory& traj);

}  // namespace hybridavg

#endif  // HYBRIDAVG_AVERAGED_HPP
