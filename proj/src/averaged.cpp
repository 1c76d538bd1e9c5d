#include "hybridavg/averaged.hpp"

#include <cmath>
#include <stdexcept>

#include "hybridavg/rng.hpp"

namespace hybridavg {

AveragedChain::AveragedChain(ModelSpec model, double root_tol)
    : table_(std::make_shared<const EquilibriumTable>(std::move(model), root_tol)) {
  const EquilibriumTable* table = table_.get();
  rates_ = [table](Count n) {
    const double x = table->at(n);
    const ModelSpec& m = table->model();
    return BirthDeathRates{m.b(x, n), m.d(x, n)};
  };
}

AveragedChain AveragedChain::from_rates(RateFunction rates) {
  if (!rates) throw std::invalid_argument("AveragedChain::from_rates: empty rate function");
  AveragedChain chain;
  chain.rates_ = std::move(rates);
  return chain;
}

BirthDeathRates AveragedChain::rates(Count n) const {
  if (n < 0) throw std::invalid_argument("AveragedChain: negative state");
  if (n == 0) return {};
  return rates_(n);
}

double AveragedChain::quasi_equilibrium(Count n) const { return equilibria().at(n); }

const EquilibriumTable& AveragedChain::equilibria() const {
  if (!table_) throw std::logic_error("AveragedChain: chain has no underlying hybrid model");
  return *table_;
}

HybridTrajectory simulate_averaged(const AveragedChain& chain, Count n0, double t_end,
                                   std::uint64_t seed, const AveragedRecord& record) {
  if (n0 < 0) throw std::invalid_argument("simulate_averaged: n0 must be nonnegative");
  if (!(t_end > 0.0)) throw std::invalid_argument("simulate_averaged: t_end must be positive");
  const double nan = std::numeric_limits<double>::quiet_NaN();

  HybridTrajectory traj;
  traj.epsilon = 0.0;
  traj.samples.push_back({0.0, nan, n0});

  Rng rng(seed);
  double t = 0.0;
  Count n = n0;
  while (n > 0) {
    const auto [b, d] = chain.rates(n);
    const double total = b + d;
    if (!(total > 0.0)) break;  // a non-absorbing trap; holds forever
    const double hold = rng.exponential() / total;
    if (t + hold > t_end) break;
    t += hold;
    const bool birth = rng.uniform() * total < b;
    const Count before = n;
    n += birth ? 1 : -1;
    if (record.events) {
      traj.events.push_back({t, before, n, birth ? JumpKind::birth : JumpKind::death, nan});
    }
  }
  if (n == 0) traj.absorbed_at = t;

  const double t_stop = (n == 0 || std::isinf(t_end)) ? t : t_end;
  if (t_stop > 0.0) traj.samples.push_back({t_stop, nan, n});
  traj.t_final = t_stop;
  traj.n_final = n;
  traj.x_final = nan;
  if (record.reconstruct) attach_fast_variable(chain, traj);
  return traj;
}

std::vector<Sample> reconstruct_fast(const AveragedChain& chain, const HybridTrajectory& traj) {
  if (traj.samples.empty()) throw std::invalid_argument("reconstruct_fast: empty trajectory");
  std::vector<Sample> path;
  path.reserve(traj.events.size() + 1);
  const Count n0 = traj.samples.front().n;
  path.push_back({traj.samples.front().t, chain.quasi_equilibrium(n0), n0});
  for (const auto& e : traj.events) {
    path.push_back({e.t, chain.quasi_equilibrium(e.n_after), e.n_after});
  }
  return path;
}

void attach_fast_variable(const AveragedChain& chain, HybridTrajectory& traj) {
  for (auto& s : traj.samples) s.x = chain.quasi_equilibrium(s.n);
  for (auto& e : traj.events) e.x = chain.quasi_equilibrium(e.n_after);
  traj.x_final = chain.quasi_equilibrium(traj.n_final);
}

}  // namespace hybridavg
