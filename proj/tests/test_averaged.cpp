#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hybridavg/averaged.hpp"
#include "hybridavg/rng.hpp"
#include "ks.hpp"

using namespace hybridavg;

namespace {

const AveragedChain& reference_chain() {
  static const AveragedChain chain(chemostat_model(reference_params()));
  return chain;
}

}  // namespace

TEST_CASE("averaged rates at reference states") {
  const auto r0 = averaged_rates(reference_chain(), 0);
  CHECK(r0.birth == 0.0);
  CHECK(r0.death == 0.0);
  const auto r1 = averaged_rates(reference_chain(), 1);
  CHECK(r1.birth == doctest::Approx(0.1295974242062213).epsilon(1e-10));
  CHECK(r1.death == doctest::Approx(0.1).epsilon(1e-15));
  const auto r30 = averaged_rates(reference_chain(), 30);
  CHECK(r30.birth == doctest::Approx(1.3172276548836543).epsilon(1e-10));
  CHECK(r30.death == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("averaged rates are the hybrid rates at the quasi-equilibria") {
  const ModelSpec m = chemostat_model(reference_params());
  for (Count n = 1; n <= 120; n += 3) {
    const double x = reference_chain().quasi_equilibrium(n);
    const auto r = averaged_rates(reference_chain(), n);
    CHECK(r.birth == m.b(x, n));
    CHECK(r.death == m.d(x, n));
    CHECK(r.death == doctest::Approx(0.1 * static_cast<double>(n)).epsilon(1e-15));
  }
}

TEST_CASE("birth to death ratio decreases strictly") {
  double prev = INFINITY;
  for (Count n = 1; n <= 200; ++n) {
    const auto r = averaged_rates(reference_chain(), n);
    const double ratio = r.birth / r.death;
    CHECK(ratio < prev);
    prev = ratio;
  }
}

TEST_CASE("explicit chains have no equilibria") {
  const auto chain = AveragedChain::from_rates([](Count n) {
    return BirthDeathRates{1.0 * static_cast<double>(n), 2.0 * static_cast<double>(n)};
  });
  CHECK_FALSE(chain.has_model());
  CHECK(chain.rates(0).birth == 0.0);
  CHECK(chain.rates(3).death == 6.0);
  CHECK_THROWS_AS(chain.quasi_equilibrium(2), std::logic_error);
}

TEST_CASE("starting at zero is already absorbed") {
  const auto traj = simulate_averaged(reference_chain(), 0, 20.0, 1);
  CHECK(traj.events.empty());
  REQUIRE(traj.absorbed_at.has_value());
  CHECK(*traj.absorbed_at == 0.0);
  CHECK(traj.averaged());
}

TEST_CASE("averaged paths are reproducible and well formed") {
  const auto a = simulate_averaged(reference_chain(), 30, 50.0, 8);
  const auto b = simulate_averaged(reference_chain(), 30, 50.0, 8);
  REQUIRE(a.events.size() == b.events.size());
  Count n = 30;
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].t == b.events[i].t);
    CHECK(a.events[i].n_before == n);
    CHECK(std::abs(a.events[i].n_after - n) == 1);
    n = a.events[i].n_after;
  }
  CHECK(a.n_final == n);
  CHECK(a.samples.front().t == 0.0);
  CHECK(a.samples.back().t == a.t_final);
}

TEST_CASE("running until absorption ends at zero") {
  const auto traj = simulate_averaged(reference_chain(), 5, kUntilAbsorption, 31);
  REQUIRE(traj.absorbed_at.has_value());
  CHECK(traj.n_final == 0);
  CHECK(traj.t_final == *traj.absorbed_at);
  CHECK(traj.events.back().n_after == 0);
}

TEST_CASE("holding times of a constant-rate two-state chain are exponential") {
  // States 1 and 2 only: births at 1, deaths at 2, total rate 1.5 in both.
  const auto chain = AveragedChain::from_rates([](Count n) {
    if (n == 1) return BirthDeathRates{1.5, 0.0};
    return BirthDeathRates{0.0, 1.5};
  });
  const std::size_t count = 10000;
  const auto traj = simulate_averaged(chain, 1, static_cast<double>(count), 2024);
  std::vector<double> draws;
  double prev = 0.0;
  for (const auto& e : traj.events) {
    if (draws.size() == count) break;
    draws.push_back(1.5 * (e.t - prev));
    prev = e.t;
  }
  REQUIRE(draws.size() == count);
  CHECK(testing::ks_unit_exponential(draws) < testing::ks_critical_1pct(count));
}

TEST_CASE("embedded chain births follow the rate fraction") {
  // Reflecting walk on {1, 2, 3} around state 2, where the birth fraction is 0.3.
  const auto chain = AveragedChain::from_rates([](Count n) {
    if (n == 1) return BirthDeathRates{1.0, 0.0};
    if (n == 2) return BirthDeathRates{0.3, 0.7};
    return BirthDeathRates{0.0, 1.0};
  });
  const auto traj = simulate_averaged(chain, 2, 25000.0, 606);
  double visits = 0.0, births = 0.0;
  for (const auto& e : traj.events) {
    if (e.n_before != 2) continue;
    visits += 1.0;
    if (e.kind == JumpKind::birth) births += 1.0;
  }
  REQUIRE(visits >= 10000.0);
  const double sigma = std::sqrt(0.3 * 0.7 / visits);
  CHECK(std::abs(births / visits - 0.3) <= 3.0 * sigma);
}

TEST_CASE("reconstructed fast variable follows the equilibria") {
  auto traj = simulate_averaged(reference_chain(), 30, 40.0, 14);
  const auto path = reconstruct_fast(reference_chain(), traj);
  REQUIRE(path.size() == traj.events.size() + 1);
  CHECK(path.front().x == reference_chain().quasi_equilibrium(30));
  for (std::size_t i = 0; i < path.size(); ++i) {
    CHECK(path[i].x > 0.0);
    CHECK(path[i].x <= 7.0);
    CHECK(path[i].x == reference_chain().quasi_equilibrium(path[i].n));
    if (i > 0) CHECK(path[i].t == traj.events[i - 1].t);
  }
  attach_fast_variable(reference_chain(), traj);
  for (const auto& s : traj.samples) CHECK(s.x == reference_chain().quasi_equilibrium(s.n));
  for (const auto& e : traj.events) CHECK(e.x == reference_chain().quasi_equilibrium(e.n_after));
}

TEST_CASE("an empty population maps to the inflow concentration") {
  const auto traj = simulate_averaged(reference_chain(), 0, 10.0, 2);
  for (const auto& s : reconstruct_fast(reference_chain(), traj)) {
    CHECK(s.x == doctest::Approx(7.0).epsilon(1e-12));
  }
}
