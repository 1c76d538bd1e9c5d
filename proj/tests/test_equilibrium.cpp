#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "hybridavg/equilibrium.hpp"
#include "hybridavg/hybrid_sim.hpp"

using namespace hybridavg;

namespace {

const ModelSpec& reference_model() {
  static const ModelSpec model = chemostat_model(reference_params());
  return model;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return v;
}

}  // namespace

TEST_CASE("bisection roots match independent values") {
  const ModelSpec& m = reference_model();
  CHECK(std::abs(equilibrium(m, 0) - 7.0) <= 1e-11);
  CHECK(equilibrium(m, 1) == doctest::Approx(6.352012878968893).epsilon(1e-11));
  CHECK(equilibrium(m, 2) == doctest::Approx(5.723110997362451).epsilon(1e-11));
  CHECK(equilibrium(m, 30) == doctest::Approx(0.4138617255817282).epsilon(1e-10));
  CHECK(equilibrium(m, 100) == doctest::Approx(0.10130055359191265).epsilon(1e-9));
}

TEST_CASE("roots make the drift vanish") {
  const ModelSpec& m = reference_model();
  for (Count n = 0; n <= 300; n += 7) {
    const double x = equilibrium(m, n);
    CHECK(std::abs(m.g(x, n)) <= 1e-10);
  }
}

TEST_CASE("closed form agrees with bisection") {
  const ModelParams p = reference_params();
  CHECK(closed_form_slope(p) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(closed_form_equilibrium(0, p) == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(closed_form_equilibrium(2, p) == doctest::Approx(5.723110997362451).epsilon(1e-12));
  CHECK(closed_form_equilibrium(30, p) == doctest::Approx(0.4138617255817282).epsilon(1e-12));
  for (Count n = 0; n <= 200; ++n) {
    CHECK(std::abs(closed_form_equilibrium(n, p) - equilibrium(reference_model(), n)) <= 1e-8);
  }
}

TEST_CASE("a slope of 7.5 in the closed form does not reproduce the roots") {
  const double u = 7.5 * 1 - 6.0;
  const double wrong = 0.5 * (std::sqrt(u * u + 28.0) - u);
  CHECK(std::abs(wrong - equilibrium(reference_model(), 1)) > 1.0);
}

TEST_CASE("closed form rejects other parameter sets") {
  ModelParams p = reference_params();
  p.D = 0.2;
  CHECK_THROWS_AS(closed_form_equilibrium(3, p), std::invalid_argument);
}

TEST_CASE("roots decrease strictly in n") {
  const ModelSpec& m = reference_model();
  double prev = equilibrium(m, 0);
  for (Count n = 1; n <= 200; ++n) {
    const double x = equilibrium(m, n);
    CHECK(x < prev);
    CHECK(x > 0.0);
    prev = x;
  }
}

TEST_CASE("bracket failure is reported") {
  ModelSpec bad = reference_model();
  bad.drift = [](double, Count) { return 1.0; };
  CHECK_THROWS_AS(equilibrium(bad, 1), std::domain_error);
}

TEST_CASE("equilibria stay below the inflow bound") {
  const EquilibriumBound r = equilibrium_bound_check(reference_model(), 1000);
  CHECK(r.holds);
  CHECK(r.bound == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(r.argmax == 0);
  CHECK(r.max_value == doctest::Approx(7.0).epsilon(1e-11));
  CHECK(equilibrium_bracket(reference_model()) == doctest::Approx(8.0));
}

TEST_CASE("table entries satisfy the cached invariants") {
  EquilibriumTable table(reference_model());
  for (Count n = 0; n <= 150; ++n) {
    const double x = table.at(n);
    CHECK(x > 0.0);
    CHECK(x <= table.upper_bound());
    CHECK(std::abs(reference_model().g(x, n)) <= 1e-10);
  }
  CHECK(table.size() >= 151);
  CHECK(table.at(30) == equilibrium(reference_model(), 30, table.tol()));
}

TEST_CASE("table lookups agree across threads") {
  EquilibriumTable table(reference_model());
  std::vector<std::vector<double>> seen(4);
  std::vector<std::thread> threads;
  for (std::size_t k = 0; k < seen.size(); ++k) {
    threads.emplace_back([&, k] {
      for (Count n = 400; n >= 0; --n) seen[k].push_back(table.at(n));
    });
  }
  for (auto& t : threads) t.join();
  for (std::size_t k = 1; k < seen.size(); ++k) CHECK(seen[k] == seen[0]);
}

TEST_CASE("relaxation from the equilibrium is flat") {
  const ModelSpec& m = reference_model();
  const auto grid = linspace(0.0, 20.0, 41);
  for (Count n : {1, 5, 30}) {
    CHECK(relaxation_check(m, n, equilibrium(m, n), 1.0, grid) <= 1e-9);
  }
}

TEST_CASE("relaxation obeys the exponential bound") {
  const ModelSpec& m = reference_model();
  CHECK(relaxation_check(m, 30, 10.0, 1.0, linspace(0.0, 50.0, 501)) <= 1e-6);
  CHECK(relaxation_check(m, 30, 10.0, 0.1, linspace(0.0, 5.0, 501)) <= 1e-6);
}

TEST_CASE("frozen distance to equilibrium never increases") {
  const ModelSpec& m = reference_model();
  for (Count n : {0, 3, 30}) {
    const double xs = equilibrium(m, n);
    const auto path = solve_frozen_ode(m, n, 0.5, 9.5, linspace(0.0, 30.0, 301));
    double prev = std::abs(path.front().x - xs);
    for (const auto& p : path) {
      const double dist = std::abs(p.x - xs);
      CHECK(dist <= prev + 1e-12);
      prev = dist;
    }
  }
}
