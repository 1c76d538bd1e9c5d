#include "hybridavg/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hybridavg {

namespace {

// Unchecked Monod; the ODE stages may probe slightly outside x >= 0.
double monod(double x, const ModelParams& p) { return p.mu_max * x / (p.mu_half + x); }

std::string describe(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ModelParams reference_params() { return ModelParams{}; }

void check_params(const ModelParams& p) {
  const std::pair<const char*, double> fields[] = {
      {"x_in", p.x_in},   {"D", p.D},         {"V", p.V},
      {"alpha", p.alpha}, {"beta", p.beta},   {"gamma", p.gamma},
      {"mu_max", p.mu_max}, {"mu_half", p.mu_half},
  };
  for (const auto& [name, value] : fields) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument(std::string("model parameter ") + name +
                                  " must be finite and strictly positive, got " +
                                  describe(value));
    }
  }
}

double monod_mu(double x, const ModelParams& p) {
  if (!(x >= 0.0)) {
    throw std::invalid_argument("monod_mu: x must be nonnegative, got " + describe(x));
  }
  return monod(x, p);
}

double drift_g(double x, Count n, const ModelParams& p) {
  return p.D * (p.x_in - x) - (p.alpha / p.V) * monod(x, p) * static_cast<double>(n);
}

double birth_rate(double x, Count n, const ModelParams& p) {
  return p.beta * monod(x, p) * static_cast<double>(n);
}

double death_rate(double /*x*/, Count n, const ModelParams& p) {
  return p.gamma * p.D * static_cast<double>(n);
}

ModelSpec chemostat_model(const ModelParams& p) {
  ModelSpec m;
  m.name = "chemostat-monod";
  m.drift = [p](double x, Count n) { return drift_g(x, n, p); };
  m.birth = [p](double x, Count n) { return birth_rate(x, n, p); };
  m.death = [p](double x, Count n) { return death_rate(x, n, p); };
  // g(., n) is D-dissipative since mu is nondecreasing; g(0, n) = D x_in.
  m.dissipativity_rate = p.D;
  m.g_zero_sup = p.D * p.x_in;
  m.params = p;
  return m;
}

std::vector<double> XGrid::points() const {
  if (!(step > 0.0) || !(hi >= lo)) {
    throw std::invalid_argument("XGrid: need step > 0 and hi >= lo");
  }
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) xs[i] = lo + static_cast<double>(i) * step;
  if (hi - xs.back() > 1e-9 * std::max(1.0, std::abs(hi))) xs.push_back(hi);
  return xs;
}

AssumptionReport validate_assumptions(const ModelSpec& model, const XGrid& grid,
                                      Count n_max) {
  if (n_max < 1) throw std::invalid_argument("validate_assumptions: n_max must be >= 1");
  const std::vector<double> xs = grid.points();
  if (xs.size() < 2) throw std::invalid_argument("validate_assumptions: grid needs two points");

  AssumptionReport report;
  auto flag = [&](std::string id, double x, Count n, std::string detail) {
    report.violations.push_back({std::move(id), x, n, std::move(detail)});
  };

  const std::size_t nx = xs.size();
  std::vector<double> gv(nx), bv(nx), dv(nx);
  std::vector<double> rate_sup(static_cast<std::size_t>(n_max) + 1, 0.0);
  std::vector<double> lipschitz(static_cast<std::size_t>(n_max) + 1, 0.0);

  double worst_slope = -std::numeric_limits<double>::infinity();
  double worst_x = xs.front();
  Count worst_n = 0;
  double g_zero_max = -std::numeric_limits<double>::infinity();

  for (Count n = 0; n <= n_max; ++n) {
    for (std::size_t i = 0; i < nx; ++i) {
      gv[i] = model.g(xs[i], n);
      bv[i] = model.b(xs[i], n);
      dv[i] = model.d(xs[i], n);
      if (!std::isfinite(gv[i]) || !std::isfinite(bv[i]) || !std::isfinite(dv[i])) {
        flag("rates.finite", xs[i], n, "non-finite evaluator value");
        continue;
      }
      if (bv[i] < 0.0) flag("rates.nonnegative_b", xs[i], n, "b = " + describe(bv[i]));
      if (dv[i] < 0.0) flag("rates.nonnegative_d", xs[i], n, "d = " + describe(dv[i]));
      if (n == 0 && (bv[i] != 0.0 || dv[i] != 0.0)) {
        flag("rates.absorbing_zero", xs[i], n, "b or d nonzero at n = 0");
      }
      if (n > 0 && !(bv[i] + dv[i] > 0.0)) {
        flag("rates.positive_total", xs[i], n, "b + d vanishes for n >= 1");
      }
      auto& s = rate_sup[static_cast<std::size_t>(n)];
      s = std::max(s, bv[i] + dv[i]);
    }

    // Any secant slope is a convex combination of adjacent ones, so the
    // adjacent maximum is the maximum over all grid pairs.
    for (std::size_t i = 1; i < nx; ++i) {
      const double dx = xs[i] - xs[i - 1];
      const double slope = (gv[i] - gv[i - 1]) / dx;
      if (slope > worst_slope) {
        worst_slope = slope;
        worst_x = xs[i - 1];
        worst_n = n;
      }
      auto& l = lipschitz[static_cast<std::size_t>(n)];
      l = std::max(l, (std::abs(bv[i] - bv[i - 1]) + std::abs(dv[i] - dv[i - 1])) / dx);
    }

    const double g0 = model.g(0.0, n);
    if (!(g0 > 0.0)) flag("drift.positive_at_zero", 0.0, n, "g(0, n) = " + describe(g0));
    g_zero_max = std::max(g_zero_max, g0);
  }

  report.dissipativity_rate_delta = -worst_slope;
  report.g_zero_bound = g_zero_max;
  if (!(report.dissipativity_rate_delta > 0.0)) {
    flag("drift.dissipative", worst_x, worst_n,
         "secant slope " + describe(worst_slope) + " is not negative");
  }

  // Least linear envelope c1 + c2 n of sup_x (b + d), anchored at n = 1.
  const double s1 = rate_sup[1];
  double c2 = 0.0;
  for (Count n = 2; n <= n_max; ++n) {
    c2 = std::max(c2, (rate_sup[static_cast<std::size_t>(n)] - s1) / static_cast<double>(n - 1));
  }
  if (n_max == 1) c2 = s1;
  c2 = std::max(c2, std::numeric_limits<double>::min());
  double c1 = 0.0;
  for (Count n = 1; n <= n_max; ++n) {
    c1 = std::max(c1, rate_sup[static_cast<std::size_t>(n)] - c2 * static_cast<double>(n));
  }
  // Lipschitz envelope c1 (1 + c2 n + c3 n^2) with c3 = c2; raising c1 keeps
  // the growth bound valid.
  const double c3 = c2;
  for (Count n = 0; n <= n_max; ++n) {
    const double nn = static_cast<double>(n);
    c1 = std::max(c1, lipschitz[static_cast<std::size_t>(n)] / (1.0 + c2 * nn + c3 * nn * nn));
  }
  report.c1 = c1;
  report.c2 = c2;
  report.c3 = c3;

  // Unique positive root: g must turn negative before the bracket bound.
  if (report.dissipativity_rate_delta > 0.0 && g_zero_max > 0.0) {
    const double bound = g_zero_max / report.dissipativity_rate_delta + 1.0;
    for (Count n = 0; n <= n_max; ++n) {
      if (!(model.g(bound, n) < 0.0)) {
        flag("drift.root_bracket", bound, n, "g does not change sign on [0, bound]");
      }
    }
  }
  return report;
}

}  // namespace hybridavg
