#include "hybridavg/absorption.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybridavg/summation.hpp"

namespace hybridavg {

std::string_view to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::diverges:
      return "diverges";
    case SeriesVerdict::converges:
      return "converges";
    case SeriesVerdict::undetermined:
      break;
  }
  return "undetermined";
}

namespace {

void check_control(const SeriesControl& ctl) {
  if (!(ctl.tol > 0.0) || ctl.i_max < 1 || ctl.window < 1 || !(ctl.converge_ratio < 1.0) ||
      !(ctl.diverge_ratio > 1.0) || !(ctl.blowup > 0.0)) {
    throw std::invalid_argument("SeriesControl: invalid thresholds");
  }
}

BirthDeathRates checked_rates(const AveragedChain& chain, Count i) {
  const BirthDeathRates r = chain.rates(i);
  if (!(r.birth > 0.0) || !(r.death > 0.0) || !std::isfinite(r.birth) || !std::isfinite(r.death)) {
    throw std::domain_error("absorption series need 0 < b_i, d_i < inf; failed at i = " +
                            std::to_string(i));
  }
  return r;
}

// Tracks the ratio window of a positive series and applies the decision rule.
class RatioWindow {
 public:
  explicit RatioWindow(const SeriesControl& ctl) : ctl_(ctl) {}

  void push(double ratio) {
    ratios_.push_back(ratio);
    if (ratios_.size() > static_cast<std::size_t>(ctl_.window)) ratios_.pop_front();
    diverging_run_ = ratio >= ctl_.diverge_ratio ? diverging_run_ + 1 : 0;
  }

  bool diverging() const { return diverging_run_ >= ctl_.window; }

  /// Largest ratio in a full window whose ratios are all <= converge_ratio,
  /// or a negative value if the window does not qualify.
  double converging_ratio() const {
    if (ratios_.size() < static_cast<std::size_t>(ctl_.window)) return -1.0;
    const double r = *std::max_element(ratios_.begin(), ratios_.end());
    return r <= ctl_.converge_ratio ? r : -1.0;
  }

 private:
  const SeriesControl& ctl_;
  std::deque<double> ratios_;
  int diverging_run_ = 0;
};

}  // namespace

double log_rho(const AveragedChain& chain, Count i) {
  if (i < 0) throw std::invalid_argument("log_rho: i must be nonnegative");
  if (i == 0) return -INFINITY;  // rho_0 = 0
  CompensatedSum acc;
  for (Count k = 1; k <= i; ++k) {
    const auto r = checked_rates(chain, k);
    acc.add(std::log(r.death) - std::log(r.birth));
  }
  return acc.value();
}

double rho(const AveragedChain& chain, Count i) { return std::exp(log_rho(chain, i)); }

AbsorptionResult absorption_probability(const AveragedChain& chain, Count m,
                                        const SeriesControl& ctl) {
  check_control(ctl);
  if (m < 0) throw std::invalid_argument("absorption_probability: m must be nonnegative");
  AbsorptionResult res;
  res.m = m;

  const double log_blowup = std::log(ctl.blowup);
  RatioWindow window(ctl);
  CompensatedSum log_rho_acc, total, from_m;
  for (Count i = 1; i <= ctl.i_max; ++i) {
    const auto r = checked_rates(chain, i);
    const double ratio = r.death / r.birth;
    log_rho_acc.add(std::log(r.death) - std::log(r.birth));
    const double lr = log_rho_acc.value();
    res.rho_terms_used = i;
    window.push(ratio);
    if (lr > log_blowup || window.diverging()) {
      res.divergence_verdict = SeriesVerdict::diverges;
      break;
    }
    const double term = std::exp(lr);
    total.add(term);
    if (i >= m) from_m.add(term);
    const double q = window.converging_ratio();
    if (q >= 0.0 && i >= m) {
      const double tail = term * q / (1.0 - q);
      // Relative to the sum from m, so that small p_m keep full relative accuracy.
      const double scale = m >= 1 ? from_m.value() : total.value();
      if (tail <= ctl.tol * scale) {
        res.divergence_verdict = SeriesVerdict::converges;
        res.truncation_error_bound = tail / (1.0 + total.value());
        break;
      }
    }
  }

  switch (res.divergence_verdict) {
    case SeriesVerdict::diverges:
      res.p_m = 1.0;
      break;
    case SeriesVerdict::converges:
      res.p_m = m == 0 ? 1.0 : from_m.value() / (1.0 + total.value());
      break;
    case SeriesVerdict::undetermined:
      res.p_m = std::nan("");
      break;
  }
  if (m == 0) res.p_m = 1.0;
  return res;
}

AbsorptionResult mean_absorption_time(const AveragedChain& chain, Count m,
                                      const SeriesControl& ctl) {
  check_control(ctl);
  if (m < 0) throw std::invalid_argument("mean_absorption_time: m must be nonnegative");
  AbsorptionResult res;
  res.m = m;

  // t_m = sum_j a_j R_{min(j,m)-1}, a_j = 1/(b_j rho_j), R_k = 1 + sum_{i<=k} rho_i,
  // which regroups the double sum by its inner index j.
  const double log_blowup = std::log(ctl.blowup);
  RatioWindow window(ctl);
  CompensatedSum log_rho_acc, t_sum;
  double log_R = 0.0;  // log R_{min(j,m)-1}, R_0 = 1
  double prev_log_a = 0.0;
  for (Count j = 1; j <= ctl.i_max; ++j) {
    const auto r = checked_rates(chain, j);
    log_rho_acc.add(std::log(r.death) - std::log(r.birth));
    const double lr = log_rho_acc.value();
    const double log_a = -lr - std::log(r.birth);
    res.time_terms_used = j;
    if (j > 1) window.push(std::exp(log_a - prev_log_a));
    prev_log_a = log_a;
    if (log_a > log_blowup || window.diverging()) {
      res.time_verdict = SeriesVerdict::diverges;
      break;
    }
    const double term = std::exp(log_a + log_R);
    t_sum.add(term);
    if (j <= m - 1) log_R = log_add_exp(log_R, lr);

    const double q = window.converging_ratio();
    if (q >= 0.0 && j >= m) {
      const double tail = term * q / (1.0 - q);
      if (tail <= ctl.tol * t_sum.value()) {
        res.time_verdict = SeriesVerdict::converges;
        res.time_truncation_bound = tail;
        break;
      }
    }
  }

  switch (res.time_verdict) {
    case SeriesVerdict::diverges:
      res.t_infinite = true;
      res.t_m = INFINITY;
      break;
    case SeriesVerdict::converges:
      res.t_m = t_sum.value();
      break;
    case SeriesVerdict::undetermined:
      res.t_m = std::nan("");
      break;
  }
  if (m == 0) {
    res.t_m = 0.0;
    res.t_infinite = false;
    res.time_truncation_bound = 0.0;
  }
  return res;
}

AbsorptionResult analyze_absorption(const AveragedChain& chain, Count m, const SeriesControl& ctl) {
  AbsorptionResult res = absorption_probability(chain, m, ctl);
  const AbsorptionResult t = mean_absorption_time(chain, m, ctl);
  res.t_m = t.t_m;
  res.t_infinite = t.t_infinite;
  res.time_verdict = t.time_verdict;
  res.time_terms_used = t.time_terms_used;
  res.time_truncation_bound = t.time_truncation_bound;
  return res;
}

namespace {

// Solves sub[i] u[i-1] + diag[i] u[i] + sup[i] u[i+1] = rhs[i] in place.
std::vector<double> thomas(std::vector<double> sub, std::vector<double> diag,
                           std::vector<double> sup, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      const double w = sub[i] / diag[i - 1];
      diag[i] -= w * sup[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    if (diag[i] == 0.0 || !std::isfinite(diag[i])) {
      throw std::domain_error("absorption linear system is singular; check the rates");
    }
  }
  std::vector<double> u(n);
  u[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) u[i] = (rhs[i] - sup[i] * u[i + 1]) / diag[i];
  return u;
}

}  // namespace

double absorption_time_linear_system(const AveragedChain& chain, Count m, Count M) {
  if (m < 0 || M <= m) throw std::invalid_argument("absorption_time_linear_system: need 0 <= m < M");
  if (m == 0) return 0.0;
  const auto size = static_cast<std::size_t>(M);
  std::vector<double> sub(size, 0.0), diag(size), sup(size, 0.0), rhs(size, 1.0);
  for (Count i = 1; i <= M; ++i) {
    const auto r = chain.rates(i);
    const auto row = static_cast<std::size_t>(i - 1);
    const double b = i < M ? r.birth : 0.0;
    diag[row] = b + r.death;
    if (i < M) sup[row] = -b;
    if (i > 1) sub[row] = -r.death;
  }
  return thomas(std::move(sub), std::move(diag), std::move(sup), std::move(rhs))
      [static_cast<std::size_t>(m - 1)];
}

double absorption_probability_linear_system(const AveragedChain& chain, Count m, Count M) {
  if (m < 0 || M <= m) {
    throw std::invalid_argument("absorption_probability_linear_system: need 0 <= m < M");
  }
  if (m == 0) return 1.0;
  const auto size = static_cast<std::size_t>(M - 1);  // unknowns p_1..p_{M-1}
  std::vector<double> sub(size, 0.0), diag(size), sup(size, 0.0), rhs(size, 0.0);
  for (Count i = 1; i < M; ++i) {
    const auto r = chain.rates(i);
    const auto row = static_cast<std::size_t>(i - 1);
    diag[row] = r.birth + r.death;
    if (i < M - 1) sup[row] = -r.birth;
    if (i > 1) {
      sub[row] = -r.death;
    } else {
      rhs[row] = r.death;  // p_0 = 1
    }
  }
  return thomas(std::move(sub), std::move(diag), std::move(sup), std::move(rhs))
      [static_cast<std::size_t>(m - 1)];
}

namespace {

template <class Solve>
OracleResult doubling(Solve solve, Count m, double rel_tol, Count M0, Count M_max) {
  OracleResult out;
  Count M = std::max(M0, m + 1);
  double prev = INFINITY;
  for (bool first = true; first || 2 * M <= M_max; first = false) {
    if (!first) M *= 2;
    out.M = M;
    try {
      out.value = solve(M);
    } catch (const std::domain_error&) {
      // Singular in floating point: the answer outgrew double range.
      out.value = INFINITY;
      break;
    }
    if (!first && std::abs(out.value - prev) <= rel_tol * std::abs(out.value)) {
      out.converged = true;
      break;
    }
    prev = out.value;
  }
  return out;
}

}  // namespace

OracleResult absorption_time_oracle(const AveragedChain& chain, Count m, double rel_tol, Count M0,
                                    Count M_max) {
  return doubling([&](Count M) { return absorption_time_linear_system(chain, m, M); }, m, rel_tol,
                  M0, M_max);
}

OracleResult absorption_probability_oracle(const AveragedChain& chain, Count m, double rel_tol,
                                           Count M0, Count M_max) {
  return doubling([&](Count M) { return absorption_probability_linear_system(chain, m, M); }, m,
                  rel_tol, M0, M_max);
}

}  // namespace hybridavg
