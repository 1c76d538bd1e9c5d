#ifndef HYBRIDAVG_ABSORPTION_HPP
#define HYBRIDAVG_ABSORPTION_HPP

#include <string_view>

#include "hybridavg/averaged.hpp"

namespace hybridavg {

enum class SeriesVerdict { diverges, converges, undetermined };

std::string_view to_string(SeriesVerdict v);

/// Decision rule for the infinite series in the absorption formulas.
///
/// A series is convergent once the last `window` term ratios are all
/// <= converge_ratio and the geometric tail bound term * r / (1 - r) is
/// <= tol * partial sum; divergent once `window` consecutive ratios are
/// >= diverge_ratio or a term exceeds blowup. Anything else after i_max
/// terms is undetermined.
struct SeriesControl {
  double tol = 1e-12;
  Count i_max = 100000;
  int window = 20;
  double converge_ratio = 0.999;
  double diverge_ratio = 1.001;
  double blowup = 1e12;
};

struct AbsorptionResult {
  Count m = 0;

  double p_m = 1.0;
  SeriesVerdict divergence_verdict = SeriesVerdict::undetermined;  ///< of sum rho_i
  Count rho_terms_used = 0;
  double truncation_error_bound = 0.0;  ///< on p_m

  double t_m = 0.0;
  bool t_infinite = false;
  SeriesVerdict time_verdict = SeriesVerdict::undetermined;  ///< of sum 1/(b_i rho_i)
  Count time_terms_used = 0;
  double time_truncation_bound = 0.0;  ///< on t_m
};

/// log rho_i = sum_{k<=i} log(d_k / b_k). Throws std::domain_error if some
/// b_k, k <= i, vanishes.
double log_rho(const AveragedChain& chain, Count i);

/// rho_i; may overflow to +inf where log_rho does not.
double rho(const AveragedChain& chain, Count i);

/// Probability of absorption at 0 from m: 1 if sum rho_i diverges, else
/// sum_{i>=m} rho_i / (1 + sum_{i>=1} rho_i). Fills the p_m fields only.
AbsorptionResult absorption_probability(const AveragedChain& chain, Count m,
                                        const SeriesControl& ctl = {});

/// Mean absorption time from m,
///   t_m = sum_{i>=1} 1/(b_i rho_i) + sum_{k=1}^{m-1} rho_k sum_{j>=k+1} 1/(b_j rho_j),
/// evaluated in log space. Fills the t_m fields only; t_infinite is set when
/// the inner series diverges.
AbsorptionResult mean_absorption_time(const AveragedChain& chain, Count m,
                                      const SeriesControl& ctl = {});

/// Both of the above.
AbsorptionResult analyze_absorption(const AveragedChain& chain, Count m,
                                    const SeriesControl& ctl = {});

/// First-step equations for the mean absorption time on {0..M} with births
/// suppressed at M, solved by the Thomas algorithm. Returns t_m.
double absorption_time_linear_system(const AveragedChain& chain, Count m, Count M);

/// Absorption probability on {0..M} with p_0 = 1 and p_M = 0 (escape).
double absorption_probability_linear_system(const AveragedChain& chain, Count m, Count M);

struct OracleResult {
  double value = 0.0;
  Count M = 0;
  bool converged = false;
};

/// Doubles the truncation state from M0 until two successive answers agree
/// to rel_tol, or M would exceed M_max. A system that turns singular while
/// doubling ends the search unconverged with value +inf.
OracleResult absorption_time_oracle(const AveragedChain& chain, Count m, double rel_tol = 1e-8,
                                    Count M0 = 64, Count M_max = Count{1} << 22);
OracleResult absorption_probability_oracle(const AveragedChain& chain, Count m,
                                           double rel_tol = 1e-10, Count M0 = 64,
                                           Count M_max = Count{1} << 22);

}  // namespace hybridavg

#endif  // HYBRIDAVG_ABSORPTION_HPP
