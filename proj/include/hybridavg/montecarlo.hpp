#ifndef HYBRIDAVG_MONTECARLO_HPP
#define HYBRIDAVG_MONTECARLO_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hybridavg/model.hpp"
#include "hybridavg/ode.hpp"

namespace hybridavg {

enum class Observable {
  state_at_time,    ///< n at t_obs
  absorption_time,  ///< first time n hits 0
};

inline constexpr double kAveragedTag = 0.0;
inline constexpr double kDefaultAbsorptionCutoff = 1e6;

struct ExperimentConfig {
  ModelParams params;
  /// Values in (0, 1]; kAveragedTag (0) selects the averaged chain.
  std::vector<double> epsilons{1.0, 0.5, 0.1, kAveragedTag};
  double x0 = 10.0;
  Count n0 = 30;
  Observable observable = Observable::state_at_time;
  double t_obs = 20.0;
  /// Cutoff for absorption-time runs. When unset, 1e6 is used for chains
  /// that are absorbed with probability one, and an error is raised otherwise.
  std::optional<double> t_max;
  Count replications = 10000;
  std::uint64_t master_seed = 2015;
  OdeOptions ode;
  /// Worker threads; 0 means hardware concurrency.
  unsigned workers = 0;
};

/// Throws std::invalid_argument on a bad config.
void validate(const ExperimentConfig& config);

struct ReplicationSummary {
  double epsilon = 0.0;
  Count count = 0;  ///< uncensored replications
  double mean = 0.0;
  std::optional<double> sd;  ///< undefined for count < 2
  std::optional<double> se;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  Count censored = 0;
  std::uint64_t first_replication = 0;
  std::uint64_t last_replication = 0;
};

/// Aggregates draws in the given order. Quantiles use linear interpolation
/// between order statistics.
ReplicationSummary summarize(double epsilon, const std::vector<double>& values,
                             Count censored = 0);

/// Runs every epsilon tag. Replication i of tag k draws from
/// stream_seed(master_seed, {k, i}); the summaries do not depend on the
/// number of workers.
std::vector<ReplicationSummary> run_experiment(const ExperimentConfig& config);

/// Raw observable values for one tag (censored runs excluded), in
/// replication order. `censored` receives the number of cut-off runs.
std::vector<double> run_replications(const ExperimentConfig& config, std::size_t tag_index,
                                     Count* censored = nullptr);

struct GapEntry {
  double epsilon = 0.0;
  double gap = 0.0;  ///< |mean(epsilon) - mean(averaged)|
  bool ci_overlap = false;  ///< 95% normal intervals intersect
};

struct ConvergenceReport {
  std::vector<GapEntry> gaps;  ///< ordered by decreasing epsilon
  bool monotone = false;       ///< gap nonincreasing as epsilon decreases
};

/// Throws std::invalid_argument unless the summaries include the averaged
/// tag and at least one other epsilon.
ConvergenceReport compare_to_averaged(const std::vector<ReplicationSummary>& summaries);

/// `epsilon,count,mean,sd,se,min,q1,median,q3,max,censored`
void write_summary_csv(std::ostream& os, const std::vector<ReplicationSummary>& summaries);

}  // namespace hybridavg

#endif  // HYBRIDAVG_MONTECARLO_HPP
