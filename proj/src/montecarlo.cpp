#include "hybridavg/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "hybridavg/absorption.hpp"
#include "hybridavg/averaged.hpp"
#include "hybridavg/hybrid_sim.hpp"
#include "hybridavg/rng.hpp"
#include "hybridavg/summation.hpp"
#include "hybridavg/trajectory.hpp"

namespace hybridavg {

void validate(const ExperimentConfig& c) {
  check_params(c.params);
  check_options(c.ode);
  if (c.epsilons.empty()) throw std::invalid_argument("experiment: epsilon list is empty");
  for (double e : c.epsilons) {
    if (!(e == kAveragedTag || (e > 0.0 && e <= 1.0))) {
      throw std::invalid_argument("experiment: epsilon values must lie in (0, 1] or be 0");
    }
  }
  if (!(c.x0 > 0.0)) throw std::invalid_argument("experiment: x0 must be positive");
  if (c.n0 < 0) throw std::invalid_argument("experiment: n0 must be nonnegative");
  if (c.replications < 1) throw std::invalid_argument("experiment: replications must be >= 1");
  if (c.observable == Observable::state_at_time && !(c.t_obs > 0.0)) {
    throw std::invalid_argument("experiment: t_obs must be positive");
  }
  if (c.t_max && !(*c.t_max > 0.0)) throw std::invalid_argument("experiment: t_max must be positive");
}

ReplicationSummary summarize(double epsilon, const std::vector<double>& values, Count censored) {
  ReplicationSummary s;
  s.epsilon = epsilon;
  s.count = static_cast<Count>(values.size());
  s.censored = censored;
  if (values.empty()) {
    const double nan = std::nan("");
    s.mean = s.min = s.q1 = s.median = s.q3 = s.max = nan;
    return s;
  }
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  s.mean = sum.value() / static_cast<double>(values.size());
  if (values.size() > 1) {
    CompensatedSum sq;
    for (double v : values) sq.add((v - s.mean) * (v - s.mean));
    s.sd = std::sqrt(sq.value() / static_cast<double>(values.size() - 1));
    s.se = *s.sd / std::sqrt(static_cast<double>(values.size()));
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  s.min = sorted.front();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.max = sorted.back();
  return s;
}

namespace {

double resolve_cutoff(const ExperimentConfig& c, const AveragedChain& chain) {
  if (c.t_max) return *c.t_max;
  if (c.n0 == 0) return kDefaultAbsorptionCutoff;
  const AbsorptionResult r = absorption_probability(chain, c.n0);
  if (r.divergence_verdict != SeriesVerdict::diverges) {
    throw std::invalid_argument(
        "experiment: absorption is not certain for this model (p_m < 1 or undetermined); "
        "set an explicit t_max cutoff");
  }
  return kDefaultAbsorptionCutoff;
}

template <class Task>
void parallel_for(Count count, unsigned workers, Task task) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<Count>(workers, count));
  if (workers <= 1) {
    for (Count i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<Count> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (Count i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<double> run_replications(const ExperimentConfig& c, std::size_t tag_index,
                                     Count* censored) {
  validate(c);
  if (tag_index >= c.epsilons.size()) throw std::out_of_range("run_replications: bad tag index");
  const double epsilon = c.epsilons[tag_index];
  const ModelSpec model = chemostat_model(c.params);
  const AveragedChain chain(model);

  const bool absorption = c.observable == Observable::absorption_time;
  const double horizon = absorption ? resolve_cutoff(c, chain) : c.t_obs;

  RecordOptions record;
  record.mode = Recording::endpoints;
  record.events = false;
  record.continue_after_absorption = false;
  AveragedRecord avg_record;
  avg_record.events = false;

  const double nan = std::nan("");
  std::vector<double> raw(static_cast<std::size_t>(c.replications), nan);
  parallel_for(c.replications, c.workers, [&](Count i) {
    const std::uint64_t seed =
        stream_seed(c.master_seed, {static_cast<std::uint64_t>(tag_index), static_cast<std::uint64_t>(i)});
    const HybridTrajectory traj =
        epsilon == kAveragedTag
            ? simulate_averaged(chain, c.n0, horizon, seed, avg_record)
            : simulate_hybrid(model, epsilon, c.x0, c.n0, horizon, seed, c.ode, record);
    double value = nan;
    if (!absorption) {
      value = static_cast<double>(traj.n_final);
    } else if (traj.absorbed_at) {
      value = *traj.absorbed_at;
    }
    raw[static_cast<std::size_t>(i)] = value;
  });

  std::vector<double> values;
  values.reserve(raw.size());
  Count cut = 0;
  for (double v : raw) {
    if (std::isnan(v)) {
      ++cut;
    } else {
      values.push_back(v);
    }
  }
  if (censored) *censored = cut;
  return values;
}

std::vector<ReplicationSummary> run_experiment(const ExperimentConfig& c) {
  validate(c);
  std::vector<ReplicationSummary> out;
  for (std::size_t k = 0; k < c.epsilons.size(); ++k) {
    Count censored = 0;
    const auto values = run_replications(c, k, &censored);
    ReplicationSummary s = summarize(c.epsilons[k], values, censored);
    s.first_replication = 0;
    s.last_replication = static_cast<std::uint64_t>(c.replications - 1);
    out.push_back(s);
  }
  return out;
}

ConvergenceReport compare_to_averaged(const std::vector<ReplicationSummary>& summaries) {
  const auto avg = std::find_if(summaries.begin(), summaries.end(),
                                [](const ReplicationSummary& s) { return s.epsilon == kAveragedTag; });
  if (avg == summaries.end() || summaries.size() < 2) {
    throw std::invalid_argument("compare_to_averaged: need the averaged tag and another epsilon");
  }
  auto half_width = [](const ReplicationSummary& s) { return 1.96 * s.se.value_or(0.0); };

  ConvergenceReport report;
  for (const auto& s : summaries) {
    if (&s == &*avg) continue;
    GapEntry g;
    g.epsilon = s.epsilon;
    g.gap = std::abs(s.mean - avg->mean);
    g.ci_overlap = g.gap <= half_width(s) + half_width(*avg);
    report.gaps.push_back(g);
  }
  std::stable_sort(report.gaps.begin(), report.gaps.end(),
                   [](const GapEntry& a, const GapEntry& b) { return a.epsilon > b.epsilon; });
  report.monotone = std::is_sorted(report.gaps.begin(), report.gaps.end(),
                                   [](const GapEntry& a, const GapEntry& b) { return b.gap < a.gap; });
  return report;
}

void write_summary_csv(std::ostream& os, const std::vector<ReplicationSummary>& summaries) {
  os << "epsilon,count,mean,sd,se,min,q1,median,q3,max,censored\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& s : summaries) {
    os << format_number(s.epsilon) << ',' << s.count << ',' << format_number(s.mean) << ','
       << opt(s.sd) << ',' << opt(s.se) << ',' << format_number(s.min) << ','
       << format_number(s.q1) << ',' << format_number(s.median) << ',' << format_number(s.q3)
       << ',' << format_number(s.max) << ',' << s.censored << '\n';
  }
}

}  // namespace hybridavg
