#include "hybridavg/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hybridavg/absorption.hpp"
#include "hybridavg/averaged.hpp"
#include "hybridavg/config.hpp"
#include "hybridavg/hybrid_sim.hpp"
#include "hybridavg/montecarlo.hpp"
#include "hybridavg/trajectory.hpp"

namespace hybridavg {

namespace {

constexpr std::uint64_t kDefaultSeed = 2015;

struct Flags {
  std::string config_path;
  std::vector<double> epsilons;
  std::vector<std::uint64_t> seeds;
  std::optional<Count> reps;
  std::optional<double> t_end;
  std::vector<Count> m_list;
  std::optional<double> tol;
  bool oracle = false;
  std::optional<unsigned> workers;
  std::optional<std::string> out_dir;
  bool strict = false;
};

std::optional<std::uint64_t> seed_from_env() {
  const char* env = std::getenv("HYBRIDAVG_SEED");
  if (!env || !*env) return std::nullopt;
  std::uint64_t v = 0;
  const std::string s(env);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError("HYBRIDAVG_SEED: expected an unsigned integer, got '" + s + "'");
  }
  return v;
}

// Flags override the config file; the seed falls back to the config, then to
// HYBRIDAVG_SEED, then to a fixed default.
RunConfig resolve(const Flags& f) {
  RunConfig cfg = f.config_path.empty() ? default_run_config() : load_run_config(f.config_path);
  if (!f.epsilons.empty()) {
    for (double e : f.epsilons) {
      if (!(e == 0.0 || (e > 0.0 && e <= 1.0))) {
        throw ConfigError("--epsilon: values must lie in (0, 1] or be 0");
      }
    }
    cfg.epsilons = f.epsilons;
  }
  if (!cfg.master_seed) cfg.master_seed = seed_from_env();
  if (!cfg.master_seed) cfg.master_seed = kDefaultSeed;
  if (!f.seeds.empty()) cfg.master_seed = f.seeds.front();
  if (f.reps) {
    if (*f.reps < 1) throw ConfigError("--reps: must be >= 1");
    cfg.replications = *f.reps;
  }
  if (f.t_end) {
    if (!(*f.t_end > 0.0)) throw ConfigError("--t-end: must be positive");
    cfg.t_end = *f.t_end;
    cfg.t_obs = *f.t_end;
  }
  if (!f.m_list.empty()) {
    for (Count m : f.m_list) {
      if (m < 0) throw ConfigError("--m: states must be nonnegative");
    }
    cfg.m_list = f.m_list;
  }
  if (f.tol) {
    if (!(*f.tol > 0.0)) throw ConfigError("--tol: must be positive");
    cfg.series_tol = *f.tol;
  }
  if (f.workers) cfg.workers = *f.workers;
  if (f.out_dir) cfg.out_dir = *f.out_dir;
  try {
    check_params(cfg.model);
    check_options(cfg.ode);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

std::filesystem::path prepare_out_dir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << contents;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

int cmd_simulate(const Flags& flags, std::ostream& out) {
  const RunConfig cfg = resolve(flags);
  const auto dir = prepare_out_dir(cfg);
  const std::vector<std::uint64_t> seeds =
      flags.seeds.empty() ? std::vector<std::uint64_t>{*cfg.master_seed} : flags.seeds;
  const ModelSpec model = chemostat_model(cfg.model);
  std::optional<AveragedChain> chain;

  for (double eps : cfg.epsilons) {
    for (std::uint64_t seed : seeds) {
      HybridTrajectory traj;
      if (eps == kAveragedTag) {
        if (!chain) chain.emplace(model);
        AveragedRecord rec;
        rec.reconstruct = true;
        traj = simulate_averaged(*chain, cfg.n0, cfg.t_end, seed, rec);
      } else {
        traj = simulate_hybrid(model, eps, cfg.x0, cfg.n0, cfg.t_end, seed, cfg.ode);
      }
      std::ostringstream csv;
      write_trajectory_csv(csv, traj);
      const auto path = dir / (cfg.trajectory_prefix + "_eps" + format_number(eps) + "_s" +
                               std::to_string(seed) + ".csv");
      write_file(path, csv.str());
      out << path.string() << ": " << traj.events.size() << " jumps, n(" << format_number(traj.t_final)
          << ") = " << traj.n_final;
      if (traj.absorbed_at) out << ", absorbed at t = " << format_number(*traj.absorbed_at);
      out << '\n';
    }
  }
  return kExitOk;
}

ExperimentConfig experiment_from(const RunConfig& cfg) {
  ExperimentConfig ex;
  ex.params = cfg.model;
  ex.epsilons = cfg.epsilons;
  ex.x0 = cfg.x0;
  ex.n0 = cfg.n0;
  ex.observable = cfg.observable;
  ex.t_obs = cfg.t_obs;
  ex.t_max = cfg.t_max;
  ex.replications = cfg.replications;
  ex.master_seed = *cfg.master_seed;
  ex.ode = cfg.ode;
  ex.workers = cfg.workers;
  return ex;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

int cmd_compare(const Flags& flags, std::ostream& out) {
  const RunConfig cfg = resolve(flags);
  const auto dir = prepare_out_dir(cfg);
  ExperimentConfig ex = experiment_from(cfg);
  std::vector<ReplicationSummary> summaries;
  try {
    summaries = run_experiment(ex);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  std::ostringstream csv;
  write_summary_csv(csv, summaries);
  const auto path = dir / (cfg.summary_prefix + ".csv");
  write_file(path, csv.str());

  const std::string label = cfg.observable == Observable::state_at_time
                                ? "mean n(" + format_number(cfg.t_obs) + ")"
                                : std::string("mean absorption time");
  const int width = 12;
  const auto label_width = static_cast<int>(std::max<std::size_t>(label.size(), 10) + 2);
  out << std::left << std::setw(label_width) << "epsilon";
  for (const auto& s : summaries) out << std::right << std::setw(width) << format_number(s.epsilon);
  out << '\n' << std::left << std::setw(label_width) << label;
  for (const auto& s : summaries) out << std::right << std::setw(width) << fixed(s.mean);
  out << '\n' << std::left << std::setw(label_width) << "std. error";
  for (const auto& s : summaries) {
    out << std::right << std::setw(width) << (s.se ? fixed(*s.se) : std::string("-"));
  }
  out << '\n';
  for (const auto& s : summaries) {
    if (s.censored > 0) {
      out << "epsilon " << format_number(s.epsilon) << ": " << s.censored
          << " runs censored at t_max\n";
    }
  }

  const bool has_avg = std::any_of(summaries.begin(), summaries.end(),
                                   [](const ReplicationSummary& s) { return s.epsilon == kAveragedTag; });
  if (has_avg && summaries.size() >= 2) {
    const ConvergenceReport report = compare_to_averaged(summaries);
    out << "\ngap to the averaged model:\n";
    for (const auto& g : report.gaps) {
      out << "  epsilon " << std::left << std::setw(8) << format_number(g.epsilon) << std::right
          << " |diff| = " << fixed(g.gap) << (g.ci_overlap ? "  (95% CIs overlap)" : "") << '\n';
    }
    out << "  gap nonincreasing as epsilon decreases: " << (report.monotone ? "yes" : "no") << '\n';
  }
  out << "summary written to " << path.string() << '\n';
  return kExitOk;
}

int cmd_absorb(const Flags& flags, std::ostream& out) {
  const RunConfig cfg = resolve(flags);
  const AveragedChain chain(chemostat_model(cfg.model));
  SeriesControl ctl;
  ctl.tol = cfg.series_tol;
  ctl.i_max = cfg.i_max;

  bool undetermined = false;
  std::ostringstream csv;
  csv << "m,p_m,p_verdict,rho_terms,p_bound,t_m,t_verdict,t_terms,t_bound"
      << (flags.oracle ? ",oracle_t_m,oracle_M,oracle_rel_err" : "") << '\n';

  out << std::left << std::setw(6) << "m" << std::setw(10) << "p_m" << std::setw(13) << "verdict"
      << std::setw(8) << "terms" << std::setw(16) << "t_m" << std::setw(13) << "verdict"
      << std::setw(8) << "terms" << std::setw(12) << "t bound";
  if (flags.oracle) out << std::setw(16) << "oracle t_m" << std::setw(12) << "rel. err";
  out << '\n';

  for (Count m : cfg.m_list) {
    const AbsorptionResult r = analyze_absorption(chain, m, ctl);
    if (m > 0 && (r.divergence_verdict == SeriesVerdict::undetermined ||
                  r.time_verdict == SeriesVerdict::undetermined)) {
      undetermined = true;
    }
    const std::string t_text = r.t_infinite ? std::string("inf") : fixed(r.t_m, 6);
    out << std::left << std::setw(6) << m << std::setw(10) << format_number(r.p_m) << std::setw(13)
        << to_string(r.divergence_verdict) << std::setw(8) << r.rho_terms_used << std::setw(16)
        << t_text << std::setw(13) << to_string(r.time_verdict) << std::setw(8) << r.time_terms_used
        << std::setw(12) << sci(r.time_truncation_bound);
    csv << m << ',' << format_number(r.p_m) << ',' << to_string(r.divergence_verdict) << ','
        << r.rho_terms_used << ',' << format_number(r.truncation_error_bound) << ','
        << format_number(r.t_m) << ',' << to_string(r.time_verdict) << ',' << r.time_terms_used
        << ',' << format_number(r.time_truncation_bound);
    if (flags.oracle) {
      const OracleResult o = m == 0 ? OracleResult{0.0, 0, true} : absorption_time_oracle(chain, m);
      const double rel = r.t_m == 0.0 ? std::abs(o.value) : std::abs(r.t_m - o.value) / std::abs(r.t_m);
      out << std::setw(16) << (o.converged ? fixed(o.value, 6) : std::string("no convergence"))
          << std::setw(12) << sci(rel);
      csv << ',' << format_number(o.value) << ',' << o.M << ',' << format_number(rel);
    }
    out << '\n';
    csv << '\n';
  }

  if (flags.out_dir) {
    const auto dir = prepare_out_dir(cfg);
    write_file(dir / "absorption.csv", csv.str());
  }
  if (undetermined && flags.strict) {
    throw std::runtime_error("undetermined series verdict (raise analysis.i_max?)");
  }
  return kExitOk;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "Run configuration file");
  sub->add_option("--epsilon", f.epsilons, "Time-scale (repeatable; 0 = averaged model)");
  sub->add_option("--seed", f.seeds, "Seed (repeatable for simulate)");
  sub->add_option("--workers", f.workers, "Worker threads (0 = all cores)");
  sub->add_option("--out", f.out_dir, "Output directory");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Slow-fast hybrid predator-prey simulation and averaging toolkit", "hybridavg"};
  app.require_subcommand(1);
  Flags f;

  auto* simulate = app.add_subcommand("simulate", "Write trajectory CSVs");
  add_common(simulate, f);
  simulate->add_option("--t-end", f.t_end, "Simulation horizon");

  auto* compare = app.add_subcommand("compare", "Monte Carlo comparison across epsilon values");
  add_common(compare, f);
  compare->add_option("--reps", f.reps, "Replications per epsilon");
  compare->add_option("--t-end", f.t_end, "Observation time");

  auto* absorb = app.add_subcommand("absorb", "Absorption probability and mean absorption time");
  absorb->add_option("--config", f.config_path, "Run configuration file");
  absorb->add_option("--m", f.m_list, "Initial state (repeatable)");
  absorb->add_option("--tol", f.tol, "Series truncation tolerance");
  absorb->add_flag("--oracle", f.oracle, "Cross-check with the tridiagonal linear system");
  absorb->add_flag("--strict", f.strict, "Fail on undetermined verdicts");
  absorb->add_option("--out", f.out_dir, "Also write absorption.csv here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(f, out);
    if (compare->parsed()) return cmd_compare(f, out);
    return cmd_absorb(f, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace hybridavg
