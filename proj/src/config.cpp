#include "hybridavg/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace hybridavg {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

struct Context {
  const std::string& source;
  int line;
  const std::string& key;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + key + ": " + what);
  }
};

double to_double(const std::string& s, const Context& ctx) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    ctx.fail("expected a finite number, got '" + s + "'");
  }
  return v;
}

double to_positive(const std::string& s, const Context& ctx) {
  const double v = to_double(s, ctx);
  if (!(v > 0.0)) ctx.fail("must be strictly positive, got '" + s + "'");
  return v;
}

template <class Int>
Int to_integer(const std::string& s, const Context& ctx) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    ctx.fail("expected an integer, got '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

}  // namespace

RunConfig default_run_config() { return RunConfig{}; }

RunConfig parse_run_config(std::istream& is, const std::string& source) {
  RunConfig cfg;
  using Handler = std::function<void(const std::string&, const Context&)>;
  const std::map<std::string, Handler> handlers = {
      {"model.x_in", [&](auto& v, auto& c) { cfg.model.x_in = to_positive(v, c); }},
      {"model.D", [&](auto& v, auto& c) { cfg.model.D = to_positive(v, c); }},
      {"model.V", [&](auto& v, auto& c) { cfg.model.V = to_positive(v, c); }},
      {"model.alpha", [&](auto& v, auto& c) { cfg.model.alpha = to_positive(v, c); }},
      {"model.beta", [&](auto& v, auto& c) { cfg.model.beta = to_positive(v, c); }},
      {"model.gamma", [&](auto& v, auto& c) { cfg.model.gamma = to_positive(v, c); }},
      {"model.mu_max", [&](auto& v, auto& c) { cfg.model.mu_max = to_positive(v, c); }},
      {"model.mu_half", [&](auto& v, auto& c) { cfg.model.mu_half = to_positive(v, c); }},
      {"simulation.epsilon",
       [&](auto& v, auto& c) {
         cfg.epsilons.clear();
         for (const auto& item : split_list(v)) {
           const double e = to_double(item, c);
           if (!(e == 0.0 || (e > 0.0 && e <= 1.0))) c.fail("values must lie in (0, 1] or be 0");
           cfg.epsilons.push_back(e);
         }
         if (cfg.epsilons.empty()) c.fail("list is empty");
       }},
      {"simulation.x0", [&](auto& v, auto& c) { cfg.x0 = to_positive(v, c); }},
      {"simulation.n0",
       [&](auto& v, auto& c) {
         cfg.n0 = to_integer<Count>(v, c);
         if (cfg.n0 < 0) c.fail("must be nonnegative");
       }},
      {"simulation.t_end", [&](auto& v, auto& c) { cfg.t_end = to_positive(v, c); }},
      {"simulation.t_obs", [&](auto& v, auto& c) { cfg.t_obs = to_positive(v, c); }},
      {"simulation.t_max", [&](auto& v, auto& c) { cfg.t_max = to_positive(v, c); }},
      {"simulation.observable",
       [&](auto& v, auto& c) {
         if (v == "state") {
           cfg.observable = Observable::state_at_time;
         } else if (v == "absorption") {
           cfg.observable = Observable::absorption_time;
         } else {
           c.fail("expected 'state' or 'absorption', got '" + v + "'");
         }
       }},
      {"simulation.replications",
       [&](auto& v, auto& c) {
         cfg.replications = to_integer<Count>(v, c);
         if (cfg.replications < 1) c.fail("must be >= 1");
       }},
      {"simulation.master_seed",
       [&](auto& v, auto& c) { cfg.master_seed = to_integer<std::uint64_t>(v, c); }},
      {"simulation.workers", [&](auto& v, auto& c) { cfg.workers = to_integer<unsigned>(v, c); }},
      {"simulation.method",
       [&](auto& v, auto& c) {
         if (v == "adaptive") {
           cfg.ode.method = OdeMethod::adaptive;
         } else if (v == "rk4") {
           cfg.ode.method = OdeMethod::rk4;
         } else {
           c.fail("expected 'adaptive' or 'rk4', got '" + v + "'");
         }
       }},
      {"simulation.dt0", [&](auto& v, auto& c) { cfg.ode.dt0 = to_positive(v, c); }},
      {"simulation.rel_tol", [&](auto& v, auto& c) { cfg.ode.rel_tol = to_positive(v, c); }},
      {"simulation.abs_tol", [&](auto& v, auto& c) { cfg.ode.abs_tol = to_positive(v, c); }},
      {"simulation.hazard_tol", [&](auto& v, auto& c) { cfg.ode.hazard_tol = to_positive(v, c); }},
      {"analysis.m",
       [&](auto& v, auto& c) {
         cfg.m_list.clear();
         for (const auto& item : split_list(v)) {
           const auto m = to_integer<Count>(item, c);
           if (m < 0) c.fail("states must be nonnegative");
           cfg.m_list.push_back(m);
         }
         if (cfg.m_list.empty()) c.fail("list is empty");
       }},
      {"analysis.series_tol", [&](auto& v, auto& c) { cfg.series_tol = to_positive(v, c); }},
      {"analysis.i_max",
       [&](auto& v, auto& c) {
         cfg.i_max = to_integer<Count>(v, c);
         if (cfg.i_max < 1) c.fail("must be >= 1");
       }},
      {"output.directory",
       [&](auto& v, auto& c) {
         if (v.empty()) c.fail("must not be empty");
         cfg.out_dir = v;
       }},
      {"output.trajectory_prefix", [&](auto& v, auto&) { cfg.trajectory_prefix = v; }},
      {"output.summary_prefix", [&](auto& v, auto&) { cfg.summary_prefix = v; }},
  };

  std::set<std::string> seen;
  std::string section;
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(source + ":" + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section != "model" && section != "simulation" && section != "analysis" &&
          section != "output") {
        throw ConfigError(source + ":" + std::to_string(lineno) + ": unknown section [" +
                          section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = section + "." + trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const Context ctx{source, lineno, key};
    if (section.empty()) ctx.fail("key outside of any section");
    const auto handler = handlers.find(key);
    if (handler == handlers.end()) ctx.fail("unknown key");
    if (!seen.insert(key).second) ctx.fail("duplicate key");
    handler->second(value, ctx);
  }

  for (const char* required : {"model.x_in", "model.D", "model.V", "model.alpha", "model.beta",
                               "model.gamma", "model.mu_max", "model.mu_half"}) {
    if (!seen.count(required)) {
      throw ConfigError(source + ": missing required key " + required);
    }
  }
  if (!seen.count("simulation.t_obs") && seen.count("simulation.t_end")) cfg.t_obs = cfg.t_end;
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return parse_run_config(in, path);
}

}  // namespace hybridavg
