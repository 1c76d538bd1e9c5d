#ifndef HYBRIDAVG_CONFIG_HPP
#define HYBRIDAVG_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybridavg/model.hpp"
#include "hybridavg/montecarlo.hpp"
#include "hybridavg/ode.hpp"

namespace hybridavg {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Contents of a run configuration file.
///
/// The format is sectioned key-value text:
///
///     # comment
///     [model]
///     x_in = 7
///     [simulation]
///     epsilon = 1, 0.5, 0.1, 0
///
/// All eight [model] keys are required. Other sections are optional and fall
/// back to the defaults below.
struct RunConfig {
  ModelParams model;

  std::vector<double> epsilons{1.0, 0.5, 0.1, 0.0};
  double x0 = 10.0;
  Count n0 = 30;
  double t_end = 20.0;  ///< trajectory horizon
  double t_obs = 20.0;  ///< observation time for the state observable
  std::optional<double> t_max;
  Observable observable = Observable::state_at_time;
  Count replications = 10000;
  std::optional<std::uint64_t> master_seed;
  OdeOptions ode;
  unsigned workers = 0;

  std::vector<Count> m_list{1, 5, 10, 30};
  double series_tol = 1e-12;
  Count i_max = 100000;

  std::string out_dir = ".";
  std::string trajectory_prefix = "traj";
  std::string summary_prefix = "summary";
};

/// Parses a configuration. `source` is used in error messages, which name
/// the line and the offending `section.key`. Throws ConfigError.
RunConfig parse_run_config(std::istream& is, const std::string& source = "<config>");

/// Reads and parses a file. Throws ConfigError.
RunConfig load_run_config(const std::string& path);

/// Reference configuration used when no file is given.
RunConfig default_run_config();

}  // namespace hybridavg

#endif  // HYBRIDAVG_CONFIG_HPP
