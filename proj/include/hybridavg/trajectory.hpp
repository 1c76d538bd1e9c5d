#ifndef HYBRIDAVG_TRAJECTORY_HPP
#define HYBRIDAVG_TRAJECTORY_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hybridavg/model.hpp"

namespace hybridavg {

enum class JumpKind { birth, death };

std::string_view to_string(JumpKind kind);

struct Sample {
  double t = 0.0;
  double x = 0.0;  ///< NaN when the fast variable is not tracked
  Count n = 0;
};

struct JumpEvent {
  double t = 0.0;
  Count n_before = 0;
  Count n_after = 0;
  JumpKind kind = JumpKind::birth;
  double x = 0.0;  ///< fast variable at the jump, NaN when not tracked
};

/// Piecewise path of (t, x, n). Samples have strictly increasing t and carry
/// the post-jump n; jumps are listed separately in `events`.
struct HybridTrajectory {
  std::vector<Sample> samples;
  std::vector<JumpEvent> events;
  /// Time-scale of the run; 0 tags the averaged process.
  double epsilon = 1.0;
  std::optional<double> absorbed_at;
  /// Counts are reported as n / n_scale (the rescaled process uses N).
  double n_scale = 1.0;
  /// Time at which the simulation stopped.
  double t_final = 0.0;
  /// Counts at t_final.
  Count n_final = 0;
  double x_final = 0.0;

  bool averaged() const { return epsilon == 0.0; }
  /// n at time t (right-continuous), using the event list.
  Count n_at(double t) const;
};

/// Writes the `t,x,n,event` CSV: one row per sample and per event, sorted by
/// t. Numbers use the shortest round-trip representation; an untracked x is
/// written as an empty field.
void write_trajectory_csv(std::ostream& os, const HybridTrajectory& traj);

struct CsvRow {
  double t = 0.0;
  std::optional<double> x;
  double n = 0.0;
  std::string event;
};

/// Parses a trajectory CSV, checking the header and every field. Throws
/// std::runtime_error naming the offending line.
std::vector<CsvRow> read_trajectory_csv(std::istream& is);

/// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

}  // namespace hybridavg

#endif  // HYBRIDAVG_TRAJECTORY_HPP
