#include "hybridavg/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hybridavg {

std::string_view to_string(JumpKind kind) {
  return kind == JumpKind::birth ? "birth" : "death";
}

Count HybridTrajectory::n_at(double t) const {
  Count n = samples.empty() ? n_final : samples.front().n;
  for (const auto& e : events) {
    if (e.t > t) break;
    n = e.n_after;
  }
  return n;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string format_count(Count n, double scale) {
  if (scale == 1.0) return std::to_string(n);
  return format_number(static_cast<double>(n) / scale);
}

std::string format_x(double x) { return std::isnan(x) ? std::string() : format_number(x); }

double parse_double(std::string_view s, std::size_t line, const char* what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("trajectory CSV line " + std::to_string(line) + ": bad " + what +
                             " field '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const HybridTrajectory& traj) {
  os << "t,x,n,event\n";
  std::size_t ei = 0;
  auto write_event = [&](const JumpEvent& e) {
    os << format_number(e.t) << ',' << format_x(e.x) << ','
       << format_count(e.n_after, traj.n_scale) << ',' << to_string(e.kind) << '\n';
  };
  for (const auto& s : traj.samples) {
    while (ei < traj.events.size() && traj.events[ei].t < s.t) write_event(traj.events[ei++]);
    os << format_number(s.t) << ',' << format_x(s.x) << ',' << format_count(s.n, traj.n_scale)
       << ",\n";
  }
  while (ei < traj.events.size()) write_event(traj.events[ei++]);
}

std::vector<CsvRow> read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "t,x,n,event") {
    throw std::runtime_error("trajectory CSV line 1: expected header 't,x,n,event'");
  }
  std::vector<CsvRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 4) {
      throw std::runtime_error("trajectory CSV line " + std::to_string(lineno) +
                               ": expected 4 fields");
    }
    CsvRow row;
    row.t = parse_double(fields[0], lineno, "t");
    if (!fields[1].empty()) row.x = parse_double(fields[1], lineno, "x");
    row.n = parse_double(fields[2], lineno, "n");
    row.event = std::string(fields[3]);
    if (row.event != "" && row.event != "birth" && row.event != "death") {
      throw std::runtime_error("trajectory CSV line " + std::to_string(lineno) +
                               ": unknown event '" + row.event + "'");
    }
    if (!rows.empty() && row.t < rows.back().t) {
      throw std::runtime_error("trajectory CSV line " + std::to_string(lineno) +
                               ": t is not sorted");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace hybridavg
