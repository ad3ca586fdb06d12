#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fhn/trajectory.hpp"
#include "fhn/verify.hpp"

namespace fhn {

/// Shortest decimal that parses back to the same double; +inf is `inf`.
std::string format_double(double x);
/// Strict inverse of format_double. Throws FormatError.
double parse_double(std::string_view s);

extern const char* const kTrajectoryHeader;

std::string trajectory_to_csv(const TrajectoryLog& log);
/// Throws FormatError on a malformed header, a non-numeric cell or
/// non-increasing times.
TrajectoryLog trajectory_from_csv(const std::string& text);
void write_trajectory(const TrajectoryLog& log, const std::string& path);
TrajectoryLog read_trajectory(const std::string& path);

struct Snapshot {
  int nx = 0;
  int ny = 0;
  double t = 0.0;
  std::vector<double> v;
  std::vector<double> u;

  bool operator==(const Snapshot&) const = default;
};

/// Line 1: `nx ny t`, then one `v u` line per node in node order.
std::string snapshot_to_text(const Snapshot& s);
/// Throws FormatError naming expected and found node counts on mismatch.
Snapshot snapshot_from_text(const std::string& text);
void write_snapshot(const Snapshot& s, const std::string& path);
Snapshot read_snapshot(const std::string& path);

std::string reports_to_json(const std::vector<VerificationReport>& reports);
std::string reports_to_text(const std::vector<VerificationReport>& reports);

/// Writes to `path.tmp` and renames over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace fhn
