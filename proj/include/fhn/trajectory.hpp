#pragma once

#include <vector>

namespace fhn {

/// One row of a trajectory log. funnel_radius is +infinity while the
/// funnel is unbounded (phi = 0).
struct Sample {
  double t = 0.0;
  std::vector<double> y;
  std::vector<double> y_ref;
  double e_norm = 0.0;
  double funnel_radius = 0.0;
  std::vector<double> i_se;
  double v_l2 = 0.0;
  double u_l2 = 0.0;
  double margin = 1.0;

  bool operator==(const Sample&) const = default;
};

struct FieldSnapshot {
  double t = 0.0;
  std::vector<double> v;
  std::vector<double> u;

  bool operator==(const FieldSnapshot&) const = default;
};

struct TrajectoryLog {
  std::size_t outputs = 4;
  std::vector<Sample> samples;
  std::vector<FieldSnapshot> snapshots;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }

  /// Throws DomainError when times are not strictly increasing or a sample
  /// has the wrong number of output components.
  void validate() const;

  bool operator==(const TrajectoryLog&) const = default;
};

}  // namespace fhn
