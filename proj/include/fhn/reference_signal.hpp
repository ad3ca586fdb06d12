#pragma once

#include <span>
#include <vector>

#include "fhn/trajectory.hpp"

namespace fhn {

/// C^1 piecewise-cubic Hermite interpolant of a sampled output trajectory.
/// Node slopes are second-order finite differences (one-sided at the ends).
class ReferenceSignal {
 public:
  /// Identically zero reference defined for all t.
  static ReferenceSignal zero(std::size_t outputs);

  /// Interpolates the `y` columns of an (open-loop) log.
  static ReferenceSignal from_log(const TrajectoryLog& log);

  ReferenceSignal(std::vector<double> times, std::vector<std::vector<double>> values);

  std::size_t outputs() const { return outputs_; }
  double t_begin() const;
  double t_end() const;
  bool covers(double t0, double t1) const;

  /// Throws DomainError outside [t_begin, t_end].
  void eval(double t, std::span<double> out) const;
  std::vector<double> eval(double t) const;

  /// sup_t |y_ref(t)| over the nodes (Euclidean norm in R^m).
  double sup_norm() const;

 private:
  ReferenceSignal() = default;
  std::size_t outputs_ = 0;
  bool constant_zero_ = false;
  std::vector<double> times_;
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<double>> slopes_;
};

}  // namespace fhn
