#pragma once

#include <span>
#include <utility>
#include <vector>

#include "fhn/mesh.hpp"

namespace fhn {

struct TimeWindow {
  double start = 0.0;
  double end = 0.0;

  bool operator==(const TimeWindow&) const = default;
};

/// Indicator of [a, b] convolved with the unit-area triangular kernel of
/// half-width `halfwidth`: quadratic ramps around both edges, exactly 1 on
/// [a + hw, b - hw], exactly 0 outside [a - hw, b + hw].
/// Throws DomainError unless 0 < halfwidth < (b - a)/2.
double smoothed_window(double t, TimeWindow w, double halfwidth);

/// Nodal indicator of the closed disc |x - center|^2 <= r_sq.
std::vector<double> disc_mask(const Mesh& mesh, Point center, double r_sq);

/// Nodal indicator of the closed axis-aligned box [x0,x1] x [y0,y1].
std::vector<double> box_mask(const Mesh& mesh, double x0, double x1, double y0,
                             double y1);

/// Region a stimulus is applied to. Kept geometric so that both the FEM and
/// the spectral discretization can project it.
struct StimulusRegion {
  enum class Shape { Disc, Box } shape = Shape::Disc;
  Point center{0.5, 0.5};
  double r_sq = 0.0225;
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;

  bool contains(double x, double y) const;
  std::vector<double> nodal_mask(const Mesh& mesh) const;

  static StimulusRegion disc(Point c, double r_sq);
  static StimulusRegion box(double x0, double x1, double y0, double y1);

  bool operator==(const StimulusRegion&) const = default;
};

/// One spatial pattern switched on during a set of smoothed time windows:
/// I(t, x) = amplitude * region(x) * sum_w smoothed_window(t, w, hw).
struct StimulusPulse {
  double amplitude = 101.0;
  StimulusRegion region{};
  std::vector<TimeWindow> windows;
  double smoothing_halfwidth = 0.5;

  double profile(double t) const;
  /// Times where the smoothed profile is not smooth.
  std::vector<double> breakpoints() const;

  bool operator==(const StimulusPulse&) const = default;
};

/// Intracellular stimulation current: a sum of pulses. The canonical
/// reference program is 101 on the disc (x-1/2)^2+(y-1/2)^2 <= 0.0225
/// during [49,51] and [299,301], smoothed with half-width 0.5.
struct StimulusProgram {
  std::vector<StimulusPulse> pulses;

  static StimulusProgram reference_default();

  /// Windows disjoint and increasing; smoothing admissible.
  void validate() const;
  bool empty() const { return pulses.empty(); }
  std::vector<double> breakpoints() const;

  bool operator==(const StimulusProgram&) const = default;
};

}  // namespace fhn
