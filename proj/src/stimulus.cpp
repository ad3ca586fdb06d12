#include "fhn/stimulus.hpp"

#include <algorithm>
#include <string>

#include "fhn/errors.hpp"

namespace fhn {

namespace {

// CDF of the unit-area triangular kernel on [-h, h].
double ramp(double s, double h) {
  if (s <= -h) return 0.0;
  if (s >= h) return 1.0;
  const double inv = 1.0 / (2.0 * h * h);
  if (s <= 0.0) return (s + h) * (s + h) * inv;
  return 1.0 - (h - s) * (h - s) * inv;
}

}  // namespace

double smoothed_window(double t, TimeWindow w, double halfwidth) {
  if (!(halfwidth > 0.0) || !(halfwidth < 0.5 * (w.end - w.start))) {
    throw DomainError("smoothed_window: need 0 < halfwidth < (b - a)/2, got halfwidth " +
                      std::to_string(halfwidth) + " for window [" +
                      std::to_string(w.start) + ", " + std::to_string(w.end) + "]");
  }
  if (t <= w.start - halfwidth || t >= w.end + halfwidth) return 0.0;
  if (t >= w.start + halfwidth && t <= w.end - halfwidth) return 1.0;
  return ramp(t - w.start, halfwidth) - ramp(t - w.end, halfwidth);
}

std::vector<double> disc_mask(const Mesh& mesh, Point center, double r_sq) {
  return StimulusRegion::disc(center, r_sq).nodal_mask(mesh);
}

std::vector<double> box_mask(const Mesh& mesh, double x0, double x1, double y0,
                             double y1) {
  return StimulusRegion::box(x0, x1, y0, y1).nodal_mask(mesh);
}

StimulusRegion StimulusRegion::disc(Point c, double r_sq) {
  StimulusRegion r;
  r.shape = Shape::Disc;
  r.center = c;
  r.r_sq = r_sq;
  return r;
}

StimulusRegion StimulusRegion::box(double x0, double x1, double y0, double y1) {
  StimulusRegion r;
  r.shape = Shape::Box;
  r.x0 = x0;
  r.x1 = x1;
  r.y0 = y0;
  r.y1 = y1;
  return r;
}

bool StimulusRegion::contains(double x, double y) const {
  if (shape == Shape::Disc) {
    const double dx = x - center.x;
    const double dy = y - center.y;
    return dx * dx + dy * dy <= r_sq;
  }
  return x >= x0 && x <= x1 && y >= y0 && y <= y1;
}

std::vector<double> StimulusRegion::nodal_mask(const Mesh& mesh) const {
  std::vector<double> mask(mesh.num_nodes());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = contains(mesh.nodes()[i].x, mesh.nodes()[i].y) ? 1.0 : 0.0;
  }
  return mask;
}

double StimulusPulse::profile(double t) const {
  double p = 0.0;
  for (const auto& w : windows) p += smoothed_window(t, w, smoothing_halfwidth);
  return p;
}

std::vector<double> StimulusPulse::breakpoints() const {
  std::vector<double> b;
  for (const auto& w : windows) {
    for (double edge : {w.start, w.end}) {
      b.push_back(edge - smoothing_halfwidth);
      b.push_back(edge);
      b.push_back(edge + smoothing_halfwidth);
    }
  }
  return b;
}

StimulusProgram StimulusProgram::reference_default() {
  StimulusPulse p;
  p.amplitude = 101.0;
  p.region = StimulusRegion::disc({0.5, 0.5}, 0.0225);
  p.windows = {{49.0, 51.0}, {299.0, 301.0}};
  p.smoothing_halfwidth = 0.5;
  return StimulusProgram{{p}};
}

void StimulusProgram::validate() const {
  for (const auto& p : pulses) {
    for (std::size_t i = 0; i < p.windows.size(); ++i) {
      const auto& w = p.windows[i];
      if (!(w.end > w.start)) throw DomainError("stimulus window must have end > start");
      if (!(p.smoothing_halfwidth > 0.0) ||
          !(p.smoothing_halfwidth < 0.5 * (w.end - w.start))) {
        throw DomainError("stimulus smoothing half-width must lie in (0, (b-a)/2)");
      }
      if (i > 0 && !(w.start - p.smoothing_halfwidth >
                     p.windows[i - 1].end + p.smoothing_halfwidth)) {
        throw DomainError("stimulus windows must be disjoint and increasing");
      }
    }
  }
}

std::vector<double> StimulusProgram::breakpoints() const {
  std::vector<double> b;
  for (const auto& p : pulses) {
    const auto pb = p.breakpoints();
    b.insert(b.end(), pb.begin(), pb.end());
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

}  // namespace fhn
