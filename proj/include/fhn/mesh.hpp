#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fhn/model.hpp"

namespace fhn {

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

using Triangle = std::array<std::uint32_t, 3>;
using Edge = std::array<std::uint32_t, 2>;

/// Boundary sides, numbered like the control operator's output
/// components: Right = {Lx} x [0,Ly], Top = [0,Lx] x {Ly},
/// Left = {0} x [0,Ly], Bottom = [0,Lx] x {0}.
enum class Side : int { Right = 0, Top = 1, Left = 2, Bottom = 3 };
inline constexpr int kSides = 4;

/// Structured P1 triangulation of [0,Lx] x [0,Ly]. Node (i, j) sits at
/// (i Lx/nx, j Ly/ny) and has index j (nx+1) + i (row-major in y). Each
/// cell is split along its lower-left to upper-right diagonal; all
/// triangles are counter-clockwise. Corner nodes belong to both adjacent
/// sides.
class Mesh {
 public:
  Mesh() = default;
  Mesh(int nx, int ny, Extent extent);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  const Extent& extent() const { return extent_; }
  double hx() const { return extent_.lx / nx_; }
  double hy() const { return extent_.ly / ny_; }

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::uint32_t node_index(int i, int j) const {
    return static_cast<std::uint32_t>(j * (nx_ + 1) + i);
  }

  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Edge>& boundary(Side s) const {
    return boundary_[static_cast<int>(s)];
  }

  /// Signed area of triangle t (positive for counter-clockwise).
  double signed_area(std::size_t t) const;

 private:
  int nx_ = 0;
  int ny_ = 0;
  Extent extent_{};
  std::vector<Point> nodes_;
  std::vector<Triangle> triangles_;
  std::array<std::vector<Edge>, kSides> boundary_;
};

/// Throws DomainError for nx < 1, ny < 1 or a degenerate extent.
Mesh build_mesh(int nx, int ny, Extent extent = {});

}  // namespace fhn
