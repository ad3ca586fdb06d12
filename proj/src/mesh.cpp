#include "fhn/mesh.hpp"

#include "fhn/errors.hpp"

namespace fhn {

Mesh::Mesh(int nx, int ny, Extent extent) : nx_(nx), ny_(ny), extent_(extent) {
  nodes_.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    // Snap the last row/column exactly onto the boundary.
    const double y = j == ny ? extent.ly : j * extent.ly / ny;
    for (int i = 0; i <= nx; ++i) {
      const double x = i == nx ? extent.lx : i * extent.lx / nx;
      nodes_.push_back({x, y});
    }
  }

  triangles_.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const auto a = node_index(i, j);
      const auto b = node_index(i + 1, j);
      const auto c = node_index(i + 1, j + 1);
      const auto d = node_index(i, j + 1);
      triangles_.push_back({a, b, c});
      triangles_.push_back({a, c, d});
    }
  }

  auto& right = boundary_[static_cast<int>(Side::Right)];
  auto& left = boundary_[static_cast<int>(Side::Left)];
  for (int j = 0; j < ny; ++j) {
    right.push_back({node_index(nx, j), node_index(nx, j + 1)});
    left.push_back({node_index(0, j), node_index(0, j + 1)});
  }
  auto& top = boundary_[static_cast<int>(Side::Top)];
  auto& bottom = boundary_[static_cast<int>(Side::Bottom)];
  for (int i = 0; i < nx; ++i) {
    top.push_back({node_index(i, ny), node_index(i + 1, ny)});
    bottom.push_back({node_index(i, 0), node_index(i + 1, 0)});
  }
}

double Mesh::signed_area(std::size_t t) const {
  const auto& tri = triangles_[t];
  const Point& p0 = nodes_[tri[0]];
  const Point& p1 = nodes_[tri[1]];
  const Point& p2 = nodes_[tri[2]];
  return 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
}

Mesh build_mesh(int nx, int ny, Extent extent) {
  if (nx < 1 || ny < 1) {
    throw DomainError("build_mesh: cell counts must be >= 1, got " +
                      std::to_string(nx) + "x" + std::to_string(ny));
  }
  if (!(extent.lx > 0.0) || !(extent.ly > 0.0)) {
    throw DomainError("build_mesh: extent must be positive");
  }
  return Mesh(nx, ny, extent);
}

}  // namespace fhn
