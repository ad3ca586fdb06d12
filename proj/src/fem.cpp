#include "fhn/fem.hpp"

#include <cmath>
#include <string>

#include "fhn/errors.hpp"

namespace fhn {

AssembledOperators assemble(const Mesh& mesh, const Diffusion& d) {
  if (d.min_eigenvalue() <= 0.0 || !std::isfinite(d.xx + d.xy + d.yy)) {
    throw DomainError("assemble: diffusion tensor is not positive definite");
  }
  const std::size_t n = mesh.num_nodes();
  std::vector<CsrMatrix::Triplet> mass_t;
  std::vector<CsrMatrix::Triplet> stiff_t;
  mass_t.reserve(mesh.num_triangles() * 9);
  stiff_t.reserve(mesh.num_triangles() * 9);

  const auto& nodes = mesh.nodes();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const Point& p0 = nodes[tri[0]];
    const Point& p1 = nodes[tri[1]];
    const Point& p2 = nodes[tri[2]];
    const double area = mesh.signed_area(t);
    const double inv2a = 1.0 / (2.0 * area);
    // Gradients of the barycentric coordinates.
    const double gx[3] = {(p1.y - p2.y) * inv2a, (p2.y - p0.y) * inv2a,
                          (p0.y - p1.y) * inv2a};
    const double gy[3] = {(p2.x - p1.x) * inv2a, (p0.x - p2.x) * inv2a,
                          (p1.x - p0.x) * inv2a};
    double ke[3][3];
    for (int a = 0; a < 3; ++a) {
      const double dgx = d.xx * gx[a] + d.xy * gy[a];
      const double dgy = d.xy * gx[a] + d.yy * gy[a];
      for (int b = a; b < 3; ++b) ke[a][b] = ke[b][a] = area * (dgx * gx[b] + dgy * gy[b]);
    }
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        stiff_t.push_back({tri[a], tri[b], ke[a][b]});
        mass_t.push_back({tri[a], tri[b], area * (a == b ? 2.0 : 1.0) / 12.0});
      }
    }
  }

  AssembledOperators ops;
  ops.mass = CsrMatrix::from_triplets(n, n, std::move(mass_t));
  ops.stiffness = CsrMatrix::from_triplets(n, n, std::move(stiff_t));
  ops.lumped_mass = ops.mass.row_sums();
  ops.inv_lumped_mass.resize(n);
  for (std::size_t i = 0; i < n; ++i) ops.inv_lumped_mass[i] = 1.0 / ops.lumped_mass[i];
  return ops;
}

OutputOperator::OutputOperator(OutputKind kind,
                               std::vector<std::vector<double>> columns)
    : kind_(kind), columns_(std::move(columns)) {
  support_.resize(columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    for (std::size_t i = 0; i < columns_[c].size(); ++i) {
      if (columns_[c][i] != 0.0) {
        support_[c].push_back({static_cast<std::uint32_t>(i), columns_[c][i]});
      }
    }
  }
}

void OutputOperator::apply(std::span<const double> v, std::span<double> y) const {
  if (v.size() != nodes() || y.size() != outputs()) {
    throw DomainError("OutputOperator::apply: dimension mismatch");
  }
  for (std::size_t c = 0; c < support_.size(); ++c) {
    double acc = 0.0;
    for (const auto& e : support_[c]) acc += e.weight * v[e.node];
    y[c] = acc;
  }
}

std::vector<double> OutputOperator::apply(std::span<const double> v) const {
  std::vector<double> y(outputs());
  apply(v, y);
  return y;
}

void OutputOperator::inject(std::span<const double> coeff,
                            std::span<double> out) const {
  if (coeff.size() != outputs() || out.size() != nodes()) {
    throw DomainError("OutputOperator::inject: dimension mismatch");
  }
  for (std::size_t c = 0; c < support_.size(); ++c) {
    if (coeff[c] == 0.0) continue;
    for (const auto& e : support_[c]) out[e.node] += coeff[c] * e.weight;
  }
}

OutputOperator boundary_output(const Mesh& mesh) {
  std::vector<std::vector<double>> cols(kSides,
                                        std::vector<double>(mesh.num_nodes(), 0.0));
  const auto& nodes = mesh.nodes();
  for (int s = 0; s < kSides; ++s) {
    for (const auto& e : mesh.boundary(static_cast<Side>(s))) {
      const double len = std::hypot(nodes[e[1]].x - nodes[e[0]].x,
                                    nodes[e[1]].y - nodes[e[0]].y);
      cols[s][e[0]] += 0.5 * len;
      cols[s][e[1]] += 0.5 * len;
    }
  }
  return OutputOperator(OutputKind::BoundarySegments, std::move(cols));
}

OutputOperator distributed_output(const Mesh& mesh, std::span<const double> mask,
                                  const AssembledOperators& ops) {
  if (mask.size() != mesh.num_nodes()) {
    throw DomainError("distributed_output: mask has " + std::to_string(mask.size()) +
                      " entries, mesh has " + std::to_string(mesh.num_nodes()) +
                      " nodes");
  }
  std::vector<std::vector<double>> cols(1);
  cols[0] = ops.mass.multiply(mask);
  return OutputOperator(OutputKind::Distributed, std::move(cols));
}

std::vector<double> control_injection(const OutputOperator& out,
                                      const AssembledOperators& ops,
                                      std::span<const double> i_se) {
  if (i_se.size() != out.outputs() || out.nodes() != ops.size()) {
    throw DomainError("control_injection: dimension mismatch");
  }
  std::vector<double> load(out.nodes(), 0.0);
  out.inject(i_se, load);
  return load;
}

std::vector<double> interpolate(const Mesh& mesh,
                                const std::function<double(double, double)>& f) {
  std::vector<double> v(mesh.num_nodes());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(mesh.nodes()[i].x, mesh.nodes()[i].y);
  return v;
}

}  // namespace fhn
