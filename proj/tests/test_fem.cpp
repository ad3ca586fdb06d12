#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "fhn/errors.hpp"
#include "fhn/fem.hpp"
#include "fhn/mesh.hpp"
#include "fhn/sparse.hpp"
#include "fhn/stimulus.hpp"

using namespace fhn;

namespace {

double total(const CsrMatrix& m) {
  return std::accumulate(m.values().begin(), m.values().end(), 0.0);
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("csr matrix from triplets") {
  auto m = CsrMatrix::from_triplets(3, 3, {{2, 1, 1.0}, {0, 0, 2.0}, {2, 1, 0.5}, {1, 2, -1.0}, {0, 2, 3.0}});
  CHECK(m.nonzeros() == 4);
  CHECK(m.at(0, 0) == 2.0);
  CHECK(m.at(0, 2) == 3.0);
  CHECK(m.at(2, 1) == 1.5);
  CHECK(m.at(1, 1) == 0.0);
  const std::vector<double> x{1.0, 2.0, 3.0};
  const auto y = m.multiply(x);
  CHECK(y == std::vector<double>{11.0, -3.0, 3.0});
  CHECK(m.bilinear(x, x) == doctest::Approx(1 * 11.0 + 2 * -3.0 + 3 * 3.0));
  CHECK(m.row_sums() == std::vector<double>{5.0, -1.0, 1.5});
  CHECK_THROWS_AS(CsrMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), DomainError);
}

TEST_CASE("mesh counts and geometry") {
  const auto m1 = build_mesh(1, 1);
  CHECK(m1.num_nodes() == 4);
  CHECK(m1.num_triangles() == 2);
  for (int s = 0; s < kSides; ++s) CHECK(m1.boundary(static_cast<Side>(s)).size() == 1);

  const auto m64 = build_mesh(64, 64);
  CHECK(m64.num_nodes() == 4225);
  CHECK(m64.num_triangles() == 8192);

  const auto m21 = build_mesh(2, 1);
  CHECK(m21.num_nodes() == 6);
  CHECK(m21.num_triangles() == 4);

  const auto m = build_mesh(5, 3, {2.0, 1.5});
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    CHECK(m.signed_area(t) == doctest::Approx(2.0 * 1.5 / (2.0 * 15)));
  }
  CHECK(m.nodes()[m.node_index(5, 3)].x == 2.0);
  CHECK(m.nodes()[m.node_index(5, 3)].y == 1.5);
  for (const auto& e : m.boundary(Side::Right)) {
    CHECK(m.nodes()[e[0]].x == 2.0);
    CHECK(m.nodes()[e[1]].x == 2.0);
  }
  for (const auto& e : m.boundary(Side::Top)) CHECK(m.nodes()[e[0]].y == 1.5);
  for (const auto& e : m.boundary(Side::Left)) CHECK(m.nodes()[e[0]].x == 0.0);
  for (const auto& e : m.boundary(Side::Bottom)) CHECK(m.nodes()[e[0]].y == 0.0);

  CHECK_THROWS_AS(build_mesh(0, 4), DomainError);
  CHECK_THROWS_AS(build_mesh(4, -1), DomainError);
}

TEST_CASE("assembled mass and stiffness") {
  for (int n : {1, 3, 16}) {
    const auto mesh = build_mesh(n, n);
    const auto ops = assemble(mesh, Diffusion::isotropic(0.015));
    CHECK(total(ops.mass) == doctest::Approx(1.0).epsilon(1e-13));
    const std::vector<double> ones(mesh.num_nodes(), 1.0);
    const auto k1 = ops.stiffness.multiply(ones);
    for (double x : k1) CHECK(std::abs(x) < 1e-15);
    const auto rs = ops.mass.row_sums();
    for (std::size_t i = 0; i < rs.size(); ++i) {
      CHECK(ops.lumped_mass[i] == doctest::Approx(rs[i]));
      CHECK(ops.inv_lumped_mass[i] == doctest::Approx(1.0 / rs[i]));
    }
  }
  const auto mesh = build_mesh(8, 6, {1.0, 0.75});
  const auto a = assemble(mesh, Diffusion::isotropic(0.015));
  const auto lap = assemble(mesh, Diffusion::isotropic(1.0));
  for (std::size_t i = 0; i < a.stiffness.values().size(); ++i) {
    CHECK(a.stiffness.values()[i] == doctest::Approx(0.015 * lap.stiffness.values()[i]).epsilon(1e-14));
  }
  CHECK_THROWS_AS(assemble(mesh, Diffusion{1.0, 2.0, 1.0}), DomainError);
}

TEST_CASE("galerkin symmetry and ellipticity") {
  std::mt19937_64 rng(7);
  const auto mesh = build_mesh(7, 5);
  const auto ops = assemble(mesh, Diffusion{0.02, 0.005, 0.01});
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_vector(mesh.num_nodes(), rng);
    const auto b = random_vector(mesh.num_nodes(), rng);
    CHECK(ops.stiffness.bilinear(a, b) == doctest::Approx(ops.stiffness.bilinear(b, a)).epsilon(1e-12));
    CHECK(ops.mass.bilinear(a, b) == doctest::Approx(ops.mass.bilinear(b, a)).epsilon(1e-12));
    CHECK(ops.stiffness.bilinear(a, a) > 0.0);
    CHECK(ops.mass.bilinear(a, a) > 0.0);
  }
  for (std::size_t r = 0; r < ops.stiffness.rows(); ++r) {
    for (auto p = ops.stiffness.row_ptr()[r]; p < ops.stiffness.row_ptr()[r + 1]; ++p) {
      CHECK(ops.stiffness.values()[p] == ops.stiffness.at(ops.stiffness.col_idx()[p], r));
    }
  }
}

TEST_CASE("patch test on affine fields") {
  const auto mesh = build_mesh(6, 6);
  const auto ops = assemble(mesh, Diffusion::isotropic(1.0));
  const auto v = interpolate(mesh, [](double x, double y) { return 2.0 * x - 3.0 * y + 1.0; });
  const auto kv = ops.stiffness.multiply(v);
  for (int j = 1; j < 6; ++j) {
    for (int i = 1; i < 6; ++i) CHECK(std::abs(kv[mesh.node_index(i, j)]) < 1e-12);
  }
}

TEST_CASE("smallest generalized eigenvalue converges to d pi^2") {
  double prev_err = INFINITY;
  for (int n : {8, 16, 32}) {
    const auto mesh = build_mesh(n, n);
    const auto ops = assemble(mesh, Diffusion::isotropic(0.015));
    const auto v = interpolate(mesh, [](double x, double) { return std::cos(M_PI * x); });
    const double rq = ops.stiffness.bilinear(v, v) / ops.mass.bilinear(v, v);
    const double err = std::abs(rq - 0.015 * M_PI * M_PI);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-3 * 0.015 * M_PI * M_PI);
}

TEST_CASE("boundary output") {
  const auto mesh = build_mesh(16, 16);
  const auto out = boundary_output(mesh);
  CHECK(out.outputs() == 4);
  CHECK(out.kind() == OutputKind::BoundarySegments);
  const auto y1 = out.apply(std::vector<double>(mesh.num_nodes(), 1.0));
  for (double y : y1) CHECK(y == doctest::Approx(1.0).epsilon(1e-14));
  const auto yx = out.apply(interpolate(mesh, [](double x, double) { return x; }));
  CHECK(yx[0] == doctest::Approx(1.0));
  CHECK(yx[1] == doctest::Approx(0.5));
  CHECK(std::abs(yx[2]) < 1e-15);
  CHECK(yx[3] == doctest::Approx(0.5));
  const auto yl = out.apply(interpolate(mesh, [](double x, double y) { return 3.0 * x - y + 2.0; }));
  CHECK(yl[0] == doctest::Approx(4.5));
  CHECK(yl[1] == doctest::Approx(2.5));
  CHECK(yl[2] == doctest::Approx(1.5));
  CHECK(yl[3] == doctest::Approx(3.5));

  const auto m1 = build_mesh(1, 1);
  std::vector<double> corner(4, 0.0);
  corner[m1.node_index(1, 1)] = 1.0;
  const auto yc = boundary_output(m1).apply(corner);
  CHECK(yc == std::vector<double>{0.5, 0.5, 0.0, 0.0});
}

TEST_CASE("distributed output") {
  const auto mesh = build_mesh(64, 64);
  const auto ops = assemble(mesh, Diffusion::isotropic(0.015));
  const std::vector<double> ones(mesh.num_nodes(), 1.0);
  CHECK(distributed_output(mesh, ones, ops).apply(ones)[0] == doctest::Approx(1.0).epsilon(1e-13));
  const auto zero = distributed_output(mesh, std::vector<double>(mesh.num_nodes(), 0.0), ops);
  for (double w : zero.column(0)) CHECK(w == 0.0);
  const auto disc = disc_mask(mesh, {0.5, 0.5}, 0.0225);
  const double area = distributed_output(mesh, disc, ops).apply(ones)[0];
  CHECK(std::abs(area - M_PI * 0.0225) <= 2.0 / (64.0 * 64.0) * 2.0);
  CHECK_THROWS_AS(distributed_output(mesh, std::vector<double>(3, 1.0), ops), DomainError);
}

TEST_CASE("control injection") {
  const auto mesh = build_mesh(8, 8);
  const auto ops = assemble(mesh, Diffusion::isotropic(0.015));
  const auto out = boundary_output(mesh);
  const auto zero = control_injection(out, ops, std::vector<double>{0, 0, 0, 0});
  for (double x : zero) CHECK(x == 0.0);
  const auto e1 = control_injection(out, ops, std::vector<double>{1, 0, 0, 0});
  for (std::size_t i = 0; i < e1.size(); ++i) {
    CHECK(e1[i] == out.column(0)[i]);
    if (e1[i] != 0.0) CHECK(mesh.nodes()[i].x == 1.0);
  }
  const auto all = control_injection(out, ops, std::vector<double>{1, 1, 1, 1});
  CHECK(std::accumulate(all.begin(), all.end(), 0.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(control_injection(out, ops, std::vector<double>{1, 1}), DomainError);
}
