#include "fhn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "fhn/errors.hpp"

namespace fhn {

namespace {

constexpr double kPi = std::numbers::pi;

double mode_norm(int j) { return j == 0 ? 1.0 : std::numbers::sqrt2; }

// int_a^b cos(j pi x / L) dx
double cos_integral(int j, double a, double b, double L) {
  if (j == 0) return b - a;
  const double w = j * kPi / L;
  return (std::sin(w * b) - std::sin(w * a)) / w;
}

}  // namespace

SpectralBasis build_basis(int max_j, int max_k, const ModelParams& params) {
  if (max_j < 0 || max_k < 0) throw DomainError("build_basis: mode bounds must be >= 0");
  if (!params.diffusion.is_isotropic()) {
    throw UnsupportedConfiguration(
        "spectral basis requires isotropic diffusion D = d I; use the FEM "
        "discretization for anisotropic tensors");
  }
  const double d = params.diffusion.xx;
  if (!(d > 0.0)) throw DomainError("build_basis: diffusivity must be positive");

  SpectralBasis b;
  b.max_j_ = max_j;
  b.max_k_ = max_k;
  b.extent_ = params.extent;
  b.d_ = d;
  const double lx = params.extent.lx;
  const double ly = params.extent.ly;

  std::vector<Mode> all;
  for (int j = 0; j <= max_j; ++j) {
    for (int k = 0; k <= max_k; ++k) all.push_back({j, k});
  }
  auto alpha = [&](const Mode& m) {
    return d * kPi * kPi *
           (static_cast<double>(m.j * m.j) / (lx * lx) +
            static_cast<double>(m.k * m.k) / (ly * ly));
  };
  std::stable_sort(all.begin(), all.end(), [&](const Mode& a, const Mode& c) {
    const double aa = alpha(a);
    const double ac = alpha(c);
    if (aa != ac) return aa < ac;
    return a.j != c.j ? a.j < c.j : a.k < c.k;
  });

  b.index_.assign(all.size(), 0);
  const double inv_sqrt_area = 1.0 / std::sqrt(lx * ly);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const Mode& m = all[i];
    b.modes_.push_back(m);
    b.alpha_.push_back(alpha(m));
    b.norm_.push_back(mode_norm(m.j) * mode_norm(m.k));
    b.index_[m.j * (max_k + 1) + m.k] = i;
    const double f = mode_norm(m.j) * mode_norm(m.k) * inv_sqrt_area;
    const double sign_j = (m.j % 2 == 0) ? 1.0 : -1.0;
    const double sign_k = (m.k % 2 == 0) ? 1.0 : -1.0;
    const double along_y = m.k == 0 ? ly : 0.0;
    const double along_x = m.j == 0 ? lx : 0.0;
    b.gamma_.push_back({f * sign_j * along_y, f * sign_k * along_x, f * along_y,
                        f * along_x});
  }
  return b;
}

std::vector<std::vector<double>> output_gamma(const SpectralBasis& basis) {
  return basis.output_gamma();
}

double SpectralBasis::factor_x(int j, double x) const {
  return mode_norm(j) * std::cos(j * kPi * x / extent_.lx) / std::sqrt(extent_.lx);
}

double SpectralBasis::factor_y(int k, double y) const {
  return mode_norm(k) * std::cos(k * kPi * y / extent_.ly) / std::sqrt(extent_.ly);
}

double SpectralBasis::eval(std::size_t mode, double x, double y) const {
  const Mode& m = modes_[mode];
  return factor_x(m.j, x) * factor_y(m.k, y);
}

void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one point");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    nodes[i] = mid - half * z;
    nodes[n - 1 - i] = mid + half * z;
    weights[i] = half * w;
    weights[n - 1 - i] = half * w;
  }
}

SpectralQuadrature::SpectralQuadrature(const SpectralBasis& basis, int points_x,
                                       int points_y)
    : basis_(&basis) {
  if (points_x < minimum_points(basis.max_j()) || points_y < minimum_points(basis.max_k())) {
    throw DomainError("spectral quadrature grid too coarse: need at least " +
                      std::to_string(minimum_points(basis.max_j())) + " x " +
                      std::to_string(minimum_points(basis.max_k())) + " points, got " +
                      std::to_string(points_x) + " x " + std::to_string(points_y));
  }
  const auto midpoint = [](int n, double length, Eigen::VectorXd& nodes,
                           Eigen::VectorXd& weights) {
    nodes.resize(n);
    weights.setConstant(n, length / n);
    for (int i = 0; i < n; ++i) nodes(i) = length * (i + 0.5) / n;
  };
  midpoint(points_x, basis.extent().lx, xs_, wx_);
  midpoint(points_y, basis.extent().ly, ys_, wy_);

  cx_.resize(points_x, basis.max_j() + 1);
  for (int q = 0; q < points_x; ++q) {
    for (int j = 0; j <= basis.max_j(); ++j) cx_(q, j) = basis.factor_x(j, xs_(q));
  }
  cy_.resize(points_y, basis.max_k() + 1);
  for (int q = 0; q < points_y; ++q) {
    for (int k = 0; k <= basis.max_k(); ++k) cy_(q, k) = basis.factor_y(k, ys_(q));
  }
  coeff_.resize(basis.max_j() + 1, basis.max_k() + 1);
}

void SpectralQuadrature::reaction(std::span<const double> mu, const ModelParams& p,
                                  std::span<double> out) const {
  const SpectralBasis& b = *basis_;
  for (std::size_t i = 0; i < b.size(); ++i) coeff_(b.modes()[i].j, b.modes()[i].k) = mu[i];
  field_.noalias() = cx_ * coeff_ * cy_.transpose();
  for (Eigen::Index c = 0; c < field_.cols(); ++c) {
    for (Eigen::Index r = 0; r < field_.rows(); ++r) {
      field_(r, c) = p3_eval(field_(r, c), p) * wx_(r) * wy_(c);
    }
  }
  coeff_.noalias() = cx_.transpose() * field_ * cy_;
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = coeff_(b.modes()[i].j, b.modes()[i].k);
}

std::vector<double> SpectralQuadrature::project(
    const std::function<double(double, double)>& f) const {
  const SpectralBasis& b = *basis_;
  Eigen::MatrixXd field(xs_.size(), ys_.size());
  for (Eigen::Index c = 0; c < field.cols(); ++c) {
    for (Eigen::Index r = 0; r < field.rows(); ++r) {
      field(r, c) = f(xs_(r), ys_(c)) * wx_(r) * wy_(c);
    }
  }
  const Eigen::MatrixXd back = cx_.transpose() * field * cy_;
  std::vector<double> out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = back(b.modes()[i].j, b.modes()[i].k);
  return out;
}

SpectralState spectral_rhs(const SpectralState& state, const SpectralBasis& basis,
                           const ModelParams& params, const SpectralQuadrature& quad,
                           const SpectralForcing& forcing, PhysicsToggles toggles) {
  const std::size_t n = basis.size();
  if (state.mu.size() != n || state.nu.size() != n) {
    throw DomainError("spectral_rhs: state has " + std::to_string(state.mu.size()) + "/" +
                      std::to_string(state.nu.size()) + " coefficients, basis has " +
                      std::to_string(n));
  }
  if (toggles.control && forcing.i_se.size() != 4) {
    throw DomainError("spectral_rhs: boundary current must have 4 components");
  }
  if (toggles.stimulus && !forcing.stimulus.empty() && forcing.stimulus.size() != n) {
    throw DomainError("spectral_rhs: stimulus projection has the wrong length");
  }
  SpectralState d;
  d.t = state.t;
  d.mu.assign(n, 0.0);
  d.nu.assign(n, 0.0);
  if (toggles.reaction) quad.reaction(state.mu, params, d.mu);
  const auto& gamma = basis.output_gamma();
  for (std::size_t j = 0; j < n; ++j) {
    double rhs = d.mu[j] - basis.eigenvalues()[j] * state.mu[j];
    if (toggles.recovery) {
      rhs -= state.nu[j];
      d.nu[j] = -params.c4 * state.nu[j] + params.c5 * state.mu[j];
    }
    if (toggles.control) {
      for (std::size_t c = 0; c < 4; ++c) rhs += forcing.i_se[c] * gamma[j][c];
    }
    if (toggles.stimulus && !forcing.stimulus.empty()) rhs += forcing.stimulus[j];
    d.mu[j] = rhs;
  }
  return d;
}

std::vector<double> synthesize_nodal(std::span<const double> coeff, const Mesh& mesh,
                                     const SpectralBasis& basis) {
  if (coeff.size() != basis.size()) throw DomainError("synthesize_nodal: shape mismatch");
  std::vector<double> v(mesh.num_nodes(), 0.0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (coeff[i] == 0.0) continue;
    const Mode& m = basis.modes()[i];
    for (std::size_t a = 0; a < v.size(); ++a) {
      const Point& p = mesh.nodes()[a];
      v[a] += coeff[i] * basis.factor_x(m.j, p.x) * basis.factor_y(m.k, p.y);
    }
  }
  return v;
}

std::vector<double> project_nodal(std::span<const double> v_nodal, const Mesh& mesh,
                                  const SpectralBasis& basis,
                                  const AssembledOperators& ops) {
  if (v_nodal.size() != mesh.num_nodes() || ops.size() != mesh.num_nodes()) {
    throw DomainError("project_nodal: nodal vector has " + std::to_string(v_nodal.size()) +
                      " entries, mesh has " + std::to_string(mesh.num_nodes()) + " nodes");
  }
  constexpr int kPoints = 6;
  std::vector<double> gs, gw;
  gauss_legendre(kPoints, 0.0, 1.0, gs, gw);
  struct RefPoint {
    double l1, l2, w;
  };
  std::vector<RefPoint> ref;
  for (int a = 0; a < kPoints; ++a) {
    for (int b = 0; b < kPoints; ++b) {
      ref.push_back({gs[a], gs[b] * (1.0 - gs[a]), gw[a] * gw[b] * (1.0 - gs[a])});
    }
  }
  const int nj = basis.max_j() + 1;
  const int nk = basis.max_k() + 1;
  std::vector<double> fx(nj), fy(nk);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(nj, nk);
  const auto& nodes = mesh.nodes();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const Point& p0 = nodes[tri[0]];
    const Point& p1 = nodes[tri[1]];
    const Point& p2 = nodes[tri[2]];
    const double jac = 2.0 * std::abs(mesh.signed_area(t));
    const double v0 = v_nodal[tri[0]], v1 = v_nodal[tri[1]], v2 = v_nodal[tri[2]];
    for (const auto& q : ref) {
      const double x = p0.x + q.l1 * (p1.x - p0.x) + q.l2 * (p2.x - p0.x);
      const double y = p0.y + q.l1 * (p1.y - p0.y) + q.l2 * (p2.y - p0.y);
      const double v = (1.0 - q.l1 - q.l2) * v0 + q.l1 * v1 + q.l2 * v2;
      const double w = q.w * jac * v;
      if (w == 0.0) continue;
      for (int j = 0; j < nj; ++j) fx[j] = basis.factor_x(j, x);
      for (int k = 0; k < nk; ++k) fy[k] = basis.factor_y(k, y);
      for (int k = 0; k < nk; ++k) {
        const double wk = w * fy[k];
        for (int j = 0; j < nj; ++j) acc(j, k) += wk * fx[j];
      }
    }
  }
  std::vector<double> out(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    out[i] = acc(basis.modes()[i].j, basis.modes()[i].k);
  }
  return out;
}

std::vector<double> project_region(const StimulusRegion& region,
                                   const SpectralBasis& basis) {
  const double lx = basis.extent().lx;
  const double ly = basis.extent().ly;
  const double sx = 1.0 / std::sqrt(lx);
  const double sy = 1.0 / std::sqrt(ly);
  std::vector<double> out(basis.size(), 0.0);
  if (region.shape == StimulusRegion::Shape::Box) {
    const double x0 = std::clamp(region.x0, 0.0, lx), x1 = std::clamp(region.x1, 0.0, lx);
    const double y0 = std::clamp(region.y0, 0.0, ly), y1 = std::clamp(region.y1, 0.0, ly);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const Mode& m = basis.modes()[i];
      out[i] = mode_norm(m.j) * sx * cos_integral(m.j, x0, x1, lx) * mode_norm(m.k) * sy *
               cos_integral(m.k, y0, y1, ly);
    }
    return out;
  }
  // Disc: y = cy + r sin(s), chord half-width r cos(s); the integrand in s
  // is smooth when the disc lies inside the domain.
  const double r = std::sqrt(region.r_sq);
  std::vector<double> s, w;
  gauss_legendre(400, -0.5 * kPi, 0.5 * kPi, s, w);
  for (std::size_t q = 0; q < s.size(); ++q) {
    const double y = region.center.y + r * std::sin(s[q]);
    if (y < 0.0 || y > ly) continue;
    const double half = r * std::cos(s[q]);
    const double xa = std::clamp(region.center.x - half, 0.0, lx);
    const double xb = std::clamp(region.center.x + half, 0.0, lx);
    const double jac = w[q] * r * std::cos(s[q]);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const Mode& m = basis.modes()[i];
      out[i] += jac * mode_norm(m.j) * sx * cos_integral(m.j, xa, xb, lx) * basis.factor_y(m.k, y);
    }
  }
  return out;
}

}  // namespace fhn
