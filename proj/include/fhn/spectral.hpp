#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "fhn/fem.hpp"
#include "fhn/mesh.hpp"
#include "fhn/model.hpp"
#include "fhn/stimulus.hpp"

namespace fhn {

struct Mode {
  int j = 0;
  int k = 0;
  bool operator==(const Mode&) const = default;
};

/// Analytic Neumann eigenbasis of -div(d grad) on [0,Lx] x [0,Ly]:
///   theta_jk(x, y) = n_j n_k / sqrt(Lx Ly) cos(j pi x/Lx) cos(k pi y/Ly),
///   alpha_jk = d pi^2 (j^2/Lx^2 + k^2/Ly^2),
/// with n_0 = 1 and n_j = sqrt(2) otherwise. Modes are ordered by
/// eigenvalue, ties broken lexicographically by (j, k).
class SpectralBasis {
 public:
  int max_j() const { return max_j_; }
  int max_k() const { return max_k_; }
  std::size_t size() const { return modes_.size(); }
  const Extent& extent() const { return extent_; }
  double diffusivity() const { return d_; }

  const std::vector<Mode>& modes() const { return modes_; }
  const std::vector<double>& eigenvalues() const { return alpha_; }
  /// n_j n_k (1, sqrt 2 or 2).
  const std::vector<double>& norm_factors() const { return norm_; }
  /// gamma_i = B' theta_i for the four-sided boundary output.
  const std::vector<std::vector<double>>& output_gamma() const { return gamma_; }

  /// Position of mode (j, k) in the ordering.
  std::size_t index_of(int j, int k) const { return index_[j * (max_k_ + 1) + k]; }

  double eval(std::size_t mode, double x, double y) const;
  /// 1D factor n_j cos(j pi x / Lx) / sqrt(Lx).
  double factor_x(int j, double x) const;
  double factor_y(int k, double y) const;

 private:
  friend SpectralBasis build_basis(int, int, const ModelParams&);
  int max_j_ = 0;
  int max_k_ = 0;
  Extent extent_{};
  double d_ = 0.0;
  std::vector<Mode> modes_;
  std::vector<double> alpha_;
  std::vector<double> norm_;
  std::vector<std::vector<double>> gamma_;
  std::vector<std::size_t> index_;
};

/// Throws UnsupportedConfiguration for anisotropic diffusion and
/// DomainError for negative mode bounds.
SpectralBasis build_basis(int max_j, int max_k, const ModelParams& params);

/// Exact line integrals of every mode over the four sides.
std::vector<std::vector<double>> output_gamma(const SpectralBasis& basis);

/// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);

/// Tensor midpoint grid for <p3(sum mu_i theta_i), theta_j>. Under x = cos(pi s)
/// this is Gauss-Chebyshev quadrature, so with at least 2 (max+1) points per
/// axis products of four modes integrate exactly.
class SpectralQuadrature {
 public:
  SpectralQuadrature(const SpectralBasis& basis, int points_x, int points_y);

  static int minimum_points(int max_mode) { return 2 * (max_mode + 1); }
  static int default_points(int max_mode) { return 3 * (max_mode + 1); }

  int points_x() const { return static_cast<int>(wx_.size()); }
  int points_y() const { return static_cast<int>(wy_.size()); }

  /// out_j = <p3(sum_i mu_i theta_i), theta_j>, both in basis order.
  void reaction(std::span<const double> mu, const ModelParams& p,
                std::span<double> out) const;

  /// out_j = <f, theta_j> for f sampled through `f(x, y)`.
  std::vector<double> project(const std::function<double(double, double)>& f) const;

 private:
  const SpectralBasis* basis_;
  Eigen::VectorXd wx_, wy_;
  Eigen::MatrixXd cx_;  // points_x x (max_j+1)
  Eigen::MatrixXd cy_;  // points_y x (max_k+1)
  Eigen::VectorXd xs_, ys_;
  mutable Eigen::MatrixXd coeff_, field_;
};

struct SpectralState {
  std::vector<double> mu;
  std::vector<double> nu;
  double t = 0.0;
};

/// Which couplings of the model are active. Disabling everything except
/// diffusion gives the pure Neumann heat equation.
struct PhysicsToggles {
  bool reaction = true;
  bool recovery = true;
  bool control = true;
  bool stimulus = true;

  static PhysicsToggles pure_diffusion() { return {false, false, false, false}; }
  static PhysicsToggles open_loop() { return {true, true, false, true}; }
  bool operator==(const PhysicsToggles&) const = default;
};

/// Inputs of one spectral right-hand-side evaluation: the boundary current
/// I_se (already produced by the controller) and <I_si(t), theta_j>.
struct SpectralForcing {
  std::vector<double> i_se;
  std::vector<double> stimulus;
};

/// Galerkin system
///   mu_j' = -alpha_j mu_j - nu_j + <I_se, gamma_j> + <I_si, theta_j>
///           + <p3(sum mu_i theta_i), theta_j>
///   nu_j' = -c4 nu_j + c5 mu_j
SpectralState spectral_rhs(const SpectralState& state, const SpectralBasis& basis,
                           const ModelParams& params, const SpectralQuadrature& quad,
                           const SpectralForcing& forcing,
                           PhysicsToggles toggles = {});

/// <v_h, theta_i> for the P1 function v_h, by Gauss quadrature on every
/// triangle.
std::vector<double> project_nodal(std::span<const double> v_nodal, const Mesh& mesh,
                                  const SpectralBasis& basis,
                                  const AssembledOperators& ops);

/// Nodal interpolant of sum_i coeff_i theta_i.
std::vector<double> synthesize_nodal(std::span<const double> coeff, const Mesh& mesh,
                                     const SpectralBasis& basis);

/// <1_region, theta_i> for every mode, accurate to ~1e-12.
std::vector<double> project_region(const StimulusRegion& region,
                                   const SpectralBasis& basis);

}  // namespace fhn
