#pragma once

#include <array>

namespace fhn {

/// Symmetric 2x2 conductivity tensor, constant over the domain.
struct Diffusion {
  double xx = 0.015;
  double xy = 0.0;
  double yy = 0.015;

  static Diffusion isotropic(double d) { return {d, 0.0, d}; }

  /// Smallest eigenvalue (the ellipticity constant).
  double min_eigenvalue() const;
  bool is_isotropic() const { return xy == 0.0 && xx == yy; }

  bool operator==(const Diffusion&) const = default;
};

struct Extent {
  double lx = 1.0;
  double ly = 1.0;

  double area() const { return lx * ly; }
  bool operator==(const Extent&) const = default;
};

/// Constants of the FitzHugh-Nagumo monodomain model. Quantities are
/// dimensionless.
///
/// The defaults are the canonical experiment values, stored as the exact
/// decimals 1.614, 0.1403, 0.012, 0.00015, 0.015 on the unit square with
/// D = 0.015 I.
struct ModelParams {
  double c1 = 1.614;
  double c2 = 0.1403;
  double c3 = 0.012;
  double c4 = 0.00015;
  double c5 = 0.015;
  Diffusion diffusion{};
  Extent extent{};

  /// Throws DomainError naming the first violated invariant.
  void validate() const;

  double area() const { return extent.area(); }

  bool operator==(const ModelParams&) const = default;
};

/// p3(v) = -c1 v + c2 v^2 - c3 v^3.
inline double p3_eval(double v, const ModelParams& p) {
  return -p.c1 * v + p.c2 * v * v - p.c3 * v * v * v;
}

/// I_ion(u, v) = p3(v) - u.
inline double ionic_current(double v, double u, const ModelParams& p) {
  return p3_eval(v, p) - u;
}

/// Recovery dynamics c5 v - c4 u.
inline double recovery_rhs(double v, double u, const ModelParams& p) {
  return p.c5 * v - p.c4 * u;
}

/// V(v, u) = (c5 |v|^2 + |u|^2) / 2, from squared L2 norms.
double lyapunov(double v_norm_sq, double u_norm_sq, const ModelParams& p);

/// Largest positive root of p3 (0 when v = 0 is the only real root).
/// Every |v| > this bound satisfies sign(p3(v)) = -sign(v).
double p3_sign_bound(const ModelParams& p);

/// Sup of <p3(v), v> per unit area: 27 c2^4 / (32 c3^3).
double reaction_energy_floor(const ModelParams& p);

struct EnergyBudget {
  double c_infty = 0.0;
  double yref_term = 0.0;
  double stimulus_term = 0.0;
  double reaction_term = 0.0;

  /// Right-hand side of the energy inequality at elapsed time t for
  /// initial Lyapunov value v0: 2 C_inf t + 2 V0.
  double bound(double elapsed, double initial_lyapunov) const {
    return 2.0 * c_infty * elapsed + 2.0 * initial_lyapunov;
  }
};

/// C_inf = k0 c5/2 |y_ref|_inf^2 + 1/(2 c1) |I_si|_{2,inf}^2
///         + 27 c2^4 / (32 c3^3) |Omega|.
EnergyBudget energy_budget(const ModelParams& p, double yref_sup,
                           double isi_sup_l2, double k0, double area);

}  // namespace fhn
