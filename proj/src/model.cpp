#include "fhn/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fhn/errors.hpp"

namespace fhn {

FunnelViolation::FunnelViolation(double t, double error_norm, double phi,
                                 double guard_margin)
    : std::runtime_error("funnel violation at t=" + std::to_string(t) +
                         ": phi^2 |e|^2 = " +
                         std::to_string(phi * phi * error_norm * error_norm) +
                         " exceeds guard margin " +
                         std::to_string(guard_margin) +
                         " (|e|=" + std::to_string(error_norm) + ")"),
      t_(t),
      error_norm_(error_norm),
      phi_(phi),
      guard_margin_(guard_margin) {}

ConfigError::ConfigError(std::string key, int line, const std::string& what)
    : std::runtime_error(
          (line > 0 ? "line " + std::to_string(line) + ": " : std::string{}) +
          (key.empty() ? std::string{} : key + ": ") + what),
      key_(std::move(key)),
      line_(line) {}

double Diffusion::min_eigenvalue() const {
  const double mean = 0.5 * (xx + yy);
  const double half_diff = 0.5 * (xx - yy);
  return mean - std::hypot(half_diff, xy);
}

void ModelParams::validate() const {
  const std::array<std::pair<const char*, double>, 5> constants{
      {{"c1", c1}, {"c2", c2}, {"c3", c3}, {"c4", c4}, {"c5", c5}}};
  for (const auto& [name, value] : constants) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw DomainError(std::string(name) + " must be strictly positive, got " +
                        std::to_string(value));
    }
  }
  if (!(diffusion.min_eigenvalue() > 0.0)) {
    throw DomainError("diffusion tensor must be positive definite");
  }
  if (!(extent.lx > 0.0) || !(extent.ly > 0.0)) {
    throw DomainError("domain extent must be positive");
  }
}

double lyapunov(double v_norm_sq, double u_norm_sq, const ModelParams& p) {
  if (v_norm_sq < 0.0 || u_norm_sq < 0.0) {
    throw DomainError("lyapunov: squared norms must be nonnegative");
  }
  return 0.5 * (p.c5 * v_norm_sq + u_norm_sq);
}

double p3_sign_bound(const ModelParams& p) {
  // p3(v) = -v (c1 - c2 v + c3 v^2); the quadratic is positive for v < 0.
  const double disc = p.c2 * p.c2 - 4.0 * p.c1 * p.c3;
  if (disc < 0.0) return 0.0;
  return (p.c2 + std::sqrt(disc)) / (2.0 * p.c3);
}

double reaction_energy_floor(const ModelParams& p) {
  const double c2_sq = p.c2 * p.c2;
  return 27.0 * c2_sq * c2_sq / (32.0 * p.c3 * p.c3 * p.c3);
}

EnergyBudget energy_budget(const ModelParams& p, double yref_sup,
                           double isi_sup_l2, double k0, double area) {
  if (!(k0 > 0.0)) throw DomainError("energy_budget: k0 must be positive");
  if (!(area > 0.0)) throw DomainError("energy_budget: area must be positive");
  if (yref_sup < 0.0 || isi_sup_l2 < 0.0) {
    throw DomainError("energy_budget: sup norms must be nonnegative");
  }
  EnergyBudget b;
  b.yref_term = 0.5 * k0 * p.c5 * yref_sup * yref_sup;
  b.stimulus_term = isi_sup_l2 * isi_sup_l2 / (2.0 * p.c1);
  b.reaction_term = reaction_energy_floor(p) * area;
  b.c_infty = b.yref_term + b.stimulus_term + b.reaction_term;
  return b;
}

}  // namespace fhn
