#include "fhn/funnel.hpp"

#include <cmath>
#include <string>

#include "fhn/errors.hpp"

namespace fhn {

namespace {

double squared_norm(std::span<const double> e) {
  double s = 0.0;
  for (double x : e) s += x * x;
  return s;
}

}  // namespace

void FunnelSpec::validate() const {
  if (!(gamma > 0.0)) throw DomainError("funnel.gamma must be positive");
  if (!(tau > 0.0)) throw DomainError("funnel.tau must be positive");
}

void ControllerConfig::validate() const {
  if (!(k0 > 0.0)) throw DomainError("controller.k0 must be positive");
  if (!(guard_margin > 0.0 && guard_margin < 1.0)) {
    throw DomainError("controller.guard_margin must lie in (0, 1)");
  }
}

double phi_eval(const FunnelSpec& spec, double t) {
  if (t < 0.0) throw DomainError("phi_eval: negative time " + std::to_string(t));
  if (t <= spec.gamma) return 0.0;
  return std::tanh(t / spec.tau);
}

FunnelRadius funnel_radius(const FunnelSpec& spec, double t) {
  const double phi = phi_eval(spec, t);
  if (phi == 0.0) return FunnelRadius::unbounded();
  return FunnelRadius::bounded(1.0 / phi);
}

double funnel_margin(std::span<const double> e, double phi) {
  return 1.0 - phi * phi * squared_norm(e);
}

void feedback(std::span<const double> e, double phi, const ControllerConfig& cfg,
              std::span<double> out, double t) {
  if (out.size() != e.size()) throw DomainError("feedback: dimension mismatch");
  const double e_sq = squared_norm(e);
  const double load = phi * phi * e_sq;
  if (!(load <= cfg.guard_margin)) {
    throw FunnelViolation(t, std::sqrt(e_sq), phi, cfg.guard_margin);
  }
  const double gain = cfg.k0 / (1.0 - load);
  for (std::size_t i = 0; i < e.size(); ++i) out[i] = -gain * e[i];
}

std::vector<double> feedback(std::span<const double> e, double phi,
                             const ControllerConfig& cfg, double t) {
  std::vector<double> out(e.size());
  feedback(e, phi, cfg, out, t);
  return out;
}

}  // namespace fhn
