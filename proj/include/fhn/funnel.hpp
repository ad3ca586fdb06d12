#pragma once

#include <limits>
#include <span>
#include <vector>

namespace fhn {

/// Performance funnel phi in the class Phi_gamma: phi = 0 on [0, gamma],
/// phi(t) = tanh(t / tau) afterwards. Bounded by 1 with Lipschitz
/// constant 1/tau on (gamma, inf). The displayed piecewise formula jumps by
/// tanh(gamma/tau) at t = gamma; it is evaluated verbatim.
struct FunnelSpec {
  double gamma = 0.05;
  double tau = 100.0;

  void validate() const;
  double phi_sup() const { return 1.0; }
  double phi_lip() const { return 1.0 / tau; }

  bool operator==(const FunnelSpec&) const = default;
};

struct ControllerConfig {
  double k0 = 0.75;
  /// Largest admissible phi^2 |e|^2 before the feedback refuses to evaluate.
  double guard_margin = 1.0 - 1e-9;

  void validate() const;
  bool operator==(const ControllerConfig&) const = default;
};

/// Funnel boundary 1/phi(t). +infinity stands for the unbounded funnel on
/// [0, gamma] and is never produced by a finite phi.
class FunnelRadius {
 public:
  static FunnelRadius unbounded() {
    return FunnelRadius(std::numeric_limits<double>::infinity());
  }
  static FunnelRadius bounded(double r) { return FunnelRadius(r); }

  bool is_unbounded() const { return value_ == std::numeric_limits<double>::infinity(); }
  double value() const { return value_; }

 private:
  explicit FunnelRadius(double v) : value_(v) {}
  double value_;
};

/// Throws DomainError for t < 0.
double phi_eval(const FunnelSpec& spec, double t);

FunnelRadius funnel_radius(const FunnelSpec& spec, double t);

/// 1 - phi^2 |e|^2; positive exactly when (t, e) lies inside the funnel.
double funnel_margin(std::span<const double> e, double phi);

/// Funnel feedback -k0 / (1 - phi^2 |e|^2) e. For phi = 0 this is bitwise
/// the proportional law -k0 e. Throws FunnelViolation (tagged with t) when
/// phi^2 |e|^2 exceeds the guard margin.
void feedback(std::span<const double> e, double phi, const ControllerConfig& cfg,
              std::span<double> out, double t = std::numeric_limits<double>::quiet_NaN());
std::vector<double> feedback(std::span<const double> e, double phi,
                             const ControllerConfig& cfg,
                             double t = std::numeric_limits<double>::quiet_NaN());

}  // namespace fhn
