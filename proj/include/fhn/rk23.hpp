#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fhn/kernels.hpp"

namespace fhn {

/// Step-size control of the adaptive Bogacki-Shampine 3(2) integrator.
/// Defaults mirror the common ode23 defaults (rtol 1e-3, atol 1e-6).
struct IntegratorConfig {
  double rtol = 1e-3;
  double atol = 1e-6;
  double dt_init = 1e-3;
  double dt_min = 1e-12;
  double dt_max = 1.0;
  double safety = 0.9;
  int max_rejects = 60;
  /// Bounds on the ratio between consecutive step sizes.
  double max_growth = 5.0;
  double min_shrink = 0.2;

  void validate() const;
  bool operator==(const IntegratorConfig&) const = default;
};

using RhsFn =
    std::function<void(double t, std::span<const double> x, std::span<double> dxdt)>;

struct StepResult {
  std::vector<double> x_next;
  /// Weighted RMS of the 3rd-minus-2nd order difference.
  double error_estimate = 0.0;
  double dt_suggest = 0.0;
  /// rhs at (t + dt, x_next); reused as the first stage of the next step.
  std::vector<double> f_next;
};

/// One Bogacki-Shampine step. `f0` is rhs(t, x) when already known (FSAL),
/// otherwise it is evaluated. Exceptions from rhs propagate.
StepResult rk23_step(const RhsFn& rhs, double t, std::span<const double> x,
                     double dt, const IntegratorConfig& cfg,
                     std::span<const double> f0 = {},
                     const kernels::KernelTable& k = kernels::active());

/// Receives dense-output samples. Samples of a trial step are delivered
/// before the step is committed; sample() may throw FunnelViolation to
/// force a rejection, after which rollback() discards that step's samples.
class StepObserver {
 public:
  virtual ~StepObserver() = default;
  virtual void sample(double t, std::span<const double> x) = 0;
  virtual void commit() = 0;
  virtual void rollback() = 0;
};

struct IntegrationStats {
  long accepted = 0;
  long rejected_error = 0;
  long rejected_funnel = 0;
  long rhs_evals = 0;
  double min_dt_accepted = 0.0;
  double max_dt_accepted = 0.0;
};

/// Adaptive driver with FSAL, forced step endpoints at breakpoints and
/// cubic Hermite dense output on the uniform grid t0 + k sample_dt.
class Rk23Integrator {
 public:
  Rk23Integrator(RhsFn rhs, IntegratorConfig cfg,
                 const kernels::KernelTable& k = kernels::active());

  /// Integrates from (t0, x0) to t1 and returns the terminal state.
  /// Throws IntegrationAbort after more than max_rejects consecutive
  /// rejections or when a step below dt_min would be required.
  std::vector<double> integrate(double t0, std::vector<double> x0, double t1,
                                double sample_dt, std::span<const double> breakpoints,
                                StepObserver& observer);

  const IntegrationStats& stats() const { return stats_; }

 private:
  RhsFn rhs_;
  IntegratorConfig cfg_;
  const kernels::KernelTable& k_;
  IntegrationStats stats_;
};

}  // namespace fhn
