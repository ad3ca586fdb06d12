#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fhn/fem.hpp"
#include "fhn/funnel.hpp"
#include "fhn/model.hpp"
#include "fhn/reference_signal.hpp"
#include "fhn/rk23.hpp"
#include "fhn/spectral.hpp"
#include "fhn/stimulus.hpp"
#include "fhn/trajectory.hpp"

namespace fhn {

/// Controller wiring shared by both discretizations. Without a controller
/// (toggles.control == false) the run is open loop: I_se = 0, phi = 0 and
/// the logged reference is zero.
struct LoopSetup {
  ModelParams params{};
  PhysicsToggles toggles{};
  FunnelSpec funnel{};
  ControllerConfig controller{};
  std::shared_ptr<const ReferenceSignal> reference;
  StimulusProgram stimulus{};
};

/// A method-of-lines semidiscretization of the closed-loop system. The
/// state is the stacked (v, u) coefficient vector.
class SemiDiscreteSystem {
 public:
  virtual ~SemiDiscreteSystem() = default;

  virtual std::size_t state_size() const = 0;
  virtual std::size_t outputs() const = 0;
  virtual const LoopSetup& setup() const = 0;

  /// May throw FunnelViolation.
  virtual void rhs(double t, std::span<const double> x, std::span<double> dxdt) = 0;
  virtual void output(std::span<const double> x, std::span<double> y) const = 0;
  virtual double v_norm(std::span<const double> x) const = 0;
  virtual double u_norm(std::span<const double> x) const = 0;

  /// Log row for state x at time t. Throws FunnelViolation if the sample
  /// lies in the funnel's guard band.
  Sample observe(double t, std::span<const double> x) const;

  /// Times where the right-hand side is not smooth.
  std::vector<double> breakpoints() const;

 protected:
  /// y_ref(t), e = y - y_ref, phi(t) and the controller output.
  void control_terms(double t, std::span<const double> y, std::span<double> y_ref,
                     std::span<double> e, double& phi, std::span<double> i_se) const;
};

/// P1 FEM with lumped mass on the time derivative:
///   v' = Ml^-1 (-K v + sum_i I_se,i b_i + I_si load) + p3(v) - u
///   u' = c5 v - c4 u
/// The stimulus load is the consistent-mass projection M (amplitude * mask).
class FemSystem final : public SemiDiscreteSystem {
 public:
  FemSystem(const Mesh& mesh, const AssembledOperators& ops, const OutputOperator& out,
            LoopSetup setup, const kernels::KernelTable& k = kernels::active());

  std::size_t state_size() const override { return 2 * n_; }
  std::size_t outputs() const override { return out_->outputs(); }
  const LoopSetup& setup() const override { return setup_; }

  void rhs(double t, std::span<const double> x, std::span<double> dxdt) override;
  void output(std::span<const double> x, std::span<double> y) const override;
  /// Lumped-mass L2 norms.
  double v_norm(std::span<const double> x) const override;
  double u_norm(std::span<const double> x) const override;

  std::size_t nodes() const { return n_; }
  const AssembledOperators& operators() const { return *ops_; }
  /// sup_t |I_si(t)|_L2 in the consistent mass norm.
  double stimulus_sup_l2() const;

 private:
  const Mesh* mesh_;
  const AssembledOperators* ops_;
  const OutputOperator* out_;
  LoopSetup setup_;
  const kernels::KernelTable& k_;
  std::size_t n_;
  std::vector<std::vector<double>> stim_loads_;  // M mask per pulse
  std::vector<double> kv_, load_, y_, yref_, e_, ise_;
};

/// Eigenfunction Galerkin system on the analytic Neumann basis.
class SpectralSystem final : public SemiDiscreteSystem {
 public:
  SpectralSystem(const SpectralBasis& basis, LoopSetup setup, int quad_points_x = 0,
                 int quad_points_y = 0);

  std::size_t state_size() const override { return 2 * basis_->size(); }
  std::size_t outputs() const override { return 4; }
  const LoopSetup& setup() const override { return setup_; }

  void rhs(double t, std::span<const double> x, std::span<double> dxdt) override;
  void output(std::span<const double> x, std::span<double> y) const override;
  double v_norm(std::span<const double> x) const override;
  double u_norm(std::span<const double> x) const override;

  const SpectralQuadrature& quadrature() const { return quad_; }

 private:
  const SpectralBasis* basis_;
  LoopSetup setup_;
  SpectralQuadrature quad_;
  std::vector<std::vector<double>> stim_coeffs_;
  SpectralState state_;
  SpectralForcing forcing_;
  std::vector<double> y_, yref_, e_;
};

struct RunResult {
  TrajectoryLog log;
  std::vector<double> final_state;
  IntegrationStats stats;
};

/// Integrates the closed loop from (t0, x0) to t1 and logs dense-output
/// samples on t0 + k sample_dt. Field snapshots are stored at the samples
/// closest to `snapshot_times` (FEM only: v and u halves of the state).
/// Throws DomainError when the reference does not cover [t0, t1].
RunResult integrate_closed_loop(SemiDiscreteSystem& sys, std::vector<double> x0,
                                double t0, double t1, const IntegratorConfig& cfg,
                                double sample_dt,
                                std::span<const double> snapshot_times = {},
                                const kernels::KernelTable& k = kernels::active());

}  // namespace fhn
