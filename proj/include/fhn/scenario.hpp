#pragma once

#include <vector>

#include "fhn/closed_loop.hpp"
#include "fhn/fem.hpp"
#include "fhn/mesh.hpp"
#include "fhn/stimulus.hpp"

namespace fhn {

/// Mesh, assembled operators and the four-sided boundary output for one
/// parameter set.
struct FemDiscretization {
  ModelParams params;
  Mesh mesh;
  AssembledOperators ops;
  OutputOperator output;

  static FemDiscretization build(const ModelParams& params, int nx, int ny);
  std::vector<double> zero_state() const { return std::vector<double>(2 * mesh.num_nodes(), 0.0); }
};

/// S1-S2 cross-field stimulation used to leave the tissue in a disordered
/// state: a plane-wave stimulus on the left strip, then a second stimulus on
/// the lower-left quadrant, then free evolution to `snapshot_time`.
struct ReentryProtocol {
  double s1_time = 0.0;
  double s1_duration = 1.0;
  double s1_amp = 101.0;
  StimulusRegion s1_region = StimulusRegion::box(0.0, 0.1, 0.0, 1.0);
  double s2_time = 30.0;
  double s2_duration = 1.0;
  double s2_amp = 101.0;
  StimulusRegion s2_region = StimulusRegion::box(0.0, 0.5, 0.0, 0.5);
  double smoothing_halfwidth = 0.25;
  double snapshot_time = 100.0;
  /// Extra open-loop time after the snapshot over which activity must persist.
  double followup = 50.0;
  /// Activity floor as a fraction of the single-pulse reference peak of |v|.
  double activity_fraction = 0.1;

  void validate() const;
  StimulusProgram program() const;

  bool operator==(const ReentryProtocol&) const = default;
};

/// Open-loop run of the model with I_se = 0 from rest. The log's `y`
/// columns are the reference output B' v_ref.
TrajectoryLog generate_reference(const FemDiscretization& fem, const StimulusProgram& stim,
                                 double t_end, const IntegratorConfig& cfg, double sample_dt);
TrajectoryLog generate_reference(const SpectralBasis& basis, const ModelParams& params,
                                 const StimulusProgram& stim, double t_end,
                                 const IntegratorConfig& cfg, double sample_dt);

/// fraction * max |v|_L2 over the reference samples before the second
/// stimulus window opens (the single-pulse peak).
double activity_floor(const TrajectoryLog& reference, const StimulusProgram& stim,
                      double fraction);

struct ReentrySnapshot {
  std::vector<double> v;
  std::vector<double> u;
  double t = 0.0;
  double activity_at_snapshot = 0.0;
  double activity_after_followup = 0.0;
  double floor = 0.0;
  bool sustained() const {
    return activity_at_snapshot >= floor && activity_after_followup >= floor;
  }
};

/// Runs the protocol and measures activity; never throws on low activity.
ReentrySnapshot run_s1s2_protocol(const FemDiscretization& fem, const ReentryProtocol& proto,
                                  double floor, const IntegratorConfig& cfg);

/// As run_s1s2_protocol, but throws ReentryNotEstablished when activity at
/// snapshot_time or snapshot_time + followup falls below the floor.
ReentrySnapshot generate_reentry(const FemDiscretization& fem, const ReentryProtocol& proto,
                                 double floor, const IntegratorConfig& cfg);

struct TrackingSetup {
  FunnelSpec funnel{};
  ControllerConfig controller{};
  double t_end = 400.0;
  double sample_dt = 0.05;
  /// Keep the intracellular stimulus active in the closed loop.
  bool stimulus = false;
  StimulusProgram stimulus_program = StimulusProgram::reference_default();
};

/// Closed-loop funnel tracking of the reference from the snapshot. Both
/// clocks start at 0.
RunResult run_tracking_experiment(const FemDiscretization& fem, const std::vector<double>& v0,
                                  const std::vector<double>& u0, const TrajectoryLog& reference,
                                  const TrackingSetup& setup, const IntegratorConfig& cfg);

}  // namespace fhn
