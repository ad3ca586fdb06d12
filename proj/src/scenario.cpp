#include "fhn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fhn/errors.hpp"

namespace fhn {

FemDiscretization FemDiscretization::build(const ModelParams& params, int nx, int ny) {
  params.validate();
  FemDiscretization d;
  d.params = params;
  d.mesh = build_mesh(nx, ny, params.extent);
  d.ops = assemble(d.mesh, params.diffusion);
  d.output = boundary_output(d.mesh);
  return d;
}

void ReentryProtocol::validate() const {
  if (!(s1_time < s2_time && s2_time < snapshot_time)) {
    throw DomainError("reentry protocol needs s1_time < s2_time < snapshot_time");
  }
  if (!(s1_duration > 0.0) || !(s2_duration > 0.0)) {
    throw DomainError("reentry stimulus durations must be positive");
  }
  if (!(followup > 0.0)) throw DomainError("reentry followup must be positive");
  if (!(activity_fraction > 0.0)) throw DomainError("reentry activity_fraction must be positive");
  program().validate();
}

StimulusProgram ReentryProtocol::program() const {
  StimulusPulse s1;
  s1.amplitude = s1_amp;
  s1.region = s1_region;
  s1.windows = {{s1_time, s1_time + s1_duration}};
  s1.smoothing_halfwidth = smoothing_halfwidth;
  StimulusPulse s2 = s1;
  s2.amplitude = s2_amp;
  s2.region = s2_region;
  s2.windows = {{s2_time, s2_time + s2_duration}};
  return StimulusProgram{{s1, s2}};
}

TrajectoryLog generate_reference(const FemDiscretization& fem, const StimulusProgram& stim,
                                 double t_end, const IntegratorConfig& cfg, double sample_dt) {
  LoopSetup setup;
  setup.params = fem.params;
  setup.toggles = PhysicsToggles::open_loop();
  setup.stimulus = stim;
  FemSystem sys(fem.mesh, fem.ops, fem.output, setup);
  return integrate_closed_loop(sys, fem.zero_state(), 0.0, t_end, cfg, sample_dt).log;
}

TrajectoryLog generate_reference(const SpectralBasis& basis, const ModelParams& params,
                                 const StimulusProgram& stim, double t_end,
                                 const IntegratorConfig& cfg, double sample_dt) {
  LoopSetup setup;
  setup.params = params;
  setup.toggles = PhysicsToggles::open_loop();
  setup.stimulus = stim;
  SpectralSystem sys(basis, setup);
  return integrate_closed_loop(sys, std::vector<double>(2 * basis.size(), 0.0), 0.0, t_end,
                               cfg, sample_dt)
      .log;
}

double activity_floor(const TrajectoryLog& reference, const StimulusProgram& stim,
                      double fraction) {
  double cutoff = INFINITY;
  std::vector<double> starts;
  for (const auto& p : stim.pulses) {
    for (const auto& w : p.windows) starts.push_back(w.start - p.smoothing_halfwidth);
  }
  std::sort(starts.begin(), starts.end());
  if (starts.size() > 1) cutoff = starts[1];
  double peak = 0.0;
  for (const auto& s : reference.samples) {
    if (s.t >= cutoff) break;
    peak = std::max(peak, s.v_l2);
  }
  return fraction * peak;
}

ReentrySnapshot run_s1s2_protocol(const FemDiscretization& fem, const ReentryProtocol& proto,
                                  double floor, const IntegratorConfig& cfg) {
  proto.validate();
  LoopSetup setup;
  setup.params = fem.params;
  setup.toggles = PhysicsToggles::open_loop();
  setup.stimulus = proto.program();
  FemSystem sys(fem.mesh, fem.ops, fem.output, setup);

  auto first = integrate_closed_loop(sys, fem.zero_state(), 0.0, proto.snapshot_time, cfg,
                                     proto.snapshot_time);
  ReentrySnapshot snap;
  const std::size_t n = fem.mesh.num_nodes();
  snap.v.assign(first.final_state.begin(), first.final_state.begin() + n);
  snap.u.assign(first.final_state.begin() + n, first.final_state.end());
  snap.t = proto.snapshot_time;
  snap.floor = floor;
  snap.activity_at_snapshot = sys.v_norm(first.final_state);

  auto second = integrate_closed_loop(sys, first.final_state, proto.snapshot_time,
                                      proto.snapshot_time + proto.followup, cfg, proto.followup);
  snap.activity_after_followup = sys.v_norm(second.final_state);
  return snap;
}

ReentrySnapshot generate_reentry(const FemDiscretization& fem, const ReentryProtocol& proto,
                                 double floor, const IntegratorConfig& cfg) {
  auto snap = run_s1s2_protocol(fem, proto, floor, cfg);
  if (!snap.sustained()) {
    std::ostringstream os;
    os << "reentry not established: |v|_L2 = " << snap.activity_at_snapshot << " at t="
       << proto.snapshot_time << " and " << snap.activity_after_followup << " at t="
       << proto.snapshot_time + proto.followup << ", activity floor " << floor
       << "; retune the S1-S2 protocol";
    throw ReentryNotEstablished(os.str());
  }
  return snap;
}

RunResult run_tracking_experiment(const FemDiscretization& fem, const std::vector<double>& v0,
                                  const std::vector<double>& u0, const TrajectoryLog& reference,
                                  const TrackingSetup& ts, const IntegratorConfig& cfg) {
  const std::size_t n = fem.mesh.num_nodes();
  if (v0.size() != n || u0.size() != n) {
    throw DomainError("tracking: snapshot has " + std::to_string(v0.size()) +
                      " nodes, mesh has " + std::to_string(n));
  }
  LoopSetup setup;
  setup.params = fem.params;
  setup.toggles = {true, true, true, ts.stimulus};
  setup.funnel = ts.funnel;
  setup.controller = ts.controller;
  setup.reference = std::make_shared<ReferenceSignal>(ReferenceSignal::from_log(reference));
  if (ts.stimulus) setup.stimulus = ts.stimulus_program;
  FemSystem sys(fem.mesh, fem.ops, fem.output, setup);
  std::vector<double> x0(v0);
  x0.insert(x0.end(), u0.begin(), u0.end());
  return integrate_closed_loop(sys, std::move(x0), 0.0, ts.t_end, cfg, ts.sample_dt);
}

}  // namespace fhn
