#include <cmath>
#include <vector>

#include "doctest.h"
#include "fhn/errors.hpp"
#include "fhn/scenario.hpp"

using namespace fhn;

namespace {

const FemDiscretization& coarse() {
  static const FemDiscretization fem = FemDiscretization::build(ModelParams{}, 12, 12);
  return fem;
}

const TrajectoryLog& short_reference() {
  static const TrajectoryLog log = generate_reference(
      coarse(), StimulusProgram::reference_default(), 80.0, IntegratorConfig{}, 0.1);
  return log;
}

}  // namespace

TEST_CASE("fem discretization bundle") {
  const auto& fem = coarse();
  CHECK(fem.mesh.num_nodes() == 169);
  CHECK(fem.ops.size() == 169);
  CHECK(fem.output.outputs() == 4);
  CHECK(fem.zero_state().size() == 2 * 169);
  CHECK_THROWS_AS(FemDiscretization::build(ModelParams{}, 0, 4), DomainError);
}

TEST_CASE("reference is at rest before the first stimulus") {
  const auto& log = short_reference();
  REQUIRE(log.size() == 801);
  for (const auto& s : log.samples) {
    if (s.t > 48.5) break;
    for (double y : s.y) CHECK(y == 0.0);
    CHECK(s.v_l2 == 0.0);
  }
  double peak = 0.0;
  for (const auto& s : log.samples) peak = std::max(peak, s.v_l2);
  CHECK(peak > 1.0);
  for (const auto& s : log.samples) {
    CHECK(s.y_ref == std::vector<double>(4, 0.0));
    CHECK(s.i_se == std::vector<double>(4, 0.0));
    CHECK(std::isinf(s.funnel_radius));
  }
}

TEST_CASE("reference generation is deterministic") {
  const auto again = generate_reference(coarse(), StimulusProgram::reference_default(), 80.0,
                                        IntegratorConfig{}, 0.1);
  CHECK(again == short_reference());
}

TEST_CASE("reference output is symmetric for the centred disc") {
  for (const auto& s : short_reference().samples) {
    CHECK(s.y[0] == doctest::Approx(s.y[1]).epsilon(1e-9).scale(1e-12));
    CHECK(s.y[0] == doctest::Approx(s.y[2]).epsilon(1e-9).scale(1e-12));
    CHECK(s.y[0] == doctest::Approx(s.y[3]).epsilon(1e-9).scale(1e-12));
  }
}

TEST_CASE("spectral reference agrees in shape") {
  const auto basis = build_basis(6, 6, ModelParams{});
  const auto log = generate_reference(basis, ModelParams{}, StimulusProgram::reference_default(),
                                      60.0, IntegratorConfig{}, 0.5);
  REQUIRE(log.size() == 121);
  CHECK(log.samples[90].v_l2 == 0.0);
  CHECK(log.samples[104].v_l2 > 0.9);
  CHECK(log.samples.back().v_l2 < 0.2);
}

TEST_CASE("activity floor uses the first pulse only") {
  const auto& log = short_reference();
  double peak = 0.0;
  for (const auto& s : log.samples) peak = std::max(peak, s.v_l2);
  const auto stim = StimulusProgram::reference_default();
  CHECK(activity_floor(log, stim, 0.1) == doctest::Approx(0.1 * peak));

  StimulusProgram early = stim;
  early.pulses[0].windows = {{49.0, 51.0}, {60.0, 62.0}};
  double pre = 0.0;
  for (const auto& s : log.samples) {
    if (s.t >= 59.5) break;
    pre = std::max(pre, s.v_l2);
  }
  CHECK(activity_floor(log, early, 0.5) == doctest::Approx(0.5 * pre));
}

TEST_CASE("reentry protocol validation") {
  ReentryProtocol p;
  CHECK_NOTHROW(p.validate());
  const auto prog = p.program();
  REQUIRE(prog.pulses.size() == 2);
  CHECK(prog.pulses[0].windows[0] == TimeWindow{0.0, 1.0});
  CHECK(prog.pulses[1].windows[0] == TimeWindow{30.0, 31.0});
  CHECK(prog.pulses[1].region == StimulusRegion::box(0.0, 0.5, 0.0, 0.5));

  ReentryProtocol bad = p;
  bad.s2_time = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = p;
  bad.snapshot_time = 20.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = p;
  bad.activity_fraction = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = p;
  bad.smoothing_halfwidth = 0.5;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = p;
  bad.followup = -1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("reentry without stimulus is not established") {
  ReentryProtocol p;
  p.s1_amp = 0.0;
  p.s2_amp = 0.0;
  p.snapshot_time = 40.0;
  p.followup = 5.0;
  const auto snap = run_s1s2_protocol(coarse(), p, 0.1, IntegratorConfig{});
  CHECK(snap.activity_at_snapshot == 0.0);
  CHECK(snap.activity_after_followup == 0.0);
  CHECK_FALSE(snap.sustained());
  CHECK(snap.t == 40.0);
  CHECK(snap.v.size() == coarse().mesh.num_nodes());
  CHECK_THROWS_AS(generate_reentry(coarse(), p, 0.1, IntegratorConfig{}), ReentryNotEstablished);
}

TEST_CASE("tracking from rest against a zero reference") {
  TrajectoryLog ref;
  for (int i = 0; i <= 20; ++i) {
    Sample s;
    s.t = i * 0.5;
    s.y.assign(4, 0.0);
    s.y_ref.assign(4, 0.0);
    s.i_se.assign(4, 0.0);
    ref.samples.push_back(s);
  }
  TrackingSetup ts;
  ts.t_end = 10.0;
  ts.sample_dt = 0.5;
  const std::vector<double> zero(coarse().mesh.num_nodes(), 0.0);
  const auto run = run_tracking_experiment(coarse(), zero, zero, ref, ts, IntegratorConfig{});
  CHECK(run.log.size() == 21);
  for (const auto& s : run.log.samples) CHECK(s.e_norm == 0.0);
  ts.t_end = 20.0;
  CHECK_THROWS_AS(run_tracking_experiment(coarse(), zero, zero, ref, ts, IntegratorConfig{}),
                  DomainError);
}
