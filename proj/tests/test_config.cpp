#include <limits>
#include <string>

#include "doctest.h"
#include "fhn/config.hpp"
#include "fhn/errors.hpp"

using namespace fhn;

namespace {

ConfigError config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a ConfigError for:\n" << text);
  return ConfigError("", 0, "");
}

}  // namespace

TEST_CASE("empty document gives the canonical configuration") {
  const RunConfig c = parse_config("");
  CHECK(c == RunConfig{});
  CHECK(c.mesh.nx == 64);
  CHECK(c.mesh.ny == 64);
  CHECK(c.controller.k0 == 0.75);
  CHECK(c.funnel.gamma == 0.05);
  CHECK(c.funnel.tau == 100.0);
  CHECK(c.model.c1 == 1.614);
  CHECK(c.model.c2 == 0.1403);
  CHECK(c.model.c3 == 0.012);
  CHECK(c.model.c4 == 0.00015);
  CHECK(c.model.c5 == 0.015);
  CHECK(c.model.diffusion == Diffusion::isotropic(0.015));
  CHECK(c.stimulus == StimulusProgram::reference_default());
  CHECK(c.scenario == ScenarioKind::Track);
  CHECK(parse_config("# only a comment\n") == RunConfig{});
}

TEST_CASE("overrides keep the other defaults") {
  const RunConfig c = parse_config("mesh: {nx: 32, ny: 32}\n");
  RunConfig expect;
  expect.mesh = {32, 32};
  CHECK(c == expect);

  const RunConfig d = parse_config("controller:\n  k0: 2.5\nrun:\n  t_end: 50\n");
  CHECK(d.controller.k0 == 2.5);
  CHECK(d.run.t_end == 50.0);
  CHECK(d.mesh == MeshConfig{});
  CHECK(d.model == ModelParams{});
}

TEST_CASE("invariant violations name the key") {
  const auto e = config_error("model:\n  c3: -1\n");
  CHECK(e.key() == "model.c3");
  CHECK(std::string(e.what()).find("c3") != std::string::npos);
  CHECK(config_error("controller: {k0: 0}\n").key().find("controller") == 0);
  CHECK(config_error("mesh: {nx: 0}\n").key().find("mesh") == 0);
  CHECK(config_error("funnel: {gamma: -1}\n").key().find("funnel") == 0);
}

TEST_CASE("unknown keys report their line") {
  const auto e = config_error("mesh:\n  nx: 16\n  nz: 3\n");
  CHECK(e.key() == "mesh.nz");
  CHECK(e.line() == 3);
  CHECK(std::string(e.what()).find("unknown key") != std::string::npos);
  CHECK(config_error("bogus: 1\n").key() == "bogus");
}

TEST_CASE("type mismatches report the key path") {
  const auto e = config_error("mesh:\n  nx: sixty\n");
  CHECK(e.key() == "mesh.nx");
  CHECK(e.line() == 2);
  CHECK(config_error("run: {tracking_stimulus: maybe}\n").key() == "run.tracking_stimulus");
  CHECK(config_error("model: [1, 2]\n").key() == "model");
  CHECK(config_error("scenario: dance\n").key() == "scenario");
  CHECK(config_error("- just\n- a list\n").line() >= 0);
}

TEST_CASE("malformed yaml is a config error") {
  CHECK_THROWS_AS(parse_config("mesh: {nx: 3\n"), ConfigError);
}

TEST_CASE("stimulus and regions") {
  const RunConfig c = parse_config(
      "stimulus:\n"
      "  - amplitude: 50\n"
      "    region: {box: [0, 0.2, 0.1, 0.3]}\n"
      "    windows: [[1, 2]]\n"
      "    smoothing_halfwidth: 0.1\n"
      "  - amplitude: 20\n"
      "    region: {disc: {center: [0.25, 0.75], radius_sq: 0.01}}\n"
      "    windows: [[5, 7], [9, 11]]\n"
      "    smoothing_halfwidth: 0.5\n");
  REQUIRE(c.stimulus.pulses.size() == 2);
  CHECK(c.stimulus.pulses[0].region == StimulusRegion::box(0.0, 0.2, 0.1, 0.3));
  CHECK(c.stimulus.pulses[1].region == StimulusRegion::disc({0.25, 0.75}, 0.01));
  CHECK(c.stimulus.pulses[1].windows.size() == 2);
  CHECK(parse_config("stimulus: []\n").stimulus.empty());
  CHECK_THROWS_AS(parse_config("stimulus:\n  - region: {ring: 1}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("stimulus:\n  - windows: [[2, 1]]\n"), ConfigError);
}

TEST_CASE("scenario names") {
  for (auto k : {ScenarioKind::Reference, ScenarioKind::Reentry, ScenarioKind::Track,
                 ScenarioKind::DiffusionTest, ScenarioKind::Converge, ScenarioKind::Verify}) {
    CHECK(parse_scenario(to_string(k)) == k);
  }
  CHECK(std::string(to_string(ScenarioKind::DiffusionTest)) == "diffusion-test");
}

TEST_CASE("serialization is idempotent") {
  const RunConfig base = parse_config("");
  CHECK(parse_config(serialize_config(base)) == base);

  RunConfig c;
  c.scenario = ScenarioKind::Converge;
  c.mesh = {48, 40};
  c.model.c3 = 0.0125;
  c.model.diffusion = {0.02, 0.001, 0.01};
  c.controller.k0 = 1.0 / 3.0;
  c.run.snapshot_times = {0.1, 100.0, 1e-7};
  c.run.kernels = "scalar";
  c.output.dir = "some dir/with: colon";
  c.input.reference = "ref.csv";
  c.verify.ceilings.du_dt = std::numeric_limits<double>::infinity();
  c.stimulus.pulses[0].region = StimulusRegion::box(0.0, 0.3, 0.2, 0.9);
  c.reentry.s2_region = StimulusRegion::disc({0.1, 0.2}, 0.04);
  const RunConfig once = parse_config(serialize_config(c));
  CHECK(once == c);
  CHECK(serialize_config(once) == serialize_config(c));
}

TEST_CASE("missing config file") {
  CHECK_THROWS_AS(load_config("/nonexistent/dir/none.cfg"), ConfigError);
}

TEST_CASE("shipped configuration matches the defaults") {
  CHECK(load_config(std::string(FHN_CONFIG_DIR) + "/paper.cfg") == RunConfig{});
}
