#pragma once

#include <string>
#include <vector>

#include "fhn/funnel.hpp"
#include "fhn/model.hpp"
#include "fhn/rk23.hpp"
#include "fhn/scenario.hpp"
#include "fhn/stimulus.hpp"
#include "fhn/verify.hpp"

namespace fhn {

enum class ScenarioKind { Reference, Reentry, Track, DiffusionTest, Converge, Verify };

const char* to_string(ScenarioKind k);
ScenarioKind parse_scenario(const std::string& s);

struct MeshConfig {
  int nx = 64;
  int ny = 64;
  bool operator==(const MeshConfig&) const = default;
};

struct SpectralConfig {
  /// Modes per axis, j = 0 .. modes_x - 1.
  int modes_x = 20;
  int modes_y = 20;
  /// Quadrature points per axis; 0 selects the default.
  int quad_x = 0;
  int quad_y = 0;
  bool operator==(const SpectralConfig&) const = default;
};

struct RunSettings {
  double t_end = 400.0;
  double reference_t_end = 400.0;
  double sample_dt = 0.05;
  /// Compute kernels: "auto", "scalar" or "avx2".
  std::string kernels = "auto";
  /// Keep I_si switched on in the closed loop.
  bool tracking_stimulus = false;
  std::vector<double> snapshot_times;
  bool operator==(const RunSettings&) const = default;
};

struct VerifyConfig {
  double funnel_delta = 0.05;
  double bound_from = 300.0;
  double holder_delta = 1.0;
  double holder_lambda = 0.5;
  double cross_tolerance = 1e-2;
  double decay_tolerance_fem = 0.02;
  double decay_tolerance_spectral = 1e-10;
  double mass_tolerance = 1e-6;
  BoundednessCeilings ceilings{};
  double quiescence_from = 150.0;
  double quiescence_to = 290.0;
  double quiescence_fraction = 0.01;
  bool operator==(const VerifyConfig&) const = default;
};

struct DiffusionTestConfig {
  int mode_j = 1;
  int mode_k = 0;
  double t_end = 5.0;
  double mass_t_end = 10.0;
  double rtol = 1e-8;
  double atol = 1e-12;
  double spectral_rtol = 1e-12;
  double spectral_atol = 1e-14;
  bool operator==(const DiffusionTestConfig&) const = default;
};

struct ConvergeConfig {
  int coarse_nx = 8;
  double t_end = 20.0;
  double rtol = 1e-6;
  double atol = 1e-9;
  bool operator==(const ConvergeConfig&) const = default;
};

struct OutputConfig {
  std::string dir = "out";
  std::string reference = "reference.csv";
  std::string track = "track.csv";
  std::string snapshot = "snapshot.txt";
  std::string report = "report";
  bool operator==(const OutputConfig&) const = default;
};

struct InputConfig {
  /// Precomputed reference trajectory and reentry snapshot; empty means
  /// generate them.
  std::string reference;
  std::string snapshot;
  bool operator==(const InputConfig&) const = default;
};

struct RunConfig {
  ScenarioKind scenario = ScenarioKind::Track;
  ModelParams model{};
  MeshConfig mesh{};
  SpectralConfig spectral{};
  FunnelSpec funnel{};
  ControllerConfig controller{};
  IntegratorConfig integrator{};
  StimulusProgram stimulus = StimulusProgram::reference_default();
  ReentryProtocol reentry{};
  RunSettings run{};
  VerifyConfig verify{};
  DiffusionTestConfig diffusion{};
  ConvergeConfig converge{};
  OutputConfig output{};
  InputConfig input{};

  /// Throws ConfigError naming the offending section.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

/// Parses a YAML document. Omitted keys keep their defaults; unknown keys,
/// type mismatches and invariant violations throw ConfigError with the
/// dotted key path and line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// YAML rendering with every key spelled out; parse_config inverts it.
std::string serialize_config(const RunConfig& cfg);

}  // namespace fhn
