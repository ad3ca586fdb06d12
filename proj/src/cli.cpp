#include "fhn/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "fhn/config.hpp"
#include "fhn/errors.hpp"
#include "fhn/io.hpp"
#include "fhn/kernels.hpp"
#include "fhn/scenario.hpp"
#include "fhn/spectral.hpp"
#include "fhn/verify.hpp"

namespace fhn {

namespace {

struct Overrides {
  std::string config;
  std::optional<double> k0;
  std::string mesh;
  std::optional<int> modes;
  std::optional<double> t_end;
  std::string out;
  std::string kernels;
};

struct VerifyArgs {
  std::string log;
  std::string check = "funnel";
  double delta = 0.05;
  double lambda = 0.5;
  std::optional<double> t_from;
  std::optional<double> t_max;
};

class Context {
 public:
  Context(RunConfig cfg, std::ostream& out, std::ostream& err)
      : cfg(std::move(cfg)), out(out), err(err) {}

  RunConfig cfg;
  std::ostream& out;
  std::ostream& err;

  std::string path(const std::string& name) const {
    return (std::filesystem::path(cfg.output.dir) / name).string();
  }

  void progress(const std::string& msg) const { err << "fhnctl: " << msg << std::endl; }

  int finish(std::vector<VerificationReport> reports) const {
    out << reports_to_text(reports);
    write_file_atomic(path(cfg.output.report + ".json"), reports_to_json(reports));
    write_file_atomic(path(cfg.output.report + ".txt"), reports_to_text(reports));
    return all_gating_pass(reports) ? kExitOk : kExitVerificationFailed;
  }

  FemDiscretization fem(int nx, int ny) const {
    return FemDiscretization::build(cfg.model, nx, ny);
  }
  FemDiscretization fem() const { return fem(cfg.mesh.nx, cfg.mesh.ny); }
};

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.k0) cfg.controller.k0 = *o.k0;
  if (!o.mesh.empty()) {
    int nx = 0;
    int ny = 0;
    char x = 0;
    std::istringstream is(o.mesh);
    is >> nx;
    if (is >> x) {
      if (x != 'x' || !(is >> ny)) throw ConfigError("--mesh", 0, "expected N or NxM");
    } else {
      ny = nx;
    }
    if (!is.eof() && is.peek() != EOF) throw ConfigError("--mesh", 0, "expected N or NxM");
    cfg.mesh.nx = nx;
    cfg.mesh.ny = ny;
  }
  if (o.modes) cfg.spectral.modes_x = cfg.spectral.modes_y = *o.modes;
  if (o.t_end) {
    cfg.run.t_end = *o.t_end;
    cfg.run.reference_t_end = std::max(cfg.run.reference_t_end, *o.t_end);
  }
  if (!o.out.empty()) cfg.output.dir = o.out;
  if (!o.kernels.empty()) cfg.run.kernels = o.kernels;
  cfg.validate();
}

std::string describe(const IntegrationStats& s) {
  std::ostringstream os;
  os << s.accepted << " steps, " << s.rejected_error << " error rejections, "
     << s.rejected_funnel << " funnel rejections, dt in [" << s.min_dt_accepted << ", "
     << s.max_dt_accepted << "]";
  return os.str();
}

TrajectoryLog prefix(const TrajectoryLog& log, double t_max) {
  TrajectoryLog p;
  p.outputs = log.outputs;
  for (const auto& s : log.samples) {
    if (s.t > t_max) break;
    p.samples.push_back(s);
  }
  return p;
}

double yref_sup(const TrajectoryLog& log, bool use_y) {
  double sup = 0.0;
  for (const auto& s : log.samples) {
    double a = 0.0;
    for (double x : use_y ? s.y : s.y_ref) a += x * x;
    sup = std::max(sup, std::sqrt(a));
  }
  return sup;
}

double second_window_start(const StimulusProgram& stim) {
  std::vector<double> starts;
  for (const auto& p : stim.pulses) {
    for (const auto& w : p.windows) starts.push_back(w.start - p.smoothing_halfwidth);
  }
  std::sort(starts.begin(), starts.end());
  return starts.size() > 1 ? starts[1] : INFINITY;
}

TrajectoryLog obtain_reference(const Context& c, const FemDiscretization& fem, double t_end,
                               bool write) {
  if (!c.cfg.input.reference.empty()) {
    c.progress("reading reference from " + c.cfg.input.reference);
    return read_trajectory(c.cfg.input.reference);
  }
  c.progress("reference: open-loop run to t=" + format_double(t_end));
  auto log = generate_reference(fem, c.cfg.stimulus, t_end, c.cfg.integrator, c.cfg.run.sample_dt);
  if (write) write_trajectory(log, c.path(c.cfg.output.reference));
  return log;
}

VerificationReport reference_energy_report(const Context& c, const FemDiscretization& fem,
                                           const TrajectoryLog& reference) {
  LoopSetup setup;
  setup.params = fem.params;
  setup.toggles = PhysicsToggles::open_loop();
  setup.stimulus = c.cfg.stimulus;
  FemSystem sys(fem.mesh, fem.ops, fem.output, setup);
  const auto budget = energy_budget(c.cfg.model, yref_sup(reference, true), sys.stimulus_sup_l2(),
                                    c.cfg.controller.k0, c.cfg.model.area());
  const auto& s0 = reference.samples.front();
  auto r = check_energy_bound(prefix(reference, c.cfg.funnel.gamma), budget, c.cfg.model,
                              s0.v_l2 * s0.v_l2, s0.u_l2 * s0.u_l2);
  r.name = "energy_bound_reference";
  return r;
}

int cmd_reference(Context& c) {
  const auto fem = c.fem();
  const auto log = obtain_reference(c, fem, c.cfg.run.reference_t_end, true);
  std::vector<VerificationReport> reports;
  reports.push_back(boundedness_check(log, c.cfg.verify.ceilings));
  reports.push_back(reference_energy_report(c, fem, log));
  if (log.samples.back().t >= c.cfg.verify.quiescence_to) {
    auto q = quiescence_check(log, c.cfg.verify.quiescence_from, c.cfg.verify.quiescence_to,
                              c.cfg.verify.quiescence_fraction);
    q.gating = false;
    reports.push_back(q);
  }
  return c.finish(std::move(reports));
}

double floor_from_reference(const Context& c, const FemDiscretization& fem) {
  const double cutoff = std::min(second_window_start(c.cfg.stimulus), c.cfg.run.reference_t_end);
  const auto log = obtain_reference(c, fem, cutoff, false);
  return activity_floor(log, c.cfg.stimulus, c.cfg.reentry.activity_fraction);
}

Snapshot to_snapshot(const FemDiscretization& fem, const ReentrySnapshot& r) {
  return Snapshot{fem.mesh.nx(), fem.mesh.ny(), r.t, r.v, r.u};
}

VerificationReport activity_report(const ReentrySnapshot& r, double followup) {
  VerificationReport a;
  a.name = "reentry_activity";
  a.provenance = "sustained activity after the S1-S2 protocol";
  a.tolerance = r.floor;
  a.measured = {{"v_l2_at_snapshot", r.activity_at_snapshot},
                {"v_l2_after_followup", r.activity_after_followup},
                {"activity_floor", r.floor}};
  a.pass = r.sustained();
  if (!a.pass) a.offending_times = {r.t, r.t + followup};
  return a;
}

int cmd_reentry(Context& c) {
  const auto fem = c.fem();
  const double floor = floor_from_reference(c, fem);
  c.progress("reentry: S1-S2 protocol to t=" + format_double(c.cfg.reentry.snapshot_time));
  const auto snap = generate_reentry(fem, c.cfg.reentry, floor, c.cfg.integrator);
  write_snapshot(to_snapshot(fem, snap), c.path(c.cfg.output.snapshot));
  return c.finish({activity_report(snap, c.cfg.reentry.followup)});
}

int cmd_track(Context& c) {
  const auto& cfg = c.cfg;
  const auto fem = c.fem();
  const auto reference = obtain_reference(c, fem, cfg.run.reference_t_end, true);
  std::vector<VerificationReport> reports;
  Snapshot snap;
  if (!cfg.input.snapshot.empty()) {
    c.progress("reading snapshot from " + cfg.input.snapshot);
    snap = read_snapshot(cfg.input.snapshot);
    if (snap.nx != fem.mesh.nx() || snap.ny != fem.mesh.ny()) {
      throw ConfigError("input.snapshot", 0, "snapshot mesh " + std::to_string(snap.nx) + "x" +
                                                 std::to_string(snap.ny) + " differs from the configured mesh");
    }
  } else {
    const double floor = activity_floor(reference, cfg.stimulus, cfg.reentry.activity_fraction);
    c.progress("reentry: S1-S2 protocol to t=" + format_double(cfg.reentry.snapshot_time));
    const auto r = run_s1s2_protocol(fem, cfg.reentry, floor, cfg.integrator);
    auto a = activity_report(r, cfg.reentry.followup);
    a.gating = false;
    reports.push_back(a);
    snap = to_snapshot(fem, r);
    write_snapshot(snap, c.path(cfg.output.snapshot));
  }
  TrackingSetup ts;
  ts.funnel = cfg.funnel;
  ts.controller = cfg.controller;
  ts.t_end = cfg.run.t_end;
  ts.sample_dt = cfg.run.sample_dt;
  ts.stimulus = cfg.run.tracking_stimulus;
  ts.stimulus_program = cfg.stimulus;
  c.progress("track: closed loop to t=" + format_double(ts.t_end) + ", k0=" +
             format_double(cfg.controller.k0));
  const auto run = run_tracking_experiment(fem, snap.v, snap.u, reference, ts, cfg.integrator);
  c.progress("track: " + describe(run.stats));
  write_trajectory(run.log, c.path(cfg.output.track));

  const auto& log = run.log;
  reports.push_back(check_funnel_invariant(log, cfg.verify.funnel_delta));
  if (log.samples.back().t >= cfg.verify.bound_from) {
    reports.push_back(check_funnel_bound(log, cfg.verify.bound_from));
  }
  reports.push_back(check_proportional_regime(log, cfg.funnel.gamma, cfg.controller.k0));
  reports.push_back(boundedness_check(log, cfg.verify.ceilings));
  reports.push_back(holder_check(log, HolderField::Output, cfg.verify.holder_lambda,
                                 cfg.verify.holder_delta));
  double isi = 0.0;
  if (cfg.run.tracking_stimulus) {
    LoopSetup setup;
    setup.params = fem.params;
    setup.toggles = PhysicsToggles::open_loop();
    setup.stimulus = cfg.stimulus;
    isi = FemSystem(fem.mesh, fem.ops, fem.output, setup).stimulus_sup_l2();
  }
  const auto budget = energy_budget(cfg.model, yref_sup(reference, true), isi, cfg.controller.k0,
                                    cfg.model.area());
  const auto& s0 = log.samples.front();
  auto e = check_energy_bound(prefix(log, cfg.funnel.gamma), budget, cfg.model, s0.v_l2 * s0.v_l2,
                              s0.u_l2 * s0.u_l2);
  reports.push_back(e);
  return c.finish(std::move(reports));
}

int cmd_diffusion(Context& c) {
  const auto& d = c.cfg.diffusion;
  const auto fem = c.fem();
  IntegratorConfig fem_cfg = c.cfg.integrator;
  fem_cfg.rtol = d.rtol;
  fem_cfg.atol = d.atol;
  IntegratorConfig spec_cfg = fem_cfg;
  spec_cfg.rtol = d.spectral_rtol;
  spec_cfg.atol = d.spectral_atol;
  std::vector<VerificationReport> reports;
  c.progress("diffusion-test: FEM eigendecay of mode (" + std::to_string(d.mode_j) + "," +
             std::to_string(d.mode_k) + ")");
  reports.push_back(linear_decay_check(fem, d.mode_j, d.mode_k, d.t_end, fem_cfg,
                                       c.cfg.verify.decay_tolerance_fem));
  const auto basis = build_basis(std::max(d.mode_j, c.cfg.spectral.modes_x - 1),
                                 std::max(d.mode_k, c.cfg.spectral.modes_y - 1), c.cfg.model);
  reports.push_back(linear_decay_check(basis, c.cfg.model, d.mode_j, d.mode_k, d.t_end, spec_cfg,
                                       c.cfg.verify.decay_tolerance_spectral));
  c.progress("diffusion-test: mass conservation to t=" + format_double(d.mass_t_end));
  reports.push_back(mass_conservation_check(fem, d.mass_t_end, fem_cfg, c.cfg.verify.mass_tolerance));
  return c.finish(std::move(reports));
}

int cmd_converge(Context& c) {
  const auto& cv = c.cfg.converge;
  IntegratorConfig icfg = c.cfg.integrator;
  icfg.rtol = cv.rtol;
  icfg.atol = cv.atol;
  const auto basis = build_basis(c.cfg.spectral.modes_x - 1, c.cfg.spectral.modes_y - 1, c.cfg.model);
  std::vector<double> coeff(basis.size(), 0.0);
  coeff[basis.index_of(0, 0)] = 1.0;
  if (basis.max_j() >= 1) coeff[basis.index_of(1, 0)] = 1.0;
  if (basis.max_k() >= 1) coeff[basis.index_of(0, 1)] = 1.0;
  LoopSetup setup;
  setup.params = c.cfg.model;
  setup.toggles = PhysicsToggles::open_loop();
  setup.toggles.stimulus = false;

  c.progress("converge: spectral run, " + std::to_string(basis.size()) + " modes");
  SpectralSystem spec(basis, setup, c.cfg.spectral.quad_x, c.cfg.spectral.quad_y);
  std::vector<double> xs(coeff);
  xs.resize(2 * basis.size(), 0.0);
  const auto spec_log = integrate_closed_loop(spec, xs, 0.0, cv.t_end, icfg, c.cfg.run.sample_dt).log;

  auto fem_log = [&](int nx, int ny) {
    c.progress("converge: FEM run on " + std::to_string(nx) + "x" + std::to_string(ny));
    const auto fem = c.fem(nx, ny);
    FemSystem sys(fem.mesh, fem.ops, fem.output, setup);
    auto x0 = synthesize_nodal(coeff, fem.mesh, basis);
    x0.resize(2 * fem.mesh.num_nodes(), 0.0);
    return integrate_closed_loop(sys, x0, 0.0, cv.t_end, icfg, c.cfg.run.sample_dt).log;
  };
  const auto fine = fem_log(c.cfg.mesh.nx, c.cfg.mesh.ny);
  const auto coarse = fem_log(cv.coarse_nx, cv.coarse_nx);

  std::vector<VerificationReport> reports;
  auto rf = cross_discretization_check(fine, spec_log, c.cfg.verify.cross_tolerance);
  rf.name = "cross_discretization_fine";
  auto rc = cross_discretization_check(coarse, spec_log, c.cfg.verify.cross_tolerance);
  rc.name = "cross_discretization_coarse";
  rc.gating = false;
  VerificationReport mono;
  mono.name = "refinement_monotone";
  mono.provenance = "output gap shrinks under mesh refinement";
  mono.measured = {{"gap_fine", rf.value("sup_gap")}, {"gap_coarse", rc.value("sup_gap")}};
  mono.pass = rc.value("sup_gap") > rf.value("sup_gap");
  if (!mono.pass) mono.offending_times = {rf.value("t_at_sup"), rc.value("t_at_sup")};
  reports = {rf, rc, mono};
  return c.finish(std::move(reports));
}

int cmd_verify(Context& c, const VerifyArgs& a) {
  TrajectoryLog log = read_trajectory(a.log);
  if (a.t_max) log = prefix(log, *a.t_max);
  if (log.empty()) throw ConfigError("--log", 0, "log has no samples in range");
  VerificationReport r;
  if (a.check == "funnel") {
    r = check_funnel_invariant(log, a.delta);
  } else if (a.check == "bound") {
    r = check_funnel_bound(log, a.t_from.value_or(a.delta));
  } else if (a.check == "proportional") {
    r = check_proportional_regime(log, c.cfg.funnel.gamma, c.cfg.controller.k0);
  } else if (a.check == "holder") {
    r = holder_check(log, HolderField::Output, a.lambda, a.delta);
  } else if (a.check == "bounded") {
    r = boundedness_check(log, c.cfg.verify.ceilings);
  } else if (a.check == "energy") {
    const auto budget = energy_budget(c.cfg.model, yref_sup(log, false), 0.0, c.cfg.controller.k0,
                                      c.cfg.model.area());
    const auto& s0 = log.samples.front();
    r = check_energy_bound(log, budget, c.cfg.model, s0.v_l2 * s0.v_l2, s0.u_l2 * s0.u_l2);
  } else {
    throw ConfigError("--check", 0, "unknown check '" + a.check + "'");
  }
  c.out << reports_to_text({r});
  return r.pass ? kExitOk : kExitVerificationFailed;
}

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "YAML run configuration");
  sub->add_option("--k0", o.k0, "controller gain");
  sub->add_option("--mesh", o.mesh, "FEM mesh cells, N or NxM");
  sub->add_option("--modes", o.modes, "spectral modes per axis");
  sub->add_option("--t-end", o.t_end, "horizon of the closed-loop run");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--kernels", o.kernels, "compute kernels: auto, scalar or avx2");
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"FitzHugh-Nagumo monodomain simulation under funnel control", "fhnctl"};
  app.require_subcommand(1);
  Overrides o;
  VerifyArgs va;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  const std::pair<const char*, const char*> names[] = {
      {"reference", "generate the open-loop reference trajectory"},
      {"reentry", "run the S1-S2 protocol and write the reentry snapshot"},
      {"track", "closed-loop funnel tracking from the reentry snapshot"},
      {"diffusion-test", "eigendecay and mass conservation of pure diffusion"},
      {"converge", "FEM against spectral output traces"},
      {"verify", "run one check on a trajectory CSV"},
      {"run", "run the scenario named in the configuration"},
  };
  for (const auto& [name, help] : names) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, o);
    subs.emplace_back(name, sub);
  }
  auto* verify = subs[5].second;
  verify->add_option("--log", va.log, "trajectory CSV")->required();
  verify->add_option("--check", va.check, "funnel, bound, proportional, holder, bounded or energy");
  verify->add_option("--delta", va.delta, "start of the checked interval");
  verify->add_option("--lambda", va.lambda, "Hoelder exponent");
  verify->add_option("--t-from", va.t_from, "start of the funnel bound check");
  verify->add_option("--t-max", va.t_max, "ignore samples after this time");

  if (argc <= 1) {
    err << app.help();
    return kExitConfigError;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "fhnctl: " << e.what() << "\n\n" << app.help();
    return kExitConfigError;
  }

  std::string cmd;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) cmd = name;
  }
  try {
    RunConfig cfg = o.config.empty() ? parse_config("") : load_config(o.config);
    apply_overrides(cfg, o);
    kernels::select(kernels::parse_backend(cfg.run.kernels));
    Context c(std::move(cfg), out, err);
    if (cmd == "run") cmd = to_string(c.cfg.scenario);
    const auto t0 = std::chrono::steady_clock::now();
    int code = kExitOk;
    if (cmd == "reference") code = cmd_reference(c);
    else if (cmd == "reentry") code = cmd_reentry(c);
    else if (cmd == "track") code = cmd_track(c);
    else if (cmd == "diffusion-test") code = cmd_diffusion(c);
    else if (cmd == "converge") code = cmd_converge(c);
    else if (cmd == "verify") {
      if (va.log.empty()) throw ConfigError("--log", 0, "verify needs --log");
      code = cmd_verify(c, va);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.progress(cmd + " finished in " + format_double(std::round(secs * 10.0) / 10.0) + " s");
    return code;
  } catch (const ConfigError& e) {
    err << "fhnctl: configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const FormatError& e) {
    err << "fhnctl: input error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const UnsupportedConfiguration& e) {
    err << "fhnctl: unsupported configuration: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const FunnelViolation& e) {
    err << "fhnctl: integration aborted: " << e.what() << "\n";
    return kExitIntegrationAbort;
  } catch (const IntegrationAbort& e) {
    err << "fhnctl: integration aborted: " << e.what() << "\n";
    return kExitIntegrationAbort;
  } catch (const ReentryNotEstablished& e) {
    err << "fhnctl: " << e.what() << "\n";
    return kExitVerificationFailed;
  } catch (const DomainError& e) {
    err << "fhnctl: invalid input: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "fhnctl: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace fhn
