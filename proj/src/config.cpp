#include "fhn/config.hpp"

#include <yaml-cpp/yaml.h>

#include <set>
#include <sstream>
#include <type_traits>

#include "fhn/errors.hpp"
#include "fhn/io.hpp"

namespace fhn {

namespace {

int line_of(const YAML::Node& n) { return n.IsDefined() ? n.Mark().line + 1 : 0; }

template <class T>
const char* type_name() {
  if constexpr (std::is_same_v<T, bool>) return "a boolean";
  else if constexpr (std::is_integral_v<T>) return "an integer";
  else if constexpr (std::is_floating_point_v<T>) return "a number";
  else return "a string";
}

class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_.IsDefined() && !node_.IsNull() && !node_.IsMap()) {
      throw ConfigError(path_.empty() ? "<root>" : path_, line_of(node_), "expected a mapping");
    }
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    if (!node_.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
    return node_[key];
  }

  int line(const std::string& key) const {
    if (node_.IsMap() && node_[key].IsDefined()) return line_of(node_[key]);
    return line_of(node_);
  }

  template <class T>
  static T scalar_as(const YAML::Node& n) {
    if constexpr (std::is_same_v<T, double>) {
      if (n.IsScalar() && (n.Scalar() == "inf" || n.Scalar() == "-inf")) {
        return parse_double(n.Scalar());
      }
    }
    return n.as<T>();
  }

  template <class T>
  void get(const std::string& key, T& out) {
    YAML::Node n = raw(key);
    if (!n.IsDefined() || n.IsNull()) return;
    if (!n.IsScalar()) throw ConfigError(key_path(key), line_of(n), std::string("expected ") + type_name<T>());
    try {
      out = scalar_as<T>(n);
    } catch (const YAML::Exception&) {
      throw ConfigError(key_path(key), line_of(n),
                        std::string("expected ") + type_name<T>() + ", got '" + n.Scalar() + "'");
    }
  }

  void get_numbers(const std::string& key, std::vector<double>& out, std::size_t exact = 0) {
    YAML::Node n = raw(key);
    if (!n.IsDefined() || n.IsNull()) return;
    out = numbers(n, key_path(key), exact);
  }

  Section child(const std::string& key) { return Section(raw(key), key_path(key)); }

  bool present(const std::string& key) const {
    return node_.IsMap() && node_[key].IsDefined();
  }

  void finish() const {
    if (!node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto k = kv.first.as<std::string>();
      if (!seen_.count(k)) throw ConfigError(key_path(k), line_of(kv.first), "unknown key");
    }
  }

  int own_line() const { return line_of(node_); }
  const std::string& path() const { return path_; }

  static std::vector<double> numbers(const YAML::Node& n, const std::string& path,
                                     std::size_t exact) {
    if (!n.IsSequence()) throw ConfigError(path, line_of(n), "expected a list of numbers");
    std::vector<double> v;
    for (const auto& e : n) {
      try {
        v.push_back(scalar_as<double>(e));
      } catch (const YAML::Exception&) {
        throw ConfigError(path, line_of(e), "expected a number");
      }
    }
    if (exact && v.size() != exact) {
      throw ConfigError(path, line_of(n), "expected " + std::to_string(exact) + " numbers");
    }
    return v;
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
void checked(const Section& s, F&& f) {
  try {
    f();
  } catch (const DomainError& e) {
    throw ConfigError(s.path(), s.own_line(), e.what());
  }
}

void positive(Section& s, const std::string& key, double v) {
  if (!(v > 0.0)) {
    throw ConfigError(s.key_path(key), s.line(key), "must be strictly positive, got " + format_double(v));
  }
}

StimulusRegion read_region(Section s) {
  StimulusRegion r;
  const bool box = s.present("box");
  const bool disc = s.present("disc");
  if (box == disc) throw ConfigError(s.path(), s.own_line(), "expected exactly one of 'box' or 'disc'");
  if (box) {
    std::vector<double> b;
    s.get_numbers("box", b, 4);
    r = StimulusRegion::box(b[0], b[1], b[2], b[3]);
  } else {
    Section d = s.child("disc");
    std::vector<double> c{0.5, 0.5};
    double r_sq = 0.0225;
    d.get_numbers("center", c, 2);
    d.get("radius_sq", r_sq);
    positive(d, "radius_sq", r_sq);
    d.finish();
    r = StimulusRegion::disc({c[0], c[1]}, r_sq);
  }
  s.finish();
  return r;
}

StimulusPulse read_pulse(Section s) {
  StimulusPulse p;
  p.windows.clear();
  s.get("amplitude", p.amplitude);
  if (s.present("region")) p.region = read_region(s.child("region"));
  YAML::Node w = s.raw("windows");
  if (w.IsDefined() && !w.IsNull()) {
    if (!w.IsSequence()) throw ConfigError(s.key_path("windows"), line_of(w), "expected a list of [start, end] pairs");
    for (const auto& e : w) {
      auto v = Section::numbers(e, s.key_path("windows"), 2);
      p.windows.push_back({v[0], v[1]});
    }
  }
  s.get("smoothing_halfwidth", p.smoothing_halfwidth);
  s.finish();
  return p;
}

void read_model(Section s, ModelParams& m) {
  const char* names[] = {"c1", "c2", "c3", "c4", "c5"};
  double* fields[] = {&m.c1, &m.c2, &m.c3, &m.c4, &m.c5};
  for (int i = 0; i < 5; ++i) {
    s.get(names[i], *fields[i]);
    positive(s, names[i], *fields[i]);
  }
  Section d = s.child("diffusion");
  d.get("xx", m.diffusion.xx);
  d.get("xy", m.diffusion.xy);
  d.get("yy", m.diffusion.yy);
  d.finish();
  Section e = s.child("extent");
  e.get("lx", m.extent.lx);
  e.get("ly", m.extent.ly);
  positive(e, "lx", m.extent.lx);
  positive(e, "ly", m.extent.ly);
  e.finish();
  s.finish();
  checked(s, [&] { m.validate(); });
}

void read_reentry(Section s, ReentryProtocol& r) {
  s.get("s1_time", r.s1_time);
  s.get("s1_duration", r.s1_duration);
  s.get("s1_amp", r.s1_amp);
  if (s.present("s1_region")) r.s1_region = read_region(s.child("s1_region"));
  s.get("s2_time", r.s2_time);
  s.get("s2_duration", r.s2_duration);
  s.get("s2_amp", r.s2_amp);
  if (s.present("s2_region")) r.s2_region = read_region(s.child("s2_region"));
  s.get("smoothing_halfwidth", r.smoothing_halfwidth);
  s.get("snapshot_time", r.snapshot_time);
  s.get("followup", r.followup);
  s.get("activity_fraction", r.activity_fraction);
  s.finish();
  checked(s, [&] { r.validate(); });
}

}  // namespace

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Reference: return "reference";
    case ScenarioKind::Reentry: return "reentry";
    case ScenarioKind::Track: return "track";
    case ScenarioKind::DiffusionTest: return "diffusion-test";
    case ScenarioKind::Converge: return "converge";
    case ScenarioKind::Verify: return "verify";
  }
  return "?";
}

ScenarioKind parse_scenario(const std::string& s) {
  for (auto k : {ScenarioKind::Reference, ScenarioKind::Reentry, ScenarioKind::Track,
                 ScenarioKind::DiffusionTest, ScenarioKind::Converge, ScenarioKind::Verify}) {
    if (s == to_string(k)) return k;
  }
  throw DomainError("unknown scenario '" + s + "'");
}

void RunConfig::validate() const {
  auto wrap = [](const char* key, auto&& f) {
    try {
      f();
    } catch (const DomainError& e) {
      throw ConfigError(key, 0, e.what());
    } catch (const UnsupportedConfiguration& e) {
      throw ConfigError(key, 0, e.what());
    }
  };
  wrap("model", [&] { model.validate(); });
  wrap("mesh", [&] {
    if (mesh.nx < 1 || mesh.ny < 1) throw DomainError("nx and ny must be >= 1");
  });
  wrap("spectral", [&] {
    if (spectral.modes_x < 1 || spectral.modes_y < 1) throw DomainError("modes must be >= 1");
    if ((spectral.quad_x != 0 && spectral.quad_x < SpectralQuadrature::minimum_points(spectral.modes_x - 1)) ||
        (spectral.quad_y != 0 && spectral.quad_y < SpectralQuadrature::minimum_points(spectral.modes_y - 1))) {
      throw DomainError("quadrature needs at least 2 * modes points per axis");
    }
  });
  wrap("funnel", [&] { funnel.validate(); });
  wrap("controller", [&] { controller.validate(); });
  wrap("integrator", [&] { integrator.validate(); });
  wrap("stimulus", [&] { stimulus.validate(); });
  wrap("reentry", [&] { reentry.validate(); });
  wrap("run", [&] {
    if (!(run.t_end > 0.0)) throw DomainError("t_end must be positive");
    if (!(run.sample_dt > 0.0)) throw DomainError("sample_dt must be positive");
    if (!(run.reference_t_end >= run.t_end)) {
      throw DomainError("reference_t_end must cover t_end");
    }
    kernels::parse_backend(run.kernels);
  });
  wrap("verify", [&] {
    if (!(verify.funnel_delta > 0.0) || !(verify.holder_delta >= 0.0)) {
      throw DomainError("deltas must be positive");
    }
    if (!(verify.holder_lambda > 0.0 && verify.holder_lambda < 1.0)) {
      throw DomainError("holder_lambda must lie in (0, 1)");
    }
  });
  wrap("diffusion", [&] {
    if (diffusion.mode_j < 0 || diffusion.mode_k < 0) throw DomainError("mode must be >= 0");
    if (!(diffusion.t_end > 0.0) || !(diffusion.mass_t_end > 0.0)) {
      throw DomainError("t_end must be positive");
    }
  });
  wrap("converge", [&] {
    if (converge.coarse_nx < 1) throw DomainError("coarse_nx must be >= 1");
    if (!(converge.t_end > 0.0)) throw DomainError("t_end must be positive");
  });
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.mark.line + 1, e.msg);
  }
  RunConfig c;
  Section s(root, "");
  std::string scenario = to_string(c.scenario);
  s.get("scenario", scenario);
  try {
    c.scenario = parse_scenario(scenario);
  } catch (const DomainError& e) {
    throw ConfigError("scenario", s.line("scenario"), e.what());
  }
  read_model(s.child("model"), c.model);
  {
    Section m = s.child("mesh");
    m.get("nx", c.mesh.nx);
    m.get("ny", c.mesh.ny);
    m.finish();
  }
  {
    Section m = s.child("spectral");
    m.get("modes_x", c.spectral.modes_x);
    m.get("modes_y", c.spectral.modes_y);
    m.get("quad_x", c.spectral.quad_x);
    m.get("quad_y", c.spectral.quad_y);
    m.finish();
  }
  {
    Section f = s.child("funnel");
    f.get("gamma", c.funnel.gamma);
    f.get("tau", c.funnel.tau);
    f.finish();
    checked(f, [&] { c.funnel.validate(); });
  }
  {
    Section k = s.child("controller");
    k.get("k0", c.controller.k0);
    k.get("guard_margin", c.controller.guard_margin);
    k.finish();
    checked(k, [&] { c.controller.validate(); });
  }
  {
    Section i = s.child("integrator");
    auto& g = c.integrator;
    i.get("rtol", g.rtol);
    i.get("atol", g.atol);
    i.get("dt_init", g.dt_init);
    i.get("dt_min", g.dt_min);
    i.get("dt_max", g.dt_max);
    i.get("safety", g.safety);
    i.get("max_rejects", g.max_rejects);
    i.get("max_growth", g.max_growth);
    i.get("min_shrink", g.min_shrink);
    i.finish();
    checked(i, [&] { g.validate(); });
  }
  {
    YAML::Node st = s.raw("stimulus");
    if (st.IsDefined() && !st.IsNull()) {
      if (!st.IsSequence()) throw ConfigError("stimulus", line_of(st), "expected a list of pulses");
      c.stimulus.pulses.clear();
      for (std::size_t i = 0; i < st.size(); ++i) {
        c.stimulus.pulses.push_back(read_pulse(Section(st[i], "stimulus[" + std::to_string(i) + "]")));
      }
      try {
        c.stimulus.validate();
      } catch (const DomainError& e) {
        throw ConfigError("stimulus", line_of(st), e.what());
      }
    }
  }
  read_reentry(s.child("reentry"), c.reentry);
  {
    Section r = s.child("run");
    r.get("t_end", c.run.t_end);
    r.get("reference_t_end", c.run.reference_t_end);
    r.get("sample_dt", c.run.sample_dt);
    r.get("kernels", c.run.kernels);
    r.get("tracking_stimulus", c.run.tracking_stimulus);
    r.get_numbers("snapshot_times", c.run.snapshot_times);
    r.finish();
  }
  {
    Section v = s.child("verify");
    auto& g = c.verify;
    v.get("funnel_delta", g.funnel_delta);
    v.get("bound_from", g.bound_from);
    v.get("holder_delta", g.holder_delta);
    v.get("holder_lambda", g.holder_lambda);
    v.get("cross_tolerance", g.cross_tolerance);
    v.get("decay_tolerance_fem", g.decay_tolerance_fem);
    v.get("decay_tolerance_spectral", g.decay_tolerance_spectral);
    v.get("mass_tolerance", g.mass_tolerance);
    Section ce = v.child("ceilings");
    ce.get("v_l2", g.ceilings.v_l2);
    ce.get("u_l2", g.ceilings.u_l2);
    ce.get("du_dt", g.ceilings.du_dt);
    ce.finish();
    v.get("quiescence_from", g.quiescence_from);
    v.get("quiescence_to", g.quiescence_to);
    v.get("quiescence_fraction", g.quiescence_fraction);
    v.finish();
  }
  {
    Section d = s.child("diffusion");
    auto& g = c.diffusion;
    std::vector<double> mode{double(g.mode_j), double(g.mode_k)};
    d.get_numbers("mode", mode, 2);
    g.mode_j = static_cast<int>(mode[0]);
    g.mode_k = static_cast<int>(mode[1]);
    if (g.mode_j != mode[0] || g.mode_k != mode[1]) {
      throw ConfigError("diffusion.mode", d.line("mode"), "expected two integers");
    }
    d.get("t_end", g.t_end);
    d.get("mass_t_end", g.mass_t_end);
    d.get("rtol", g.rtol);
    d.get("atol", g.atol);
    d.get("spectral_rtol", g.spectral_rtol);
    d.get("spectral_atol", g.spectral_atol);
    d.finish();
  }
  {
    Section v = s.child("converge");
    v.get("coarse_nx", c.converge.coarse_nx);
    v.get("t_end", c.converge.t_end);
    v.get("rtol", c.converge.rtol);
    v.get("atol", c.converge.atol);
    v.finish();
  }
  {
    Section o = s.child("output");
    o.get("dir", c.output.dir);
    o.get("reference", c.output.reference);
    o.get("track", c.output.track);
    o.get("snapshot", c.output.snapshot);
    o.get("report", c.output.report);
    o.finish();
  }
  {
    Section i = s.child("input");
    i.get("reference", c.input.reference);
    i.get("snapshot", c.input.snapshot);
    i.finish();
  }
  s.finish();
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const FormatError& e) {
    throw ConfigError("", 0, e.what());
  }
  return parse_config(text);
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

std::string list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out + "]";
}

std::string region(const StimulusRegion& r) {
  if (r.shape == StimulusRegion::Shape::Box) return "{box: " + list({r.x0, r.x1, r.y0, r.y1}) + "}";
  return "{disc: {center: " + list({r.center.x, r.center.y}) +
         ", radius_sq: " + format_double(r.r_sq) + "}}";
}

}  // namespace

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  auto num = [](double x) { return format_double(x); };
  o << "scenario: " << to_string(c.scenario) << "\n";
  o << "model:\n";
  o << "  c1: " << num(c.model.c1) << "\n  c2: " << num(c.model.c2) << "\n  c3: "
    << num(c.model.c3) << "\n  c4: " << num(c.model.c4) << "\n  c5: " << num(c.model.c5) << "\n";
  o << "  diffusion: {xx: " << num(c.model.diffusion.xx) << ", xy: " << num(c.model.diffusion.xy)
    << ", yy: " << num(c.model.diffusion.yy) << "}\n";
  o << "  extent: {lx: " << num(c.model.extent.lx) << ", ly: " << num(c.model.extent.ly) << "}\n";
  o << "mesh: {nx: " << c.mesh.nx << ", ny: " << c.mesh.ny << "}\n";
  o << "spectral: {modes_x: " << c.spectral.modes_x << ", modes_y: " << c.spectral.modes_y
    << ", quad_x: " << c.spectral.quad_x << ", quad_y: " << c.spectral.quad_y << "}\n";
  o << "funnel: {gamma: " << num(c.funnel.gamma) << ", tau: " << num(c.funnel.tau) << "}\n";
  o << "controller: {k0: " << num(c.controller.k0)
    << ", guard_margin: " << num(c.controller.guard_margin) << "}\n";
  const auto& g = c.integrator;
  o << "integrator:\n  rtol: " << num(g.rtol) << "\n  atol: " << num(g.atol)
    << "\n  dt_init: " << num(g.dt_init) << "\n  dt_min: " << num(g.dt_min)
    << "\n  dt_max: " << num(g.dt_max) << "\n  safety: " << num(g.safety)
    << "\n  max_rejects: " << g.max_rejects << "\n  max_growth: " << num(g.max_growth)
    << "\n  min_shrink: " << num(g.min_shrink) << "\n";
  o << "stimulus:" << (c.stimulus.pulses.empty() ? " []\n" : "\n");
  for (const auto& p : c.stimulus.pulses) {
    o << "  - amplitude: " << num(p.amplitude) << "\n    region: " << region(p.region)
      << "\n    windows: [";
    for (std::size_t i = 0; i < p.windows.size(); ++i) {
      o << (i ? ", " : "") << list({p.windows[i].start, p.windows[i].end});
    }
    o << "]\n    smoothing_halfwidth: " << num(p.smoothing_halfwidth) << "\n";
  }
  const auto& r = c.reentry;
  o << "reentry:\n  s1_time: " << num(r.s1_time) << "\n  s1_duration: " << num(r.s1_duration)
    << "\n  s1_amp: " << num(r.s1_amp) << "\n  s1_region: " << region(r.s1_region)
    << "\n  s2_time: " << num(r.s2_time) << "\n  s2_duration: " << num(r.s2_duration)
    << "\n  s2_amp: " << num(r.s2_amp) << "\n  s2_region: " << region(r.s2_region)
    << "\n  smoothing_halfwidth: " << num(r.smoothing_halfwidth)
    << "\n  snapshot_time: " << num(r.snapshot_time) << "\n  followup: " << num(r.followup)
    << "\n  activity_fraction: " << num(r.activity_fraction) << "\n";
  o << "run:\n  t_end: " << num(c.run.t_end) << "\n  reference_t_end: "
    << num(c.run.reference_t_end) << "\n  sample_dt: " << num(c.run.sample_dt)
    << "\n  kernels: " << quote(c.run.kernels)
    << "\n  tracking_stimulus: " << (c.run.tracking_stimulus ? "true" : "false")
    << "\n  snapshot_times: " << list(c.run.snapshot_times) << "\n";
  const auto& v = c.verify;
  o << "verify:\n  funnel_delta: " << num(v.funnel_delta) << "\n  bound_from: "
    << num(v.bound_from) << "\n  holder_delta: " << num(v.holder_delta)
    << "\n  holder_lambda: " << num(v.holder_lambda)
    << "\n  cross_tolerance: " << num(v.cross_tolerance)
    << "\n  decay_tolerance_fem: " << num(v.decay_tolerance_fem)
    << "\n  decay_tolerance_spectral: " << num(v.decay_tolerance_spectral)
    << "\n  mass_tolerance: " << num(v.mass_tolerance) << "\n  ceilings: {v_l2: "
    << num(v.ceilings.v_l2) << ", u_l2: " << num(v.ceilings.u_l2)
    << ", du_dt: " << num(v.ceilings.du_dt) << "}\n  quiescence_from: "
    << num(v.quiescence_from) << "\n  quiescence_to: " << num(v.quiescence_to)
    << "\n  quiescence_fraction: " << num(v.quiescence_fraction) << "\n";
  const auto& d = c.diffusion;
  o << "diffusion:\n  mode: [" << d.mode_j << ", " << d.mode_k << "]\n  t_end: "
    << num(d.t_end) << "\n  mass_t_end: " << num(d.mass_t_end) << "\n  rtol: " << num(d.rtol)
    << "\n  atol: " << num(d.atol) << "\n  spectral_rtol: " << num(d.spectral_rtol)
    << "\n  spectral_atol: " << num(d.spectral_atol) << "\n";
  o << "converge: {coarse_nx: " << c.converge.coarse_nx << ", t_end: " << num(c.converge.t_end)
    << ", rtol: " << num(c.converge.rtol) << ", atol: " << num(c.converge.atol) << "}\n";
  o << "output:\n  dir: " << quote(c.output.dir) << "\n  reference: " << quote(c.output.reference)
    << "\n  track: " << quote(c.output.track) << "\n  snapshot: " << quote(c.output.snapshot)
    << "\n  report: " << quote(c.output.report) << "\n";
  o << "input:\n  reference: " << quote(c.input.reference) << "\n  snapshot: "
    << quote(c.input.snapshot) << "\n";
  return o.str();
}

}  // namespace fhn
