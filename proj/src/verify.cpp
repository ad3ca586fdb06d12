#include "fhn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fhn/errors.hpp"
#include "fhn/kernels.hpp"

namespace fhn {

namespace {

constexpr std::size_t kMaxOffending = 100;

double euclid(const std::vector<double>& a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

void note_offender(VerificationReport& r, double t, long& count) {
  ++count;
  if (r.offending_times.size() < kMaxOffending) r.offending_times.push_back(t);
}

void require_samples(const TrajectoryLog& log, const char* who) {
  if (log.empty()) throw DomainError(std::string(who) + ": empty log");
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0.0)) throw DomainError("degenerate least-squares fit");
  return sxy / sxx;
}

class NormRecorder final : public StepObserver {
 public:
  explicit NormRecorder(std::function<double(std::span<const double>)> f) : f_(std::move(f)) {}
  void sample(double t, std::span<const double> x) override {
    pending_t_.push_back(t);
    pending_v_.push_back(f_(x));
  }
  void commit() override {
    t.insert(t.end(), pending_t_.begin(), pending_t_.end());
    v.insert(v.end(), pending_v_.begin(), pending_v_.end());
    rollback();
  }
  void rollback() override {
    pending_t_.clear();
    pending_v_.clear();
  }
  std::vector<double> t;
  std::vector<double> v;

 private:
  std::function<double(std::span<const double>)> f_;
  std::vector<double> pending_t_;
  std::vector<double> pending_v_;
};

NormRecorder run_norms(SemiDiscreteSystem& sys, std::vector<double> x0, double t_end,
                       const IntegratorConfig& cfg, double sample_dt,
                       std::function<double(std::span<const double>)> f) {
  NormRecorder rec(std::move(f));
  Rk23Integrator integ(
      [&sys](double t, std::span<const double> x, std::span<double> d) { sys.rhs(t, x, d); },
      cfg);
  integ.integrate(0.0, std::move(x0), t_end, sample_dt, {}, rec);
  return rec;
}

VerificationReport decay_report(const std::vector<double>& t, const std::vector<double>& norm,
                                double alpha, double tol, const std::string& name) {
  VerificationReport r;
  r.name = name;
  r.provenance = "spectrum of the Neumann operator is {-alpha_jk}";
  const double rate = fit_log_rate(t, norm);
  const double gap = std::abs(rate + alpha);
  r.tolerance = tol;
  r.measured = {{"rate", rate}, {"expected", -alpha}, {"abs_error", gap}};
  r.pass = gap <= tol;
  if (!r.pass) r.offending_times = {t.back()};
  return r;
}

}  // namespace

double VerificationReport::value(const std::string& key) const {
  for (const auto& [k, v] : measured) {
    if (k == key) return v;
  }
  throw DomainError("report '" + name + "' has no measured value '" + key + "'");
}

VerificationReport check_funnel_invariant(const TrajectoryLog& log, double delta) {
  require_samples(log, "check_funnel_invariant");
  if (!(delta > 0.0)) throw DomainError("check_funnel_invariant: delta must be positive");
  VerificationReport r;
  r.name = "funnel_invariant";
  r.provenance = "phi(t)^2 |e(t)|^2 <= 1 - eps0 for all t >= delta";
  double eps0 = std::numeric_limits<double>::infinity();
  double t_min = 0.0;
  long considered = 0;
  long bad = 0;
  for (const auto& s : log.samples) {
    if (s.t < delta) continue;
    ++considered;
    if (s.margin < eps0) {
      eps0 = s.margin;
      t_min = s.t;
    }
    if (!(s.margin > 0.0)) note_offender(r, s.t, bad);
  }
  r.measured = {{"eps0", eps0}, {"t_at_min", t_min}, {"samples", double(considered)},
                {"violations", double(bad)}};
  r.pass = considered > 0 && bad == 0 && eps0 > 0.0;
  if (considered == 0) r.detail = "no samples with t >= delta";
  return r;
}

VerificationReport check_funnel_bound(const TrajectoryLog& log, double t_from) {
  require_samples(log, "check_funnel_bound");
  VerificationReport r;
  r.name = "funnel_bound";
  r.provenance = "|e(t)| < 1/phi(t) inside the performance funnel";
  double worst = -std::numeric_limits<double>::infinity();
  double max_err = 0.0;
  long considered = 0;
  long bad = 0;
  for (const auto& s : log.samples) {
    if (s.t < t_from) continue;
    ++considered;
    worst = std::max(worst, s.e_norm - s.funnel_radius);
    max_err = std::max(max_err, s.e_norm);
    if (!(s.e_norm < s.funnel_radius)) note_offender(r, s.t, bad);
  }
  r.measured = {{"max_e_norm", max_err}, {"max_e_minus_radius", worst},
                {"samples", double(considered)}, {"violations", double(bad)}};
  r.pass = considered > 0 && bad == 0;
  if (considered == 0) r.detail = "no samples with t >= t_from";
  return r;
}

VerificationReport check_proportional_regime(const TrajectoryLog& log, double gamma, double k0) {
  require_samples(log, "check_proportional_regime");
  VerificationReport r;
  r.name = "proportional_regime";
  r.provenance = "I_se = -k0 e while phi = 0";
  long considered = 0;
  long bad = 0;
  for (const auto& s : log.samples) {
    if (s.t > gamma) continue;
    ++considered;
    bool ok = s.i_se.size() == s.y.size() && std::isinf(s.funnel_radius);
    for (std::size_t i = 0; ok && i < s.y.size(); ++i) {
      const double e = s.y[i] - s.y_ref[i];
      ok = s.i_se[i] == -k0 * e;
    }
    if (!ok) note_offender(r, s.t, bad);
  }
  r.measured = {{"samples", double(considered)}, {"violations", double(bad)}};
  r.pass = considered > 0 && bad == 0;
  if (considered == 0) r.detail = "no samples with t <= gamma";
  return r;
}

VerificationReport check_energy_bound(const TrajectoryLog& log, const EnergyBudget& budget,
                                      const ModelParams& params, double v0_norm_sq,
                                      double u0_norm_sq) {
  require_samples(log, "check_energy_bound");
  for (const auto& s : log.samples) {
    if (std::isfinite(s.funnel_radius)) {
      std::ostringstream os;
      os << "check_energy_bound: inapplicable, funnel is bounded at t=" << s.t
         << " (the bound holds only while phi = 0)";
      throw DomainError(os.str());
    }
  }
  VerificationReport r;
  r.name = "energy_bound";
  r.provenance = "c5|v|^2 + |u|^2 <= 2 C_inf t + 2 V(v0, u0) on the proportional interval";
  const double v0 = lyapunov(v0_norm_sq, u0_norm_sq, params);
  const double t0 = log.samples.front().t;
  double min_slack = std::numeric_limits<double>::infinity();
  long bad = 0;
  for (const auto& s : log.samples) {
    const double lhs = params.c5 * s.v_l2 * s.v_l2 + s.u_l2 * s.u_l2;
    const double rhs = budget.bound(s.t - t0, v0);
    min_slack = std::min(min_slack, rhs - lhs);
    if (!(lhs <= rhs)) note_offender(r, s.t, bad);
  }
  r.measured = {{"c_infty", budget.c_infty}, {"min_slack", min_slack},
                {"initial_lyapunov", v0}, {"violations", double(bad)}};
  r.pass = bad == 0;
  return r;
}

double fit_log_rate(const std::vector<double>& t, const std::vector<double>& norm) {
  if (t.size() != norm.size() || t.size() < 2) {
    throw DomainError("decay fit needs at least two samples");
  }
  std::vector<double> logs(norm.size());
  for (std::size_t i = 0; i < norm.size(); ++i) {
    if (!(norm[i] > 0.0) || !std::isfinite(norm[i])) {
      throw DomainError("decay fit: norm vanished or diverged");
    }
    logs[i] = std::log(norm[i]);
  }
  return slope(t, logs);
}

VerificationReport linear_decay_check(const FemDiscretization& fem, int j, int k, double t_end,
                                      const IntegratorConfig& cfg, double rel_tol) {
  const SpectralBasis basis = build_basis(j, k, fem.params);
  const std::size_t idx = basis.index_of(j, k);
  const double alpha = basis.eigenvalues()[idx];
  LoopSetup setup;
  setup.params = fem.params;
  setup.toggles = PhysicsToggles::pure_diffusion();
  FemSystem sys(fem.mesh, fem.ops, fem.output, setup);
  std::vector<double> coeff(basis.size(), 0.0);
  coeff[idx] = 1.0;
  std::vector<double> x0 = synthesize_nodal(coeff, fem.mesh, basis);
  x0.resize(2 * fem.mesh.num_nodes(), 0.0);
  auto rec = run_norms(sys, std::move(x0), t_end, cfg, t_end / 100.0,
                       [&sys](std::span<const double> x) { return sys.v_norm(x); });
  std::ostringstream name;
  name << "linear_decay_fem(" << j << "," << k << ")";
  return decay_report(rec.t, rec.v, alpha, rel_tol * alpha + 1e-9, name.str());
}

VerificationReport linear_decay_check(const SpectralBasis& basis, const ModelParams& params,
                                      int j, int k, double t_end, const IntegratorConfig& cfg,
                                      double abs_tol) {
  if (j > basis.max_j() || k > basis.max_k()) {
    throw DomainError("linear_decay_check: mode outside the basis");
  }
  const std::size_t idx = basis.index_of(j, k);
  const double alpha = basis.eigenvalues()[idx];
  LoopSetup setup;
  setup.params = params;
  setup.toggles = PhysicsToggles::pure_diffusion();
  SpectralSystem sys(basis, setup);
  std::vector<double> x0(2 * basis.size(), 0.0);
  x0[idx] = 1.0;
  auto rec = run_norms(sys, std::move(x0), t_end, cfg, t_end / 100.0,
                       [&sys](std::span<const double> x) { return sys.v_norm(x); });
  std::ostringstream name;
  name << "linear_decay_spectral(" << j << "," << k << ")";
  return decay_report(rec.t, rec.v, alpha, abs_tol, name.str());
}

VerificationReport mass_conservation_check(const FemDiscretization& fem, double t_end,
                                           const IntegratorConfig& cfg, double rel_tol) {
  LoopSetup setup;
  setup.params = fem.params;
  setup.toggles = PhysicsToggles::pure_diffusion();
  FemSystem sys(fem.mesh, fem.ops, fem.output, setup);
  const auto& lumped = fem.ops.lumped_mass;
  const Extent e = fem.params.extent;
  std::vector<double> x0 = interpolate(fem.mesh, [e](double x, double y) {
    const double dx = x - 0.3 * e.lx;
    const double dy = y - 0.6 * e.ly;
    return 1.0 + std::cos(M_PI * x / e.lx) * std::cos(2.0 * M_PI * y / e.ly) +
           2.0 * std::exp(-40.0 * (dx * dx + dy * dy));
  });
  x0.resize(2 * fem.mesh.num_nodes(), 0.0);
  const std::size_t n = fem.mesh.num_nodes();
  auto total = [&lumped, n](std::span<const double> x) {
    return kernels::active().dot(n, lumped.data(), x.data());
  };
  const double m0 = total(x0);
  auto rec = run_norms(sys, std::move(x0), t_end, cfg, t_end / 100.0, total);
  VerificationReport r;
  r.name = "mass_conservation";
  r.provenance = "Neumann diffusion preserves the integral of v";
  r.tolerance = rel_tol;
  double worst = 0.0;
  long bad = 0;
  for (std::size_t i = 0; i < rec.t.size(); ++i) {
    const double drift = std::abs(rec.v[i] - m0) / std::abs(m0);
    worst = std::max(worst, drift);
    if (!(drift <= rel_tol)) note_offender(r, rec.t[i], bad);
  }
  r.measured = {{"initial_mass", m0}, {"max_relative_drift", worst}};
  r.pass = bad == 0;
  return r;
}

HolderEstimate holder_estimate(const std::vector<double>& t,
                               const std::vector<std::vector<double>>& f, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("holder_estimate: lambda in (0,1)");
  if (t.size() != f.size()) throw DomainError("holder_estimate: size mismatch");
  if (t.size() < 100) {
    throw DomainError("holder_estimate: needs at least 100 samples, got " +
                      std::to_string(t.size()));
  }
  const std::size_t n = t.size();
  const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(t[i] - t[i - 1] - dt) > 1e-6 * dt) {
      throw DomainError("holder_estimate: sample grid is not uniform");
    }
  }
  HolderEstimate h;
  for (std::size_t lag = 1; lag < n; lag *= 2) {
    double sup = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) {
      double d = 0.0;
      for (std::size_t c = 0; c < f[i].size(); ++c) {
        const double x = f[i + lag][c] - f[i][c];
        d += x * x;
      }
      sup = std::max(sup, std::sqrt(d));
    }
    const double tau = t[lag] - t[0];
    h.lags.push_back(tau);
    h.increments.push_back(sup);
    h.quotient = std::max(h.quotient, sup / std::pow(tau, lambda));
  }
  const std::size_t scales = std::max<std::size_t>(3, (h.lags.size() + 1) / 2);
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t m = 0; m < std::min(scales, h.lags.size()); ++m) {
    if (h.increments[m] > 0.0) {
      lx.push_back(std::log(h.lags[m]));
      ly.push_back(std::log(h.increments[m]));
    }
  }
  h.exponent = lx.size() >= 2 ? slope(lx, ly) : std::numeric_limits<double>::infinity();
  return h;
}

VerificationReport holder_check(const TrajectoryLog& log, HolderField field, double lambda,
                                double delta) {
  std::vector<double> t;
  std::vector<std::vector<double>> f;
  for (const auto& s : log.samples) {
    if (s.t < delta) continue;
    t.push_back(s.t);
    f.push_back(field == HolderField::Output ? s.y : std::vector<double>{s.v_l2});
  }
  const HolderEstimate h = holder_estimate(t, f, lambda);
  VerificationReport r;
  r.name = field == HolderField::Output ? "holder_y" : "holder_v_l2";
  r.provenance = "Hoelder continuity on [delta, inf); necessary-condition check";
  r.tolerance = lambda - 0.1;
  r.measured = {{"lambda", lambda}, {"quotient", h.quotient}, {"exponent_fit", h.exponent},
                {"delta", delta}};
  r.pass = std::isfinite(h.quotient) && h.exponent >= lambda - 0.1;
  if (!r.pass) r.offending_times = {t.front(), t.back()};
  return r;
}

VerificationReport cross_discretization_check(const TrajectoryLog& a, const TrajectoryLog& b,
                                              double tolerance) {
  if (a.size() != b.size() || a.empty()) {
    throw DomainError("cross_discretization_check: sample counts differ (" +
                      std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  VerificationReport r;
  r.name = "cross_discretization";
  r.provenance = "Galerkin outputs converge to the weak solution";
  r.tolerance = tolerance;
  std::vector<double> per(a.outputs, 0.0);
  double gap = 0.0;
  double t_gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& sa = a.samples[i];
    const auto& sb = b.samples[i];
    if (std::abs(sa.t - sb.t) > 1e-9 * std::max(1.0, std::abs(sa.t))) {
      std::ostringstream os;
      os << "cross_discretization_check: grid mismatch at sample " << i << " (t=" << sa.t
         << " vs " << sb.t << ")";
      throw DomainError(os.str());
    }
    if (sa.y.size() != sb.y.size()) throw DomainError("cross_discretization_check: outputs");
    for (std::size_t c = 0; c < sa.y.size() && c < per.size(); ++c) {
      const double d = std::abs(sa.y[c] - sb.y[c]);
      per[c] = std::max(per[c], d);
      if (d > gap) {
        gap = d;
        t_gap = sa.t;
      }
    }
  }
  r.measured = {{"sup_gap", gap}, {"t_at_sup", t_gap}};
  for (std::size_t c = 0; c < per.size(); ++c) {
    r.measured.emplace_back("gap_y" + std::to_string(c + 1), per[c]);
  }
  r.pass = gap <= tolerance;
  if (!r.pass) r.offending_times = {t_gap};
  return r;
}

VerificationReport boundedness_check(const TrajectoryLog& log,
                                     const BoundednessCeilings& ceilings) {
  VerificationReport r;
  r.name = "boundedness";
  r.provenance = "u, du/dt, v bounded in L2";
  double sv = 0.0;
  double su = 0.0;
  double sdu = 0.0;
  long bad = 0;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& s = log.samples[i];
    double du = 0.0;
    if (i > 0) {
      const auto& p = log.samples[i - 1];
      du = std::abs(s.u_l2 - p.u_l2) / (s.t - p.t);
    }
    const bool ok = std::isfinite(s.v_l2) && std::isfinite(s.u_l2) && std::isfinite(du) &&
                    s.v_l2 <= ceilings.v_l2 && s.u_l2 <= ceilings.u_l2 && du <= ceilings.du_dt;
    if (!ok) note_offender(r, s.t, bad);
    sv = std::max(sv, s.v_l2);
    su = std::max(su, s.u_l2);
    sdu = std::max(sdu, du);
  }
  r.measured = {{"sup_v_l2", sv}, {"sup_u_l2", su}, {"sup_du_dt", sdu}};
  r.pass = bad == 0;
  return r;
}

VerificationReport quiescence_check(const TrajectoryLog& reference, double t_from, double t_to,
                                    double fraction) {
  require_samples(reference, "quiescence_check");
  VerificationReport r;
  r.name = "reference_quiescence";
  r.provenance = "regular heart beat: two pulses with rest in between";
  r.tolerance = fraction;
  double peak = 0.0;
  for (const auto& s : reference.samples) peak = std::max(peak, euclid(s.y));
  double worst = 0.0;
  long bad = 0;
  for (const auto& s : reference.samples) {
    if (s.t < t_from || s.t > t_to) continue;
    const double a = euclid(s.y);
    worst = std::max(worst, a);
    if (!(a < fraction * peak)) note_offender(r, s.t, bad);
  }
  r.measured = {{"peak", peak}, {"max_in_window", worst},
                {"ratio", peak > 0.0 ? worst / peak : 0.0}};
  r.pass = peak > 0.0 && bad == 0;
  return r;
}

bool all_gating_pass(const std::vector<VerificationReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const auto& r) { return !r.gating || r.pass; });
}

}  // namespace fhn
