#include "fhn/closed_loop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fhn/errors.hpp"

namespace fhn {

void SemiDiscreteSystem::control_terms(double t, std::span<const double> y,
                                       std::span<double> y_ref, std::span<double> e,
                                       double& phi, std::span<double> i_se) const {
  const LoopSetup& s = setup();
  if (!s.toggles.control) {
    std::fill(y_ref.begin(), y_ref.end(), 0.0);
    std::copy(y.begin(), y.end(), e.begin());
    std::fill(i_se.begin(), i_se.end(), 0.0);
    phi = 0.0;
    return;
  }
  s.reference->eval(t, y_ref);
  for (std::size_t i = 0; i < y.size(); ++i) e[i] = y[i] - y_ref[i];
  phi = phi_eval(s.funnel, t);
  feedback(e, phi, s.controller, i_se, t);
}

Sample SemiDiscreteSystem::observe(double t, std::span<const double> x) const {
  const std::size_t m = outputs();
  Sample s;
  s.t = t;
  s.y.resize(m);
  s.y_ref.resize(m);
  s.i_se.resize(m);
  std::vector<double> e(m);
  output(x, s.y);
  double phi = 0.0;
  control_terms(t, s.y, s.y_ref, e, phi, s.i_se);
  double e_sq = 0.0;
  for (double v : e) e_sq += v * v;
  s.e_norm = std::sqrt(e_sq);
  s.funnel_radius = phi == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / phi;
  s.margin = funnel_margin(e, phi);
  s.v_l2 = v_norm(x);
  s.u_l2 = u_norm(x);
  return s;
}

std::vector<double> SemiDiscreteSystem::breakpoints() const {
  const LoopSetup& s = setup();
  std::vector<double> b;
  if (s.toggles.stimulus) b = s.stimulus.breakpoints();
  if (s.toggles.control) b.push_back(s.funnel.gamma);
  std::sort(b.begin(), b.end());
  return b;
}

namespace {

void check_setup(const LoopSetup& s, std::size_t outputs) {
  s.params.validate();
  if (s.toggles.control) {
    s.funnel.validate();
    s.controller.validate();
    if (!s.reference) throw DomainError("closed loop needs a reference signal");
    if (s.reference->outputs() != outputs) {
      throw DomainError("reference has " + std::to_string(s.reference->outputs()) +
                        " components, system has " + std::to_string(outputs) + " outputs");
    }
  }
  if (s.toggles.stimulus) s.stimulus.validate();
}

}  // namespace

FemSystem::FemSystem(const Mesh& mesh, const AssembledOperators& ops,
                     const OutputOperator& out, LoopSetup setup,
                     const kernels::KernelTable& k)
    : mesh_(&mesh), ops_(&ops), out_(&out), setup_(std::move(setup)), k_(k),
      n_(mesh.num_nodes()) {
  if (ops.size() != n_ || out.nodes() != n_) {
    throw DomainError("FemSystem: mesh, operators and output sizes disagree");
  }
  check_setup(setup_, out.outputs());
  for (const auto& p : setup_.stimulus.pulses) {
    stim_loads_.push_back(ops.mass.multiply(p.region.nodal_mask(mesh)));
  }
  kv_.resize(n_);
  load_.resize(n_);
  y_.resize(out.outputs());
  yref_.resize(out.outputs());
  e_.resize(out.outputs());
  ise_.resize(out.outputs());
}

void FemSystem::rhs(double t, std::span<const double> x, std::span<double> dxdt) {
  const auto v = x.subspan(0, n_);
  const auto u = x.subspan(n_, n_);
  ops_->stiffness.multiply(v, kv_, k_);

  bool has_load = false;
  if (setup_.toggles.stimulus) {
    for (std::size_t p = 0; p < stim_loads_.size(); ++p) {
      const auto& pulse = setup_.stimulus.pulses[p];
      const double prof = pulse.profile(t);
      if (prof == 0.0) continue;
      const double scale = pulse.amplitude * prof;
      if (!has_load) std::fill(load_.begin(), load_.end(), 0.0);
      for (std::size_t i = 0; i < n_; ++i) load_[i] += scale * stim_loads_[p][i];
      has_load = true;
    }
  }
  if (setup_.toggles.control) {
    out_->apply(v, y_);
    double phi = 0.0;
    control_terms(t, y_, yref_, e_, phi, ise_);
    if (!has_load) std::fill(load_.begin(), load_.end(), 0.0);
    out_->inject(ise_, load_);
    has_load = true;
  }

  kernels::NodalTerms nt;
  nt.n = n_;
  nt.v = v.data();
  nt.u = u.data();
  nt.kv = kv_.data();
  nt.load = has_load ? load_.data() : nullptr;
  nt.inv_mass = ops_->inv_lumped_mass.data();
  nt.c1 = setup_.params.c1;
  nt.c2 = setup_.params.c2;
  nt.c3 = setup_.params.c3;
  nt.c4 = setup_.params.c4;
  nt.c5 = setup_.params.c5;
  nt.reaction = setup_.toggles.reaction;
  nt.recovery = setup_.toggles.recovery;
  nt.dv = dxdt.data();
  nt.du = dxdt.data() + n_;
  k_.fhn_nodal(nt);
}

void FemSystem::output(std::span<const double> x, std::span<double> y) const {
  out_->apply(x.subspan(0, n_), y);
}

double FemSystem::v_norm(std::span<const double> x) const {
  return std::sqrt(k_.weighted_sumsq(n_, ops_->lumped_mass.data(), x.data()));
}

double FemSystem::u_norm(std::span<const double> x) const {
  return std::sqrt(k_.weighted_sumsq(n_, ops_->lumped_mass.data(), x.data() + n_));
}

double FemSystem::stimulus_sup_l2() const {
  // The smoothed windows never overlap, so sup_t |I_si(t)| is attained with
  // a single pulse at full strength unless pulses share a time.
  double sup = 0.0;
  for (std::size_t p = 0; p < stim_loads_.size(); ++p) {
    const auto mask = setup_.stimulus.pulses[p].region.nodal_mask(*mesh_);
    double sq = 0.0;
    for (std::size_t i = 0; i < n_; ++i) sq += mask[i] * stim_loads_[p][i];
    sup = std::max(sup, std::fabs(setup_.stimulus.pulses[p].amplitude) * std::sqrt(sq));
  }
  return sup;
}

SpectralSystem::SpectralSystem(const SpectralBasis& basis, LoopSetup setup,
                               int quad_points_x, int quad_points_y)
    : basis_(&basis),
      setup_(std::move(setup)),
      quad_(basis,
            quad_points_x > 0 ? quad_points_x : SpectralQuadrature::default_points(basis.max_j()),
            quad_points_y > 0 ? quad_points_y : SpectralQuadrature::default_points(basis.max_k())) {
  check_setup(setup_, 4);
  for (const auto& p : setup_.stimulus.pulses) {
    stim_coeffs_.push_back(project_region(p.region, basis));
  }
  state_.mu.resize(basis.size());
  state_.nu.resize(basis.size());
  forcing_.i_se.assign(4, 0.0);
  y_.resize(4);
  yref_.resize(4);
  e_.resize(4);
}

void SpectralSystem::rhs(double t, std::span<const double> x, std::span<double> dxdt) {
  const std::size_t n = basis_->size();
  std::copy(x.begin(), x.begin() + n, state_.mu.begin());
  std::copy(x.begin() + n, x.end(), state_.nu.begin());
  state_.t = t;

  forcing_.stimulus.clear();
  if (setup_.toggles.stimulus) {
    for (std::size_t p = 0; p < stim_coeffs_.size(); ++p) {
      const auto& pulse = setup_.stimulus.pulses[p];
      const double prof = pulse.profile(t);
      if (prof == 0.0) continue;
      if (forcing_.stimulus.empty()) forcing_.stimulus.assign(n, 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        forcing_.stimulus[j] += pulse.amplitude * prof * stim_coeffs_[p][j];
      }
    }
  }
  if (setup_.toggles.control) {
    output(x, y_);
    double phi = 0.0;
    control_terms(t, y_, yref_, e_, phi, forcing_.i_se);
  }
  const SpectralState d =
      spectral_rhs(state_, *basis_, setup_.params, quad_, forcing_, setup_.toggles);
  std::copy(d.mu.begin(), d.mu.end(), dxdt.begin());
  std::copy(d.nu.begin(), d.nu.end(), dxdt.begin() + n);
}

void SpectralSystem::output(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  const auto& gamma = basis_->output_gamma();
  for (std::size_t i = 0; i < basis_->size(); ++i) {
    for (std::size_t c = 0; c < 4; ++c) y[c] += gamma[i][c] * x[i];
  }
}

double SpectralSystem::v_norm(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < basis_->size(); ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

double SpectralSystem::u_norm(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t i = basis_->size(); i < x.size(); ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

namespace {

class LogObserver final : public StepObserver {
 public:
  LogObserver(const SemiDiscreteSystem& sys, TrajectoryLog& log,
              std::span<const double> snapshot_times, double sample_dt)
      : sys_(sys), log_(log), snapshot_times_(snapshot_times.begin(), snapshot_times.end()),
        half_dt_(0.5 * sample_dt) {
    std::sort(snapshot_times_.begin(), snapshot_times_.end());
  }

  void sample(double t, std::span<const double> x) override {
    pending_.push_back(sys_.observe(t, x));
    while (next_snap_ + pending_snaps_.size() < snapshot_times_.size() &&
           t >= snapshot_times_[next_snap_ + pending_snaps_.size()] - half_dt_) {
      const std::size_t n = x.size() / 2;
      pending_snaps_.push_back({t, std::vector<double>(x.begin(), x.begin() + n),
                                std::vector<double>(x.begin() + n, x.end())});
    }
  }

  void commit() override {
    for (auto& s : pending_) log_.samples.push_back(std::move(s));
    for (auto& s : pending_snaps_) log_.snapshots.push_back(std::move(s));
    next_snap_ += pending_snaps_.size();
    pending_.clear();
    pending_snaps_.clear();
  }

  void rollback() override {
    pending_.clear();
    pending_snaps_.clear();
  }

 private:
  const SemiDiscreteSystem& sys_;
  TrajectoryLog& log_;
  std::vector<double> snapshot_times_;
  double half_dt_;
  std::size_t next_snap_ = 0;
  std::vector<Sample> pending_;
  std::vector<FieldSnapshot> pending_snaps_;
};

}  // namespace

RunResult integrate_closed_loop(SemiDiscreteSystem& sys, std::vector<double> x0,
                                double t0, double t1, const IntegratorConfig& cfg,
                                double sample_dt, std::span<const double> snapshot_times,
                                const kernels::KernelTable& k) {
  if (x0.size() != sys.state_size()) {
    throw DomainError("integrate_closed_loop: initial state has " + std::to_string(x0.size()) +
                      " entries, system expects " + std::to_string(sys.state_size()));
  }
  const LoopSetup& s = sys.setup();
  if (s.toggles.control && !s.reference->covers(t0, t1)) {
    throw DomainError("reference signal covers [" + std::to_string(s.reference->t_begin()) +
                      ", " + std::to_string(s.reference->t_end()) +
                      "], shorter than the requested span [" + std::to_string(t0) + ", " +
                      std::to_string(t1) + "]");
  }
  RunResult result;
  result.log.outputs = sys.outputs();
  LogObserver observer(sys, result.log, snapshot_times, sample_dt);
  Rk23Integrator integrator(
      [&sys](double t, std::span<const double> x, std::span<double> dx) { sys.rhs(t, x, dx); },
      cfg, k);
  const auto bp = sys.breakpoints();
  result.final_state = integrator.integrate(t0, std::move(x0), t1, sample_dt, bp, observer);
  result.stats = integrator.stats();
  return result;
}

}  // namespace fhn
