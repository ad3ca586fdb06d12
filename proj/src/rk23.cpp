#include "fhn/rk23.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fhn/errors.hpp"

namespace fhn {

namespace {

// Bogacki-Shampine tableau.
constexpr double kB3[3] = {2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0};
constexpr double kErr[4] = {-5.0 / 72.0, 1.0 / 12.0, 1.0 / 9.0, -1.0 / 8.0};

double suggest(double dt, double err, const IntegratorConfig& cfg) {
  double factor = err > 0.0 ? cfg.safety * std::pow(err, -1.0 / 3.0) : cfg.max_growth;
  factor = std::clamp(factor, cfg.min_shrink, cfg.max_growth);
  return std::clamp(dt * factor, cfg.dt_min, cfg.dt_max);
}

struct Workspace {
  std::vector<double> k1, k2, k3, k4, tmp, x_next;
  explicit Workspace(std::size_t n) : k1(n), k2(n), k3(n), k4(n), tmp(n), x_next(n) {}
};

// Returns the error estimate; fills ws.x_next and ws.k4. ws.k1 must hold
// rhs(t, x).
double bs23(const RhsFn& rhs, double t, std::span<const double> x, double h,
            const IntegratorConfig& cfg, Workspace& ws,
            const kernels::KernelTable& k, long& evals) {
  const std::size_t n = x.size();
  kernels::StageTerms st;
  st.n = n;
  st.x = x.data();
  st.h = h;

  st.terms = 1;
  st.coeff[0] = 0.5;
  st.ks[0] = ws.k1.data();
  st.out = ws.tmp.data();
  k.stage(st);
  rhs(t + 0.5 * h, ws.tmp, ws.k2);
  ++evals;

  st.coeff[0] = 0.75;
  st.ks[0] = ws.k2.data();
  k.stage(st);
  rhs(t + 0.75 * h, ws.tmp, ws.k3);
  ++evals;

  st.terms = 3;
  st.coeff[0] = kB3[0];
  st.coeff[1] = kB3[1];
  st.coeff[2] = kB3[2];
  st.ks[0] = ws.k1.data();
  st.ks[1] = ws.k2.data();
  st.ks[2] = ws.k3.data();
  st.out = ws.x_next.data();
  k.stage(st);
  rhs(t + h, ws.x_next, ws.k4);
  ++evals;

  kernels::StageTerms et = st;
  et.terms = 4;
  for (int i = 0; i < 4; ++i) et.coeff[i] = kErr[i];
  et.ks[3] = ws.k4.data();
  return k.error_rms(et, ws.x_next.data(), cfg.atol, cfg.rtol);
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) {
    throw DomainError("integrator: rtol and atol must be positive");
  }
  if (!(dt_min > 0.0) || !(dt_min <= dt_init) || !(dt_init <= dt_max)) {
    throw DomainError("integrator: need 0 < dt_min <= dt_init <= dt_max");
  }
  if (!(safety > 0.0 && safety < 1.0)) {
    throw DomainError("integrator: safety must lie in (0, 1)");
  }
  if (max_rejects < 1) throw DomainError("integrator: max_rejects must be >= 1");
  if (!(max_growth > 1.0) || !(min_shrink > 0.0 && min_shrink < 1.0)) {
    throw DomainError("integrator: need max_growth > 1 and 0 < min_shrink < 1");
  }
}

StepResult rk23_step(const RhsFn& rhs, double t, std::span<const double> x,
                     double dt, const IntegratorConfig& cfg,
                     std::span<const double> f0, const kernels::KernelTable& k) {
  if (!(dt > 0.0)) throw DomainError("rk23_step: dt must be positive");
  Workspace ws(x.size());
  long evals = 0;
  if (f0.empty()) {
    rhs(t, x, ws.k1);
  } else {
    std::copy(f0.begin(), f0.end(), ws.k1.begin());
  }
  const double err = bs23(rhs, t, x, dt, cfg, ws, k, evals);
  return {std::move(ws.x_next), err, suggest(dt, err, cfg), std::move(ws.k4)};
}

Rk23Integrator::Rk23Integrator(RhsFn rhs, IntegratorConfig cfg,
                               const kernels::KernelTable& k)
    : rhs_(std::move(rhs)), cfg_(cfg), k_(k) {
  cfg_.validate();
}

std::vector<double> Rk23Integrator::integrate(double t0, std::vector<double> x,
                                              double t1, double sample_dt,
                                              std::span<const double> breakpoints,
                                              StepObserver& observer) {
  if (!(t1 > t0)) throw DomainError("integrate: empty time span");
  if (!(sample_dt > 0.0)) throw DomainError("integrate: sample_dt must be positive");
  stats_ = {};
  const std::size_t n = x.size();
  Workspace ws(n);
  std::vector<double> dense(n);

  const double span = t1 - t0;
  const double eps = 1e-12 * std::max(1.0, std::fabs(t1));
  const long last_sample = static_cast<long>(std::floor(span / sample_dt + 1e-9));
  long next_sample = 0;
  auto sample_time = [&](long i) { return t0 + static_cast<double>(i) * sample_dt; };

  std::vector<double> stops;
  for (double b : breakpoints) {
    if (b > t0 + eps && b < t1 - eps) stops.push_back(b);
  }
  stops.push_back(t1);
  std::sort(stops.begin(), stops.end());
  std::size_t next_stop = 0;

  try {
    observer.sample(t0, x);
    observer.commit();
    next_sample = 1;
    rhs_(t0, x, ws.k1);
    ++stats_.rhs_evals;
  } catch (const FunnelViolation& fv) {
    observer.rollback();
    throw IntegrationAbort(std::string("initial state violates the funnel: ") + fv.what());
  }

  double t = t0;
  double h = std::clamp(cfg_.dt_init, cfg_.dt_min, cfg_.dt_max);
  int rejects = 0;

  auto abort = [&](const std::string& why) {
    std::ostringstream os;
    os << "integration aborted at t=" << t << " (dt=" << h << "): " << why
       << " [accepted=" << stats_.accepted
       << ", error rejections=" << stats_.rejected_error
       << ", funnel rejections=" << stats_.rejected_funnel << "]";
    throw IntegrationAbort(os.str());
  };

  while (t < t1 - eps) {
    while (stops[next_stop] <= t + eps) ++next_stop;
    const double t_stop = stops[next_stop];
    bool hits_stop = false;
    double step = h;
    if (t + step >= t_stop - eps) {
      step = t_stop - t;
      hits_stop = true;
    }

    const long saved_sample = next_sample;
    double err = 0.0;
    bool funnel_hit = false;
    std::string funnel_msg;
    try {
      err = bs23(rhs_, t, x, step, cfg_, ws, k_, stats_.rhs_evals);
      if (err <= 1.0) {
        const double t_new = hits_stop ? t_stop : t + step;
        while (next_sample <= last_sample && sample_time(next_sample) <= t_new + eps) {
          const double ts = std::min(sample_time(next_sample), t_new);
          const double theta = (ts - t) / step;
          k_.hermite(n, theta, step, x.data(), ws.x_next.data(), ws.k1.data(),
                     ws.k4.data(), dense.data());
          observer.sample(ts, dense);
          ++next_sample;
        }
      }
    } catch (const FunnelViolation& fv) {
      funnel_hit = true;
      funnel_msg = fv.what();
    }

    if (funnel_hit || err > 1.0) {
      observer.rollback();
      next_sample = saved_sample;
      if (funnel_hit) {
        ++stats_.rejected_funnel;
      } else {
        ++stats_.rejected_error;
      }
      if (++rejects > cfg_.max_rejects) {
        abort(funnel_hit ? "too many consecutive rejections; last: " + funnel_msg
                         : "too many consecutive error-test failures");
      }
      if (step <= cfg_.dt_min * (1.0 + 1e-12)) {
        abort(funnel_hit ? "step size at dt_min; " + funnel_msg
                         : "error test fails at dt_min");
      }
      h = funnel_hit ? std::max(0.5 * step, cfg_.dt_min)
                     : std::max(suggest(step, err, cfg_), cfg_.dt_min);
      h = std::min(h, step);
      continue;
    }

    observer.commit();
    rejects = 0;
    ++stats_.accepted;
    stats_.min_dt_accepted =
        stats_.accepted == 1 ? step : std::min(stats_.min_dt_accepted, step);
    stats_.max_dt_accepted = std::max(stats_.max_dt_accepted, step);
    t = hits_stop ? t_stop : t + step;
    x.swap(ws.x_next);
    ws.k1.swap(ws.k4);
    // A step shortened to hit a stop says nothing about the next one.
    h = hits_stop ? std::max(h, suggest(step, err, cfg_)) : suggest(step, err, cfg_);
  }
  return x;
}

}  // namespace fhn
