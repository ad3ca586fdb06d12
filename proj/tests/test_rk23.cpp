#include <cmath>
#include <vector>

#include "doctest.h"
#include "fhn/errors.hpp"
#include "fhn/rk23.hpp"

using namespace fhn;

namespace {

class Recorder final : public StepObserver {
 public:
  void sample(double t, std::span<const double> x) override {
    pending_t.push_back(t);
    pending_x.emplace_back(x.begin(), x.end());
  }
  void commit() override {
    t.insert(t.end(), pending_t.begin(), pending_t.end());
    x.insert(x.end(), pending_x.begin(), pending_x.end());
    pending_t.clear();
    pending_x.clear();
    ++commits;
  }
  void rollback() override {
    pending_t.clear();
    pending_x.clear();
    ++rollbacks;
  }

  std::vector<double> t;
  std::vector<std::vector<double>> x;
  int commits = 0;
  int rollbacks = 0;

 private:
  std::vector<double> pending_t;
  std::vector<std::vector<double>> pending_x;
};

class RejectOnce final : public StepObserver {
 public:
  void sample(double t, std::span<const double>) override {
    if (!fired && t >= 0.5) {
      fired = true;
      throw FunnelViolation(t, 1.0, 1.0, 0.9);
    }
    times.push_back(t);
  }
  void commit() override {}
  void rollback() override { ++rollbacks; }

  bool fired = false;
  int rollbacks = 0;
  std::vector<double> times;
};

void decay(double, std::span<const double> x, std::span<double> f) {
  for (std::size_t i = 0; i < x.size(); ++i) f[i] = -x[i];
}

}  // namespace

TEST_CASE("zero right-hand side keeps the state") {
  const RhsFn zero = [](double, std::span<const double>, std::span<double> f) {
    for (auto& v : f) v = 0.0;
  };
  Rk23Integrator integ(zero, IntegratorConfig{});
  Recorder rec;
  const std::vector<double> x0{1.5, -2.0, 0.0};
  const auto x = integ.integrate(0.0, x0, 10.0, 1.0, {}, rec);
  CHECK(x == x0);
  CHECK(rec.t.size() == 11);
  for (const auto& s : rec.x) CHECK(s == x0);
}

TEST_CASE("exponential decay meets the tolerance") {
  IntegratorConfig cfg;
  cfg.rtol = 1e-6;
  cfg.atol = 1e-10;
  Rk23Integrator integ(decay, cfg);
  Recorder rec;
  const auto x = integ.integrate(0.0, {1.0}, 1.0, 0.1, {}, rec);
  CHECK(std::abs(x[0] - std::exp(-1.0)) < 1e-5);
  REQUIRE(rec.t.size() == 11);
  for (std::size_t i = 0; i < rec.t.size(); ++i) {
    CHECK(rec.t[i] == doctest::Approx(0.1 * i).epsilon(1e-14));
    CHECK(std::abs(rec.x[i][0] - std::exp(-rec.t[i])) < 1e-5);
  }
  CHECK(integ.stats().accepted > 0);
  CHECK(integ.stats().rhs_evals >= 3 * integ.stats().accepted);
}

TEST_CASE("fixed steps converge with third order") {
  IntegratorConfig cfg;
  double prev = 0.0;
  for (int steps : {10, 20, 40, 80}) {
    const double h = 1.0 / steps;
    std::vector<double> x{1.0};
    double t = 0.0;
    std::vector<double> f;
    for (int s = 0; s < steps; ++s) {
      auto r = rk23_step(decay, t, x, h, cfg, f);
      x = r.x_next;
      f = r.f_next;
      t += h;
    }
    const double err = std::abs(x[0] - std::exp(-1.0));
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(3.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("step error estimate is positive and suggests a step") {
  const auto r = rk23_step(decay, 0.0, std::vector<double>{1.0}, 0.1, IntegratorConfig{});
  CHECK(r.error_estimate > 0.0);
  CHECK(r.dt_suggest > 0.0);
  CHECK(r.f_next.size() == 1);
  CHECK(r.f_next[0] == doctest::Approx(-r.x_next[0]));
}

TEST_CASE("tighter tolerances reduce the error") {
  double prev = 1.0;
  long prev_steps = 0;
  for (double rtol : {1e-3, 1e-5, 1e-7}) {
    IntegratorConfig cfg;
    cfg.rtol = rtol;
    cfg.atol = rtol * 1e-3;
    Rk23Integrator integ(decay, cfg);
    Recorder rec;
    const auto x = integ.integrate(0.0, {1.0}, 2.0, 2.0, {}, rec);
    const double err = std::abs(x[0] - std::exp(-2.0));
    CHECK(err < prev);
    CHECK(integ.stats().accepted > prev_steps);
    prev = err;
    prev_steps = integ.stats().accepted;
  }
}

TEST_CASE("breakpoints are hit exactly") {
  std::vector<double> seen;
  const RhsFn rhs = [&](double t, std::span<const double>, std::span<double> f) {
    seen.push_back(t);
    f[0] = t < 0.37 ? 0.0 : 1.0;
  };
  Rk23Integrator integ(rhs, IntegratorConfig{});
  Recorder rec;
  const std::vector<double> bp{0.37};
  const auto x = integ.integrate(0.0, {0.0}, 1.0, 0.5, bp, rec);
  CHECK(x[0] == doctest::Approx(0.63).epsilon(1e-12));
  bool hit = false;
  for (double t : seen) hit = hit || t == 0.37;
  CHECK(hit);
}

TEST_CASE("integration aborts on a stiff blow-up") {
  IntegratorConfig cfg;
  cfg.max_rejects = 5;
  cfg.dt_min = 1e-6;
  const RhsFn blow = [](double, std::span<const double> x, std::span<double> f) {
    f[0] = x[0] * x[0] * x[0] * 1e6;
  };
  Rk23Integrator integ(blow, cfg);
  Recorder rec;
  CHECK_THROWS_AS(integ.integrate(0.0, {10.0}, 1.0, 0.1, {}, rec), IntegrationAbort);
}

TEST_CASE("funnel violation rejects the step") {
  IntegratorConfig cfg;
  cfg.dt_init = 1.0;
  cfg.dt_max = 1.0;
  Rk23Integrator integ(decay, cfg);
  RejectOnce obs;
  integ.integrate(0.0, {1.0}, 2.0, 0.25, {}, obs);
  CHECK(obs.fired);
  CHECK(obs.rollbacks >= 1);
  CHECK(integ.stats().rejected_funnel == 1);
}

TEST_CASE("integration is deterministic") {
  IntegratorConfig cfg;
  std::vector<double> first;
  for (int run = 0; run < 2; ++run) {
    const RhsFn rhs = [](double t, std::span<const double> x, std::span<double> f) {
      f[0] = x[1];
      f[1] = -x[0] + 0.3 * std::sin(t);
    };
    Rk23Integrator integ(rhs, cfg);
    Recorder rec;
    const auto x = integ.integrate(0.0, {1.0, 0.0}, 20.0, 0.05, {}, rec);
    if (run == 0) first = x;
    else CHECK(x == first);
  }
}

TEST_CASE("integrator config validation") {
  IntegratorConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.rtol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = IntegratorConfig{};
  cfg.dt_min = 2.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}
