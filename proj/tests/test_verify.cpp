#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "fhn/errors.hpp"
#include "fhn/verify.hpp"

using namespace fhn;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Sample make_sample(double t, double margin = 1.0) {
  Sample s;
  s.t = t;
  s.y.assign(4, 0.0);
  s.y_ref.assign(4, 0.0);
  s.i_se.assign(4, 0.0);
  s.funnel_radius = kInf;
  s.margin = margin;
  return s;
}

TrajectoryLog uniform_log(int n, double dt, double t0 = 0.0) {
  TrajectoryLog log;
  for (int i = 0; i < n; ++i) log.samples.push_back(make_sample(t0 + i * dt));
  return log;
}

}  // namespace

TEST_CASE("funnel invariant reports the minimum margin") {
  TrajectoryLog log = uniform_log(50, 0.1, 0.1);
  for (std::size_t i = 0; i < log.size(); ++i) log.samples[i].margin = 0.3 + 0.01 * i;
  const auto r = check_funnel_invariant(log, 0.05);
  CHECK(r.pass);
  CHECK(r.value("eps0") == doctest::Approx(0.3));
  CHECK(r.value("t_at_min") == doctest::Approx(0.1));
  CHECK(r.offending_times.empty());
  CHECK(check_funnel_invariant(log, 0.15).value("eps0") == doctest::Approx(0.31));
}

TEST_CASE("funnel invariant flags a negative witness") {
  TrajectoryLog log = uniform_log(50, 0.1);
  log.samples[17].margin = -0.01;
  const auto r = check_funnel_invariant(log, 0.05);
  CHECK_FALSE(r.pass);
  CHECK(r.value("eps0") == doctest::Approx(-0.01));
  REQUIRE(r.offending_times.size() == 1);
  CHECK(r.offending_times[0] == doctest::Approx(1.7));
  CHECK_THROWS_AS(check_funnel_invariant(log, 0.0), DomainError);
  CHECK_THROWS_AS(check_funnel_invariant(TrajectoryLog{}, 0.1), DomainError);
}

TEST_CASE("funnel invariant is monotone in delta") {
  TrajectoryLog log = uniform_log(200, 0.05);
  for (std::size_t i = 0; i < log.size(); ++i) {
    log.samples[i].margin = 0.5 + 0.4 * std::sin(0.37 * i);
  }
  double prev = -kInf;
  for (double delta : {0.01, 0.5, 1.0, 2.5, 5.0, 9.0}) {
    const double eps = check_funnel_invariant(log, delta).value("eps0");
    CHECK(eps >= prev);
    prev = eps;
  }
}

TEST_CASE("funnel bound is strict") {
  TrajectoryLog log = uniform_log(10, 1.0);
  for (auto& s : log.samples) {
    s.funnel_radius = 2.0;
    s.e_norm = 1.0;
  }
  CHECK(check_funnel_bound(log, 0.0).pass);
  log.samples[3].e_norm = 2.0;
  const auto r = check_funnel_bound(log, 0.0);
  CHECK_FALSE(r.pass);
  CHECK(r.offending_times == std::vector<double>{3.0});
  CHECK(check_funnel_bound(log, 4.0).pass);
}

TEST_CASE("proportional regime is compared bitwise") {
  TrajectoryLog log = uniform_log(10, 0.01);
  for (auto& s : log.samples) {
    s.y = {0.1, -0.2, 0.3, 0.0};
    s.y_ref = {0.05, 0.0, 0.3, 1.0};
    for (int i = 0; i < 4; ++i) s.i_se[i] = -0.75 * (s.y[i] - s.y_ref[i]);
  }
  CHECK(check_proportional_regime(log, 0.05, 0.75).pass);
  log.samples[2].i_se[1] = std::nextafter(log.samples[2].i_se[1], 1.0);
  CHECK_FALSE(check_proportional_regime(log, 0.05, 0.75).pass);
  CHECK(check_proportional_regime(log, 0.015, 0.75).pass);
  log.samples[1].funnel_radius = 10.0;
  CHECK_FALSE(check_proportional_regime(log, 0.015, 0.75).pass);
}

TEST_CASE("energy bound") {
  const ModelParams p;
  const auto budget = energy_budget(p, 0.0, 0.0, 0.75, p.area());
  CHECK(budget.c_infty > 0.0);

  const TrajectoryLog zero = uniform_log(6, 0.01);
  const auto r = check_energy_bound(zero, budget, p, 0.0, 0.0);
  CHECK(r.pass);
  CHECK(r.value("min_slack") == 0.0);

  TrajectoryLog tight = uniform_log(6, 0.01);
  for (auto& s : tight.samples) s.v_l2 = 2.0;
  CHECK(check_energy_bound(tight, budget, p, 4.0, 0.0).pass);
  for (auto& s : tight.samples) s.v_l2 *= 10.0;
  const auto bad = check_energy_bound(tight, budget, p, 4.0, 0.0);
  CHECK_FALSE(bad.pass);
  REQUIRE_FALSE(bad.offending_times.empty());
  CHECK(bad.offending_times[0] == 0.0);

  TrajectoryLog bounded = uniform_log(6, 0.01);
  bounded.samples[4].funnel_radius = 3.0;
  CHECK_THROWS_AS(check_energy_bound(bounded, budget, p, 0.0, 0.0), DomainError);
}

TEST_CASE("log-rate fit") {
  std::vector<double> t, n;
  for (int i = 0; i <= 20; ++i) {
    t.push_back(0.1 * i);
    n.push_back(3.0 * std::exp(-2.0 * t.back()));
  }
  CHECK(fit_log_rate(t, n) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_log_rate({1.0}, {1.0}), DomainError);
  n[5] = 0.0;
  CHECK_THROWS_AS(fit_log_rate(t, n), DomainError);
}

TEST_CASE("holder estimate on analytic signals") {
  std::vector<double> t;
  std::vector<std::vector<double>> flat, root;
  for (int i = 0; i < 1000; ++i) {
    t.push_back(0.01 + 0.99 * i / 999.0);
    flat.push_back({4.2, -1.0});
    root.push_back({std::sqrt(t.back() - 0.01)});
  }
  const auto c = holder_estimate(t, flat, 0.5);
  CHECK(c.quotient == 0.0);
  CHECK(holder_estimate(t, flat, 0.9).quotient == 0.0);
  const auto h = holder_estimate(t, root, 0.5);
  CHECK(h.exponent == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(h.exponent - 0.5) <= 0.05);
  CHECK(h.quotient == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(holder_estimate({t.begin(), t.begin() + 99}, {root.begin(), root.begin() + 99}, 0.5),
                  DomainError);
  CHECK_THROWS_AS(holder_estimate(t, root, 1.0), DomainError);
  auto skewed = t;
  skewed[500] += 1e-4;
  CHECK_THROWS_AS(holder_estimate(skewed, root, 0.5), DomainError);
}

TEST_CASE("holder check over a log") {
  TrajectoryLog log = uniform_log(300, 0.01);
  for (auto& s : log.samples) {
    s.y = {std::sin(s.t), std::cos(s.t), 0.0, 1.0};
    s.v_l2 = 1.0 + s.t;
  }
  const auto y = holder_check(log, HolderField::Output, 0.5, 0.1);
  CHECK(y.pass);
  CHECK(y.name == "holder_y");
  CHECK(y.value("exponent_fit") >= 0.9);
  CHECK(holder_check(log, HolderField::VNorm, 0.5, 0.1).pass);
  CHECK_THROWS_AS(holder_check(log, HolderField::Output, 0.5, 2.5), DomainError);
}

TEST_CASE("cross discretization gap") {
  TrajectoryLog a = uniform_log(20, 0.5);
  for (auto& s : a.samples) s.y = {s.t, 2.0 * s.t, 0.0, -s.t};
  CHECK(cross_discretization_check(a, a).value("sup_gap") == 0.0);
  TrajectoryLog b = a;
  b.samples[7].y[2] = 0.02;
  const auto r = cross_discretization_check(a, b, 1e-2);
  CHECK_FALSE(r.pass);
  CHECK(r.value("sup_gap") == doctest::Approx(0.02));
  CHECK(r.value("t_at_sup") == doctest::Approx(3.5));
  CHECK(cross_discretization_check(a, b, 0.05).pass);
  b.samples.pop_back();
  CHECK_THROWS_AS(cross_discretization_check(a, b), DomainError);
  b = a;
  b.samples[3].t += 0.1;
  CHECK_THROWS_AS(cross_discretization_check(a, b), DomainError);
}

TEST_CASE("boundedness") {
  const TrajectoryLog zero = uniform_log(10, 0.1);
  const auto r = boundedness_check(zero);
  CHECK(r.pass);
  CHECK(r.value("sup_v_l2") == 0.0);
  CHECK(r.value("sup_u_l2") == 0.0);
  CHECK(r.value("sup_du_dt") == 0.0);

  TrajectoryLog grow = uniform_log(40, 1.0);
  for (auto& s : grow.samples) {
    s.v_l2 = std::exp(s.t);
    s.u_l2 = 1.0;
  }
  const auto d = boundedness_check(grow);
  CHECK_FALSE(d.pass);
  CHECK_FALSE(d.offending_times.empty());
  grow.samples.back().v_l2 = kInf;
  CHECK_FALSE(boundedness_check(grow, {kInf, kInf, kInf}).pass);
}

TEST_CASE("quiescence") {
  TrajectoryLog ref = uniform_log(100, 1.0);
  ref.samples[10].y = {1.0, 0.0, 0.0, 0.0};
  ref.samples[50].y = {0.005, 0.0, 0.0, 0.0};
  CHECK(quiescence_check(ref, 40.0, 60.0).pass);
  ref.samples[50].y = {0.02, 0.0, 0.0, 0.0};
  const auto r = quiescence_check(ref, 40.0, 60.0);
  CHECK_FALSE(r.pass);
  CHECK(r.value("ratio") == doctest::Approx(0.02));
  CHECK_FALSE(quiescence_check(uniform_log(5, 1.0), 0.0, 4.0).pass);
}

TEST_CASE("report helpers") {
  VerificationReport r;
  r.measured = {{"a", 1.5}};
  CHECK(r.value("a") == 1.5);
  CHECK_THROWS_AS(r.value("b"), DomainError);
  VerificationReport info;
  info.gating = false;
  CHECK(all_gating_pass({info}));
  r.pass = true;
  CHECK(all_gating_pass({r, info}));
  r.pass = false;
  CHECK_FALSE(all_gating_pass({r, info}));
}

TEST_CASE("checks are pure") {
  TrajectoryLog log = uniform_log(150, 0.02);
  for (auto& s : log.samples) {
    s.margin = 0.2 + s.t;
    s.y = {s.t * s.t, 0, 0, 0};
  }
  const auto a = check_funnel_invariant(log, 0.1);
  const auto b = check_funnel_invariant(log, 0.1);
  CHECK(a.measured == b.measured);
  CHECK(holder_check(log, HolderField::Output, 0.5, 0.1).measured ==
        holder_check(log, HolderField::Output, 0.5, 0.1).measured);
}

TEST_CASE("eigen-decay and mass checks on small discretizations") {
  IntegratorConfig cfg;
  cfg.rtol = 1e-8;
  cfg.atol = 1e-12;
  const auto fem = FemDiscretization::build(ModelParams{}, 16, 16);
  const auto r = linear_decay_check(fem, 1, 0, 5.0, cfg, 0.02);
  CHECK(r.pass);
  CHECK(r.value("expected") == doctest::Approx(-0.015 * M_PI * M_PI));
  const auto k = linear_decay_check(fem, 0, 0, 5.0, cfg, 0.02);
  CHECK(k.pass);
  CHECK(std::abs(k.value("rate")) < 1e-8);

  IntegratorConfig tight;
  tight.rtol = 1e-12;
  tight.atol = 1e-14;
  const auto basis = build_basis(3, 3, ModelParams{});
  CHECK(linear_decay_check(basis, ModelParams{}, 2, 1, 5.0, tight, 1e-10).pass);
  CHECK_THROWS_AS(linear_decay_check(basis, ModelParams{}, 5, 0, 5.0, tight), DomainError);

  const auto m = mass_conservation_check(fem, 5.0, cfg, 1e-6);
  CHECK(m.pass);
}
