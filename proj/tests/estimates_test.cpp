#include <doctest.h>

#include <cmath>
#include <numbers>

#include "elastic_flow/calibration.hpp"
#include "elastic_flow/estimates.hpp"
#include "elastic_flow/flow.hpp"
#include "elastic_flow/gronwall.hpp"
#include "elastic_flow/initial_curves.hpp"
#include "support.hpp"

using namespace elastic_flow;
using test_support::circle;
using test_support::segment;

namespace {

FlowConfig config(double eps, std::size_t n, double dt, double t_end) {
  FlowConfig c = FlowConfig::with_defaults(eps, n);
  c.dt = dt;
  c.t_end = t_end;
  return c;
}

std::vector<double> sampled(const GeometryCache& g, double (*f)(double)) {
  std::vector<double> u;
  for (double s : g.arclength) u.push_back(f(s));
  return u;
}

}  // namespace

TEST_CASE("energy of simple curves") {
  for (double eps : {0.0, 0.4, 1.0}) CHECK(energy(FlowState(segment(64), eps)) == doctest::Approx(1.0).epsilon(1e-14));

  const FlowState c(circle(2.0, 256), 0.25);
  const double h = 4.0 * std::numbers::pi / 256.0;
  CHECK(std::abs(energy(c) - (4.0 * std::numbers::pi + 0.25 * std::numbers::pi)) <= 4.0 * std::numbers::pi * h * h);

  const FlowState s(make_initial_curve(test_support::sine(0.2), 64), 0.0);
  CHECK(std::abs(energy(s) - s.cache().total_length) <= 1e-12);
}

TEST_CASE("energy dominates length") {
  for (double eps : {0.05, 0.5}) {
    const FlowState s(make_initial_curve(test_support::sine(0.1), 64), eps);
    CHECK(energy(s) > s.cache().total_length);
    const DiagnosticsRecord d = diagnose(s);
    CHECK(d.energy == energy(s));
    CHECK(d.length >= 1.0);
    CHECK(d.dissipation >= 0.0);
  }
}

TEST_CASE("dissipation residual of a stationary segment") {
  const Trajectory t = run(segment(64), config(0.3, 64, 1e-3, 0.01));
  for (std::size_t k = 1; k + 1 < t.diagnostics.size(); ++k) CHECK(dissipation_residual(t, k) <= 1e-12);
  CHECK_THROWS_AS(dissipation_residual(t, 0), BadParams);
  CHECK_THROWS_AS(dissipation_residual(t, t.diagnostics.size() - 1), BadParams);
}

TEST_CASE("length decays at the rate int kappa^2 for curve shortening") {
  std::vector<double> res;
  for (auto [n, dt] : {std::pair<std::size_t, double>{64, 2e-4}, {128, 5e-5}}) {
    const Trajectory t = run(make_initial_curve(test_support::sine(0.05), n), config(0.0, n, dt, 0.01), {1000, {}});
    const auto k = static_cast<std::size_t>(std::llround(0.005 / dt));
    res.push_back(dissipation_residual(t, k));
    CHECK(t.diagnostics[k].dissipation == doctest::Approx(t.diagnostics[k].kappa_l2_sq[0]).epsilon(1e-12));
  }
  CHECK(res[0] / res[1] >= 3.0);
}

TEST_CASE("boundary residuals of compatible initial data") {
  for (std::size_t n : {64, 128}) {
    const FlowState s(make_initial_curve(test_support::sine(0.1), n), 0.1);
    const BoundaryResiduals b = boundary_residuals(s);
    CHECK(b.left[0] <= 1e-8);
    CHECK(b.right[0] <= 1e-8);
  }
}

TEST_CASE("one-sided endpoint curvature sees incompatible ends") {
  std::vector<Point2> arc;
  for (int i = 0; i <= 64; ++i) {
    const double a = 0.5 * std::numbers::pi * i / 64.0;
    arc.push_back({2.0 * std::cos(a), 2.0 * std::sin(a)});
  }
  const DiscreteCurve c = DiscreteCurve::open(arc);
  for (std::size_t pts : {4, 6, 8}) {
    CHECK(endpoint_curvature_one_sided(c, false, pts) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(endpoint_curvature_one_sided(c, true, pts) == doctest::Approx(0.5).epsilon(1e-3));
  }
}

TEST_CASE("boundary residuals shrink along an elastic run") {
  std::vector<BoundaryResiduals> res;
  for (auto [n, dt] : {std::pair<std::size_t, double>{64, 4e-4}, {128, 1e-4}}) {
    const Trajectory t = run(make_initial_curve(test_support::sine(0.05), n), config(0.1, n, dt, 0.02), {1000, {}});
    res.push_back(boundary_residuals(t.states.back()));
  }
  for (int side = 0; side < 2; ++side) {
    const auto& a = side ? res[0].right : res[0].left;
    const auto& b = side ? res[1].right : res[1].left;
    CHECK(a[1] / b[1] >= 3.0);
    CHECK(a[2] / b[2] >= 1.5);
  }
}

TEST_CASE("L^p norms") {
  const GeometryCache g = compute_geometry(segment(256, {0.0, 0.0}, {2.0, 0.0}));
  const std::vector<double> one(g.size(), 1.0);
  CHECK(lp_norm(g, one, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(lp_norm(g, one, 4.0) == doctest::Approx(std::pow(2.0, 0.25)));
  const auto s = sampled(g, [](double x) { return std::sin(std::numbers::pi * x); });
  CHECK(lp_norm(g, s, kInfinity) == doctest::Approx(1.0));
  CHECK(lp_norm(g, s, 2.0) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("interpolation exponent and preconditions") {
  CHECK(gn_sigma(0, 1, 2.0) == doctest::Approx(0.0));
  CHECK(gn_sigma(0, 1, 4.0) == doctest::Approx(0.25));
  CHECK(gn_sigma(0, 2, 6.0) == doctest::Approx(1.0 / 6.0));
  CHECK(gn_sigma(1, 3, kInfinity) == doctest::Approx(0.5));
  CHECK_THROWS_AS(gn_sigma(2, 2, kInfinity), BadExponent);

  const GeometryCache g = compute_geometry(segment(64));
  const std::vector<double> u(g.size(), 1.0);
  CHECK_THROWS_AS(gn_check(g, u, 2, 2, kInfinity, 1.0, 1.0), BadExponent);
  CHECK_THROWS_AS(gn_check(g, u, 1, 1, 2.0, 1.0, 1.0), BadParams);
  CHECK_THROWS_AS(gn_check(g, u, 0, 1, 1.5, 1.0, 1.0), BadParams);
  CHECK_THROWS_AS(gn_check(g, u, 0, 1, 4.0, 0.0, 1.0), BadParams);
}

TEST_CASE("interpolation inequality on zero and constant data") {
  const GeometryCache g = compute_geometry(segment(64));
  const std::vector<double> zero(g.size(), 0.0);
  CHECK(gn_check(g, zero, 0, 1, 4.0, 1.0, 1.0) == 0.0);
  CHECK(gn_specialized_u4(g, zero, 1.0) == 0.0);
  CHECK(gn_specialized_u6(g, zero, 1.0) == 0.0);

  const std::vector<double> one(g.size(), 1.0);
  CHECK(gn_check(g, one, 0, 1, 4.0, 1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(gn_check(g, one, 0, 1, 4.0, 1.0, 2.0) == doctest::Approx(1.0));
  CHECK(gn_check(g, one, 0, 1, 4.0, 1.0, 0.5) < 0.0);

  const double c = 0.7;
  const std::vector<double> cst(g.size(), c);
  CHECK(gn_specialized_u4(g, cst, 1.0) == doctest::Approx(std::pow(c, 6)));
  CHECK(gn_specialized_u4(g, cst, 0.5) < 0.0);
}

TEST_CASE("u^6 inequality for sin(2 pi s) with the calibrated constant") {
  const CalibratedConstants k = standard_constants(1);
  const GeometryCache g = compute_geometry(segment(256));
  const auto u = sampled(g, [](double s) { return std::sin(2.0 * std::numbers::pi * s); });
  CHECK(gn_specialized_u6(g, u, k.gn_u6) >= 0.0);
  CHECK(gn_specialized_u4(g, u, k.gn_u4) >= 0.0);
}

TEST_CASE("calibrated constants cover evolved curvature") {
  const CalibratedConstants k = standard_constants(1);
  const Trajectory t = run(make_initial_curve(test_support::sine(0.1), 64), config(0.1, 64, 1e-4, 0.02), {50, {}});
  for (const FlowState& s : t.states) {
    const auto& g = s.cache();
    CHECK(gn_specialized_u4(g, g.kappa, k.gn_u4) >= 0.0);
    CHECK(gn_specialized_u6(g, g.kappa, k.gn_u6) >= 0.0);
    for (std::size_t i = 0; i < gn_triples().size(); ++i) {
      const GnTriple tr = gn_triples()[i];
      CHECK(gn_check(g, g.kappa, tr.n_ord, tr.j_ord, tr.p, k.gn_general[i], k.gn_general[i]) >= 0.0);
    }
  }
}

TEST_CASE("calibration is seeded and positive") {
  const auto a = random_curve_corpus(12, 5);
  const auto b = random_curve_corpus(12, 5);
  const auto c = random_curve_corpus(12, 6);
  REQUIRE(a.size() == 12);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].node_count() == b[i].node_count());
    for (std::size_t j = 0; j < a[i].node_count(); ++j) CHECK(a[i].nodes()[j] == b[i].nodes()[j]);
    differs = differs || a[i].node_count() != c[i].node_count() || a[i].nodes()[1] != c[i].nodes()[1];
  }
  CHECK(differs);

  const CalibratedConstants k = calibrate(random_curve_corpus(kCalibrationCorpusSize, 5));
  CHECK(k.gn_u6 > 0.0);
  CHECK(k.gn_u4 > 0.0);
  CHECK(k.z_coeff > 0.0);
  REQUIRE(k.gn_general.size() == gn_triples().size());
  for (double v : k.gn_general) CHECK(v > 0.0);
  const CalibratedConstants d = k.scaled(2.0);
  CHECK(d.gn_u6 == 2.0 * k.gn_u6);
  CHECK(d.z_coeff == 2.0 * k.z_coeff);
}

TEST_CASE("curvature L2 rate matches the evolution") {
  const std::size_t n = 128;
  const double dt = 1e-5;
  for (double eps : {0.0, 0.1}) {
    const FlowConfig c = config(eps, n, dt, 1.0);
    const FlowState s0(make_initial_curve(test_support::sine(0.1), n), eps);
    const FlowState s1 = step(s0, c);
    const FlowState s2 = step(s1, c);
    const double fd = (diagnose(s2).kappa_l2_sq[0] - diagnose(s0).kappa_l2_sq[0]) / (2.0 * dt);
    CHECK(fd == doctest::Approx(kappa_l2_rate(s1)).epsilon(0.02));
  }
}

TEST_CASE("Gronwall solution for the linear law") {
  const GronwallSolution s = gronwall_solve(GrowthLaw::linear(), 2.0, 5.0);
  CHECK(s.covered_time() == 5.0);
  CHECK_FALSE(s.blowup_time().has_value());
  for (double t = 0.0; t <= 5.0; t += 0.01) CHECK(std::abs(s.value(t) - 2.0 * std::exp(t)) <= 1e-9 * 2.0 * std::exp(t));
  CHECK(s.inverse(2.0 * std::exp(1.5)) == doctest::Approx(1.5).epsilon(1e-10));
  for (double x : {2.5, 7.0, 100.0}) {
    CHECK(doubling_time(GrowthLaw::linear(), 2.0, 5.0, x) == doctest::Approx(std::numbers::ln2).epsilon(1e-8));
  }
  CHECK(doubling_time(GrowthLaw::linear(), 2.0, 5.0, 0.5) == doctest::Approx(std::numbers::ln2).epsilon(1e-8));
}

TEST_CASE("Gronwall solution for the quadratic law blows up at 1") {
  const GronwallSolution s = gronwall_solve(GrowthLaw::quadratic(), 1.0, 3.0);
  REQUIRE(s.blowup_time().has_value());
  CHECK(std::abs(*s.blowup_time() - 1.0) <= 1e-6);
  for (double t = 0.0; t < 0.999; t += 0.001) CHECK(std::abs(s.value(t) * (1.0 - t) - 1.0) <= 1e-8);
  for (double x : {1.0, 2.0, 10.0, 1e3}) {
    CHECK(doubling_time(GrowthLaw::quadratic(), 1.0, 3.0, x) == doctest::Approx(1.0 / (2.0 * x)).epsilon(1e-8));
  }
}

TEST_CASE("Gronwall solution satisfies its ODE and is increasing") {
  for (const GrowthLaw& law : {GrowthLaw::linear(), GrowthLaw::quadratic(), GrowthLaw::curvature_majorant(0.3)}) {
    const GronwallSolution s = gronwall_solve(law, 0.4, 4.0);
    const auto ts = s.times();
    const auto gs = s.values();
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double z = law.z(gs[i]);
      CHECK(std::abs(s.derivative(ts[i]) - z) <= 1e-9 * (1.0 + std::abs(z)));
      if (i > 0) CHECK(gs[i] > gs[i - 1]);
    }
  }
}

TEST_CASE("doubling time satisfies the lemma's conclusion") {
  const GrowthLaw law = GrowthLaw::curvature_majorant(1.0);
  const GronwallSolution s = gronwall_solve(law, 0.2, 10.0);
  for (double x : {0.2, 0.5, 1.0, 2.0}) {
    const double theta = doubling_time(law, 0.2, 10.0, x);
    CHECK(theta > 0.0);
    const double t0 = s.inverse(x);
    for (int k = 0; k < 100; ++k) CHECK(s.value(t0 + theta * k / 100.0) <= 2.0 * x);
  }
  CHECK_THROWS_AS(doubling_time(GrowthLaw::linear(), 1.0, 1.0, 5.0), OutOfDomain);
  CHECK_THROWS_AS(doubling_time(GrowthLaw::linear(), 1.0, 1.0, -1.0), BadParams);
}

TEST_CASE("Gronwall setup validation") {
  GronwallSetup s;
  CHECK_NOTHROW(s.validate());
  s.g0 = 0.0;
  CHECK_THROWS_AS(s.validate(), BadParams);
  s = {};
  s.coeff_c = -1.0;
  CHECK_THROWS_AS(s.validate(), BadParams);
  s = {};
  s.g0 = 0.5;
  CHECK(gronwall_solve(s).initial_value() == 0.5);
  CHECK(doubling_time(s, 0.6) > 0.0);
}

TEST_CASE("comparison check on stationary and moving curves") {
  const Trajectory seg = run(segment(32), config(0.1, 32, 1e-2, 0.5));
  GronwallSetup setup;
  setup.g0 = 1e-3;
  setup.coeff_c = 1.0;
  ComparisonResult r = comparison_check(seg, setup);
  CHECK(r.holds);
  CHECK(r.margin > 0.0);

  // with C = 0 the bound stays at g0 while a shrinking loop raises int kappa^2
  const Trajectory cs = run(make_initial_curve(test_support::loop(0.15), 64), config(0.0, 64, 1e-5, 0.005), {1000, {}});
  CHECK(cs.diagnostics.back().kappa_l2_sq[0] > cs.diagnostics.front().kappa_l2_sq[0]);
  setup.g0 = cs.diagnostics.front().kappa_l2_sq[0];
  setup.coeff_c = 0.0;
  r = comparison_check(cs, setup);
  CHECK_FALSE(r.holds);
  CHECK(r.margin < 0.0);

  setup.coeff_c = standard_constants(1).z_coeff;
  r = comparison_check(cs, setup);
  CHECK(r.holds);
  CHECK(r.margin > 0.0);
}
