#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "elastic_flow/banded.hpp"
#include "elastic_flow/estimates.hpp"
#include "elastic_flow/geometry.hpp"
#include "elastic_flow/initial_curves.hpp"
#include "elastic_flow/spline.hpp"
#include "support.hpp"

using namespace elastic_flow;
using test_support::circle;
using test_support::max_abs;
using test_support::segment;

TEST_CASE("curve construction enforces the minimum size and pinned ends") {
  CHECK_THROWS_AS(segment(8), BadParams);
  const DiscreteCurve c = segment(16, {1.0, 2.0}, {3.0, -1.0});
  CHECK(c.segments() == 16);
  CHECK(c.endpoint_p() == Point2{1.0, 2.0});
  CHECK(c.endpoint_q() == Point2{3.0, -1.0});
  CHECK(circle(1.0, 32).segments() == 32);
}

TEST_CASE("straight segment has zero curvature and unit length") {
  const GeometryCache g = compute_geometry(segment(64));
  CHECK(g.total_length == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(max_abs(g.kappa) == 0.0);
  for (std::size_t j = 0; j < 4; ++j) CHECK(max_abs(g.kappa_s[j]) == 0.0);
}

TEST_CASE("tangent and normal are orthonormal and counterclockwise") {
  const GeometryCache g = compute_geometry(make_initial_curve(test_support::sine(0.1), 64));
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(norm(g.tangent[i]) - 1.0) <= 1e-12);
    CHECK(std::abs(norm(g.normal[i]) - 1.0) <= 1e-12);
    CHECK(norm(g.normal[i] - rotate_ccw(g.tangent[i])) <= 1e-12);
  }
}

TEST_CASE("total length is the sum of segment lengths") {
  const DiscreteCurve c = make_initial_curve(test_support::sine(0.2), 80);
  double sum = 0.0;
  for (std::size_t i = 0; i < c.segments(); ++i) sum += c.segment_length(i);
  CHECK(compute_geometry(c).total_length == doctest::Approx(sum).epsilon(1e-14));
}

TEST_CASE("degenerate segment is rejected") {
  std::vector<Point2> nodes;
  for (int i = 0; i <= 16; ++i) nodes.push_back({i / 16.0, 0.0});
  nodes[5] = nodes[4];
  CHECK_THROWS_AS(compute_geometry(DiscreteCurve::open(nodes)), DegenerateCurve);
}

TEST_CASE("circle of radius 2 has curvature 1/2") {
  const GeometryCache g = compute_geometry(circle(2.0, 256));
  const double h = g.total_length / 256.0;
  for (double k : g.kappa) CHECK(std::abs(k - 0.5) <= h * h);
}

TEST_CASE("curvature of a circle is within h^2 at every resolution") {
  // three nodes on a circle fix it, so the stencil is exact up to roundoff
  for (std::size_t n : {32, 64, 128, 256, 512}) {
    std::vector<Point2> nodes;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(n);
      const double a = 2.0 * std::numbers::pi * (u + 0.05 * std::sin(2.0 * std::numbers::pi * u));
      nodes.push_back({1.5 * std::cos(a), 1.5 * std::sin(a)});
    }
    const GeometryCache g = compute_geometry(DiscreteCurve::closed(nodes));
    const double h = g.total_length / static_cast<double>(n);
    for (double k : g.kappa) CHECK(std::abs(k - 1.0 / 1.5) <= h * h);
  }
}

TEST_CASE("curvature of an ellipse converges at second order") {
  const double a = 2.0, b = 1.0;
  std::vector<double> err;
  for (std::size_t n : {64, 128, 256, 512}) {
    std::vector<Point2> nodes;
    std::vector<double> exact;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      nodes.push_back({a * std::cos(t), b * std::sin(t)});
      exact.push_back(a * b / std::pow(a * a * std::sin(t) * std::sin(t) + b * b * std::cos(t) * std::cos(t), 1.5));
    }
    const GeometryCache g = compute_geometry(DiscreteCurve::closed(nodes));
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(g.kappa[i] - exact[i]));
    err.push_back(e);
  }
  for (std::size_t i = 0; i + 1 < err.size(); ++i) {
    const double slope = std::log2(err[i] / err[i + 1]);
    CHECK(slope >= 1.8);
    CHECK(slope <= 2.2);
  }
}

TEST_CASE("parabola apex curvature is 2") {
  std::vector<double> err;
  for (std::size_t n : {64, 128}) {
    const auto nodes = equal_chord_sample([](double x) { return Point2{x, x * x}; },
                                          [](double x) { return Point2{1.0, 2.0 * x}; }, -1.0, 1.0, n);
    const GeometryCache g = compute_geometry(DiscreteCurve::open(nodes));
    CHECK(std::abs(nodes[n / 2].x) <= 1e-12);
    err.push_back(std::abs(g.kappa[n / 2] - 2.0));
  }
  CHECK(err[0] <= 1e-2);
  CHECK(err[0] / err[1] >= 3.0);
}

TEST_CASE("curvature is invariant under rigid motions") {
  const DiscreteCurve c = make_initial_curve(test_support::sine(0.15), 96);
  // on a 2^-40 grid a quarter turn plus a dyadic shift moves every node exactly
  std::vector<Point2> snapped, turned;
  for (Point2 p : c.nodes()) {
    const Point2 s{std::ldexp(std::round(std::ldexp(p.x, 40)), -40), std::ldexp(std::round(std::ldexp(p.y, 40)), -40)};
    snapped.push_back(s);
    turned.push_back(rotate_ccw(s) + Point2{3.0, -2.0});
  }
  const GeometryCache g0 = compute_geometry(DiscreteCurve::open(snapped));
  const GeometryCache g1 = compute_geometry(DiscreteCurve::open(turned));
  for (std::size_t i = 0; i < g0.size(); ++i) CHECK(std::abs(g0.kappa[i] - g1.kappa[i]) <= 1e-12);

  // a general motion rounds the input nodes by ~u |x|, which the stencil turns into ~u |x| / h^2
  const double a = 0.7;
  std::vector<Point2> moved;
  for (Point2 p : c.nodes()) {
    moved.push_back({std::cos(a) * p.x - std::sin(a) * p.y + 3.0, std::sin(a) * p.x + std::cos(a) * p.y - 2.0});
  }
  const GeometryCache g2 = compute_geometry(c);
  const GeometryCache g3 = compute_geometry(DiscreteCurve::open(moved));
  const double h = g2.total_length / 96.0;
  const double floor = 16.0 * std::numeric_limits<double>::epsilon() * 4.0 / (h * h);
  for (std::size_t i = 0; i < g2.size(); ++i) CHECK(std::abs(g2.kappa[i] - g3.kappa[i]) <= floor);
}

TEST_CASE("discrete Serret-Frenet residual shrinks under refinement") {
  std::vector<double> res;
  for (std::size_t n : {64, 128}) {
    const GeometryCache g = compute_geometry(make_initial_curve(test_support::sine(0.1), n));
    std::vector<double> nx(g.size()), ny(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      nx[i] = g.normal[i].x;
      ny[i] = g.normal[i].y;
    }
    const auto dx = arclength_derivative(g, nx, 1);
    const auto dy = arclength_derivative(g, ny, 1);
    double r = 0.0;
    for (std::size_t i = 2; i + 2 < g.size(); ++i) {
      r = std::max(r, norm(Point2{dx[i], dy[i]} + g.kappa[i] * g.tangent[i]));
    }
    res.push_back(r);
  }
  CHECK(res[0] / res[1] >= 3.0);
}

TEST_CASE("arclength derivative of a constant vanishes") {
  const GeometryCache g = compute_geometry(make_initial_curve(test_support::sine(0.1), 64));
  const std::vector<double> c(g.size(), 3.25);
  for (int order = 1; order <= 4; ++order) CHECK(max_abs(arclength_derivative(g, c, order)) == 0.0);
}

TEST_CASE("derivative of arclength is one") {
  const GeometryCache g = compute_geometry(segment(64, {0.0, 0.0}, {2.0, 1.0}));
  const auto d = arclength_derivative(g, g.arclength, 1);
  for (double v : d) CHECK(std::abs(v - 1.0) <= 1e-10);
}

TEST_CASE("second derivative of sin on a segment of length pi") {
  std::vector<double> err;
  for (std::size_t n : {64, 128}) {
    const GeometryCache g = compute_geometry(segment(n, {0.0, 0.0}, {std::numbers::pi, 0.0}));
    std::vector<double> f;
    for (double s : g.arclength) f.push_back(std::sin(s));
    const auto d2 = arclength_derivative(g, f, 2);
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(d2[i] + f[i]));
    err.push_back(e);
  }
  CHECK(err[0] <= 1e-3);
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("d^j/ds^j of s^j is j! at interior nodes") {
  const double fact[] = {1.0, 1.0, 2.0, 6.0, 24.0};
  const GeometryCache g = compute_geometry(segment(64));
  for (int j = 1; j <= 4; ++j) {
    std::vector<double> f;
    for (double s : g.arclength) f.push_back(std::pow(s, j));
    const auto d = arclength_derivative(g, f, j);
    for (std::size_t i = 2; i + 2 < g.size(); ++i) CHECK(std::abs(d[i] - fact[j]) <= 1e-6 * fact[j]);
  }
}

TEST_CASE("trapezoid quadrature in arclength") {
  const GeometryCache g = compute_geometry(segment(128, {0.0, 0.0}, {std::numbers::pi, 0.0}));
  std::vector<double> f;
  for (double s : g.arclength) f.push_back(std::sin(s));
  CHECK(integrate(g, f) == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("reparametrization keeps a uniform segment fixed") {
  const DiscreteCurve c = segment(64, {0.0, 0.0}, {1.0, 0.5});
  const DiscreteCurve r = reparametrize_constant_speed(c);
  for (std::size_t i = 0; i < c.node_count(); ++i) CHECK(norm(c.nodes()[i] - r.nodes()[i]) <= 1e-14);
}

TEST_CASE("reparametrization spreads clustered nodes on a line") {
  std::vector<Point2> nodes;
  for (int i = 0; i <= 64; ++i) nodes.push_back({std::pow(i / 64.0, 2.0), 0.0});
  const DiscreteCurve r = reparametrize_constant_speed(DiscreteCurve::open(nodes));
  CHECK(r.endpoint_p() == nodes.front());
  CHECK(r.endpoint_q() == nodes.back());
  for (std::size_t i = 0; i < r.node_count(); ++i) {
    CHECK(r.nodes()[i].y == 0.0);
    CHECK(std::abs(r.nodes()[i].x - i / 64.0) <= 1e-10);
  }
  CHECK((r.max_segment_length() - r.min_segment_length()) / r.min_segment_length() <= 1e-10);
}

TEST_CASE("reparametrized quarter circle stays on the circle") {
  std::vector<double> err;
  for (int n : {32, 64}) {
    std::vector<Point2> nodes;
    for (int i = 0; i <= n; ++i) {
      const double a = 0.5 * std::numbers::pi * std::pow(static_cast<double>(i) / n, 1.5);
      nodes.push_back({2.0 * std::cos(a), 2.0 * std::sin(a)});
    }
    const DiscreteCurve r = reparametrize_constant_speed(DiscreteCurve::open(nodes));
    CHECK((r.max_segment_length() - r.min_segment_length()) / r.min_segment_length() <= 1e-10);
    double e = 0.0;
    for (Point2 p : r.nodes()) e = std::max(e, std::abs(norm(p) - 2.0));
    err.push_back(e);
  }
  CHECK(err[0] <= 1e-4);
  CHECK(err[0] / err[1] >= 3.0);
}

TEST_CASE("reparametrization is idempotent") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  std::vector<Point2> nodes;
  for (int i = 0; i <= 64; ++i) {
    const double u = (i == 0 || i == 64) ? i / 64.0 : (i + jitter(rng)) / 64.0;
    nodes.push_back({u, 0.1 * std::sin(std::numbers::pi * u)});
  }
  const DiscreteCurve once = reparametrize_constant_speed(DiscreteCurve::open(nodes));
  const DiscreteCurve twice = reparametrize_constant_speed(once);
  for (std::size_t i = 0; i < once.node_count(); ++i) CHECK(norm(once.nodes()[i] - twice.nodes()[i]) <= 1e-10);
}

TEST_CASE("initial families join P to Q with flat ends") {
  InitialCurveParams seg;
  const DiscreteCurve s = make_initial_curve(seg, 64);
  CHECK(s.endpoint_p() == Point2{0.0, 0.0});
  CHECK(s.endpoint_q() == Point2{1.0, 0.0});
  for (Point2 p : s.nodes()) CHECK(p.y == 0.0);

  const DiscreteCurve sine = make_initial_curve(test_support::sine(0.1), 128);
  CHECK(sine.endpoint_p() == Point2{0.0, 0.0});
  CHECK(sine.endpoint_q() == Point2{1.0, 0.0});
  CHECK(std::abs(compute_geometry(sine).kappa.front()) <= 1e-8);
  CHECK(std::abs(compute_geometry(sine).kappa.back()) <= 1e-8);
  CHECK(endpoint_curvature_one_sided(sine, false, 6) <= 1e-6);
  CHECK(endpoint_curvature_one_sided(sine, true, 6) <= 1e-6);
  CHECK((sine.max_segment_length() - sine.min_segment_length()) / sine.min_segment_length() <= 1e-10);
}

TEST_CASE("bump curvature vanishes away from its support") {
  InitialCurveParams p;
  p.family = CurveFamily::bump_perturbed_segment;
  const DiscreteCurve c = make_initial_curve(p, 128);
  const GeometryCache g = compute_geometry(c);
  const double h = 2.0 * g.total_length / 128.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = c.nodes()[i].x;
    if (x < p.support_lo - h || x > p.support_hi + h) CHECK(std::abs(g.kappa[i]) <= 1e-12);
  }
}

TEST_CASE("arc with flat ends turns by the arc angle") {
  InitialCurveParams p;
  p.family = CurveFamily::arc_with_flat_ends;
  p.arc_angle = std::numbers::pi / 2;
  const DiscreteCurve c = make_initial_curve(p, 128);
  const GeometryCache g = compute_geometry(c);
  CHECK(integrate(g, g.kappa) == doctest::Approx(p.arc_angle).epsilon(1e-3));
  CHECK(g.tangent.front().x == doctest::Approx(1.0));
  CHECK(g.tangent.back().y == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("oversized amplitude is rejected") {
  CHECK_THROWS_AS(make_initial_curve(test_support::sine(5.0), 64), BadParams);
  InitialCurveParams p = test_support::sine(0.1);
  p.q = p.p;
  CHECK_THROWS_AS(make_initial_curve(p, 64), BadParams);
}

TEST_CASE("curve family names round-trip") {
  for (auto f : {CurveFamily::segment, CurveFamily::flattened_sine, CurveFamily::bump_perturbed_segment,
                 CurveFamily::arc_with_flat_ends}) {
    CHECK(parse_curve_family(to_string(f)) == f);
  }
  CHECK_FALSE(parse_curve_family("spiral").has_value());
}

TEST_CASE("finite-difference weights are exact on polynomials") {
  const std::vector<double> pts{0.0, 0.3, 0.7, 1.2, 2.0};
  for (int order = 0; order <= 4; ++order) {
    const auto w = fd_weights(0.5, pts, order);
    double acc = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) acc += w[i] * std::pow(pts[i], 4);
    const double exact[] = {std::pow(0.5, 4), 4 * std::pow(0.5, 3), 12 * 0.25, 24 * 0.5, 24.0};
    CHECK(acc == doctest::Approx(exact[order]).epsilon(1e-10));
  }
}

TEST_CASE("not-a-knot spline reproduces cubics") {
  std::vector<double> u, v;
  for (int i = 0; i <= 10; ++i) {
    const double x = 0.1 * i + 0.01 * i * i;
    u.push_back(x);
    v.push_back(x * x * x - 2.0 * x + 1.0);
  }
  const CubicSpline s(u, v);
  for (double x : {0.05, 0.33, 0.9, 1.7}) {
    CHECK(s.value(x) == doctest::Approx(x * x * x - 2.0 * x + 1.0).epsilon(1e-12));
    CHECK(s.derivative(x) == doctest::Approx(3.0 * x * x - 2.0).epsilon(1e-12));
  }
}

TEST_CASE("banded LU solves a pentadiagonal system") {
  const std::size_t n = 40;
  BandedMatrix a(n, 2, 2);
  for (std::size_t i = 0; i < n; ++i) {
    a.at(i, i) = 6.0;
    if (i >= 1) a.at(i, i - 1) = -4.0 + 0.01 * i;
    if (i >= 2) a.at(i, i - 2) = 1.0;
    if (i + 1 < n) a.at(i, i + 1) = -4.0;
    if (i + 2 < n) a.at(i, i + 2) = 1.0 + 0.02 * i;
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(0.3 * i);
  const auto b = a.multiply(x);
  const BandedLU lu(a);
  const auto y = lu.solve_refined(a, b);
  for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-9));
  CHECK(backward_error(a, y, b) <= 1e-15);

  BandedMatrix singular(4, 1, 1);
  CHECK_THROWS_AS(BandedLU{singular}, SingularMatrix);
}
