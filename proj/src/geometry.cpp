#include "elastic_flow/geometry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>

#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

#include "elastic_flow/spline.hpp"

namespace elastic_flow {

namespace {

std::atomic<double> g_curvature_scale{1.0};

struct Sample {
  double s;
  std::size_t index;
  bool reflected;  // value is 2 f(anchor) - f(index)
  std::size_t anchor;
};

/// Resolves node i + offset into a real node, an odd ghost or a periodic image.
Sample resolve(const GeometryCache& g, std::ptrdiff_t i, std::ptrdiff_t offset) {
  const auto m = static_cast<std::ptrdiff_t>(g.size());
  const std::ptrdiff_t j = i + offset;
  if (g.topology == Topology::closed) {
    const std::ptrdiff_t wraps = (j >= 0) ? j / m : -((-j + m - 1) / m);
    const std::ptrdiff_t k = j - wraps * m;
    const auto ku = static_cast<std::size_t>(k);
    return {g.arclength[ku] + static_cast<double>(wraps) * g.total_length, ku, false, 0};
  }
  const std::ptrdiff_t last = m - 1;
  if (j < 0) {
    const auto mirror = static_cast<std::size_t>(-j);
    return {-g.arclength[mirror], mirror, true, 0};
  }
  if (j > last) {
    const auto mirror = static_cast<std::size_t>(2 * last - j);
    const auto lu = static_cast<std::size_t>(last);
    return {2.0 * g.arclength[lu] - g.arclength[mirror], mirror, true, lu};
  }
  const auto ju = static_cast<std::size_t>(j);
  return {g.arclength[ju], ju, false, 0};
}

int half_width(int order) { return order <= 2 ? 1 : 2; }

template <typename T>
T apply_stencil(const GeometryCache& g, std::span<const T> f, std::size_t i, int order) {
  // weights of a derivative sum to zero; differencing against f[i] keeps
  // constants exact and the result independent of the coordinate origin
  T acc{};
  for (const StencilTerm& t : stencil_terms(g, i, order)) acc = acc + t.weight * (f[t.index] - f[i]);
  return acc;
}

}  // namespace

std::vector<double> fd_weights(double center, std::span<const double> points, int order) {
  const std::size_t n = points.size();
  const auto m = static_cast<std::size_t>(order);
  if (n == 0 || m >= n) throw BadParams("stencil too small for derivative order");
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = points[0] - center;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = points[i] - center;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = points[i] - points[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) {
          c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = c[i][m];
  return out;
}

GeometryCache compute_geometry(const DiscreteCurve& curve) {
  GeometryCache g;
  g.topology = curve.topology();
  const auto nodes = curve.nodes();
  const std::size_t m = nodes.size();
  const std::size_t segs = curve.segments();

  std::vector<double> seg(segs);
  for (std::size_t i = 0; i < segs; ++i) seg[i] = curve.segment_length(i);
  g.total_length = 0.0;
  for (double h : seg) g.total_length += h;
  g.min_segment = *std::min_element(seg.begin(), seg.end());
  if (g.min_segment < 1e-14 * g.total_length) {
    throw DegenerateCurve(
        fmt::format("segment of length {:.3e} on a curve of length {:.3e}", g.min_segment,
                    g.total_length));
  }

  g.arclength.assign(m, 0.0);
  for (std::size_t i = 1; i < m; ++i) g.arclength[i] = g.arclength[i - 1] + seg[i - 1];
  g.ds.assign(m, 0.0);
  for (std::size_t i = 0; i < segs; ++i) {
    g.ds[i] += 0.5 * seg[i];
    g.ds[(i + 1) % m] += 0.5 * seg[i];
  }

  g.tangent.resize(m);
  g.normal.resize(m);
  g.kappa.assign(m, 0.0);
  const double scale = testing::curvature_stencil_scale();
  for (std::size_t i = 0; i < m; ++i) {
    const Point2 d1 = apply_stencil<Point2>(g, nodes, i, 1);
    const Point2 d2 = apply_stencil<Point2>(g, nodes, i, 2);
    const double speed = norm(d1);
    g.tangent[i] = (1.0 / speed) * d1;
    g.normal[i] = rotate_ccw(g.tangent[i]);
    g.kappa[i] = scale * dot(d2, g.normal[i]);
  }
  if (g.topology == Topology::open) {
    // odd reflection makes the discrete second derivative vanish identically
    g.kappa.front() = 0.0;
    g.kappa.back() = 0.0;
  }
  for (int j = 1; j <= 4; ++j) {
    g.kappa_s[static_cast<std::size_t>(j - 1)] = arclength_derivative(g, g.kappa, j);
  }
  return g;
}

std::vector<StencilTerm> stencil_terms(const GeometryCache& g, std::size_t i, int order) {
  const int w = half_width(order);
  std::array<double, 5> xs{};
  std::array<Sample, 5> samples{};
  const auto count = static_cast<std::size_t>(2 * w + 1);
  for (int k = -w; k <= w; ++k) {
    const auto idx = static_cast<std::size_t>(k + w);
    samples[idx] = resolve(g, static_cast<std::ptrdiff_t>(i), k);
    xs[idx] = samples[idx].s;
  }
  const std::vector<double> wts =
      fd_weights(g.arclength[i], std::span<const double>(xs.data(), count), order);
  std::vector<StencilTerm> terms;
  terms.reserve(2 * count);
  for (std::size_t k = 0; k < count; ++k) {
    if (samples[k].reflected) {
      terms.push_back({samples[k].anchor, 2.0 * wts[k]});
      terms.push_back({samples[k].index, -wts[k]});
    } else {
      terms.push_back({samples[k].index, wts[k]});
    }
  }
  return terms;
}

std::vector<double> arclength_derivative(const GeometryCache& cache, std::span<const double> field,
                                         int order) {
  if (order < 1 || order > 4) throw BadParams("arclength derivative order must be in 1..4");
  if (field.size() != cache.size()) throw BadParams("field length does not match node count");
  std::vector<double> out(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) out[i] = apply_stencil<double>(cache, field, i, order);
  return out;
}

double integrate(const GeometryCache& cache, std::span<const double> field) {
  double sum = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) sum += cache.ds[i] * field[i];
  return sum;
}

namespace {

/// First parameter after `from` where the chord from curve_fn(from) reaches
/// `chord`; nullopt if it is not reached before u_end.
std::optional<double> next_chord_point(const std::function<Point2(double)>& f,
                                       const std::function<Point2(double)>& df, double from,
                                       Point2 anchor, double chord, double guess_step,
                                       double u_end) {
  auto phi = [&](double u) {
    const Point2 d = f(u) - anchor;
    return dot(d, d) - chord * chord;
  };
  double lo = from;
  double hi = std::min(u_end, from + 1.5 * guess_step);
  while (phi(hi) < 0.0) {
    if (hi >= u_end) return std::nullopt;
    hi = std::min(u_end, from + 2.0 * (hi - from));
  }
  double u = std::clamp(from + guess_step, lo, hi);
  const double tol = 1e-15 * std::max(1.0, std::abs(u_end));
  for (int it = 0; it < 200; ++it) {
    const Point2 d = f(u) - anchor;
    const double val = dot(d, d) - chord * chord;
    if (val < 0.0) {
      lo = u;
    } else {
      hi = u;
    }
    const double slope = 2.0 * dot(d, df(u));
    double next = (slope > 0.0) ? u - val / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) <= tol || hi - lo <= tol) return next;
    u = next;
  }
  return u;
}

struct March {
  std::vector<Point2> points;
  double residual;  // last chord minus target chord; negative when the end is overshot
};

March march(const std::function<Point2(double)>& f, const std::function<Point2(double)>& df,
            double u0, double u1, std::size_t n, double chord, double param_per_chord) {
  March out;
  out.points.reserve(n + 1);
  out.points.push_back(f(u0));
  double u = u0;
  double step = chord * param_per_chord;
  for (std::size_t i = 1; i < n; ++i) {
    const std::optional<double> next =
        next_chord_point(f, df, u, out.points.back(), chord, step, u1);
    if (!next) {
      const double reached = norm(f(u1) - out.points.back());
      out.residual = -(static_cast<double>(n - i) * chord + (chord - reached));
      return out;
    }
    step = *next - u;
    u = *next;
    out.points.push_back(f(u));
  }
  const Point2 last = f(u1);
  out.residual = norm(last - out.points.back()) - chord;
  out.points.push_back(last);
  return out;
}

}  // namespace

std::vector<Point2> equal_chord_sample(const std::function<Point2(double)>& curve_fn,
                                       const std::function<Point2(double)>& curve_derivative,
                                       double u0, double u1, std::size_t n) {
  if (n < 1 || !(u1 > u0)) throw BadParams("equal_chord_sample needs n >= 1 and u1 > u0");
  // polyline length on a fine grid seeds the chord guess
  const std::size_t fine = 8 * n;
  double approx_length = 0.0;
  Point2 prev = curve_fn(u0);
  for (std::size_t k = 1; k <= fine; ++k) {
    const Point2 p = curve_fn(u0 + (u1 - u0) * static_cast<double>(k) / static_cast<double>(fine));
    approx_length += norm(p - prev);
    prev = p;
  }
  const double c0 = approx_length / static_cast<double>(n);
  const double param_per_chord = (u1 - u0) / approx_length;
  auto residual = [&](double c) { return march(curve_fn, curve_derivative, u0, u1, n, c, param_per_chord).residual; };

  // the fine polyline is accurate to O(n^-2), so start from a narrow bracket
  double width = 1e-4;
  double lo = (1.0 - width) * c0, hi = (1.0 + width) * c0;
  double r_lo = residual(lo), r_hi = residual(hi);
  for (int k = 0; k < 60 && r_lo <= 0.0; ++k) {
    width = std::min(0.5, 4.0 * width);
    hi = lo;
    r_hi = r_lo;
    lo = (1.0 - width) * lo;
    r_lo = residual(lo);
  }
  for (int k = 0; k < 60 && r_hi >= 0.0; ++k) {
    width *= 4.0;
    lo = hi;
    r_lo = r_hi;
    hi = (1.0 + width) * hi;
    r_hi = residual(hi);
  }
  if (r_lo <= 0.0 || r_hi >= 0.0) throw DegenerateCurve("cannot bracket the equal chord length");

  std::uintmax_t max_iter = 200;
  const auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::abs(a); };
  const auto [a, b] = boost::math::tools::toms748_solve(residual, lo, hi, r_lo, r_hi, tol, max_iter);
  const March ma = march(curve_fn, curve_derivative, u0, u1, n, a, param_per_chord);
  const March mb = march(curve_fn, curve_derivative, u0, u1, n, b, param_per_chord);
  const March& best = std::abs(ma.residual) <= std::abs(mb.residual) ? ma : mb;
  if (best.points.size() != n + 1) throw DegenerateCurve("equal chord march did not complete");
  return best.points;
}

DiscreteCurve reparametrize_constant_speed(const DiscreteCurve& curve) {
  if (!curve.is_open()) throw BadParams("reparametrization is defined for open curves only");
  const auto nodes = curve.nodes();
  const std::size_t n = curve.segments();
  std::vector<double> knots(nodes.size(), 0.0);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    knots[i] = knots[i - 1] + norm(nodes[i] - nodes[i - 1]);
  }
  if (curve.min_segment_length() < 1e-14 * knots.back()) {
    throw DegenerateCurve("cannot reparametrize a curve with a vanishing segment");
  }
  const PlanarSpline spline(knots, nodes);
  std::vector<Point2> out = equal_chord_sample([&](double u) { return spline(u); },
                                               [&](double u) { return spline.derivative(u); },
                                               knots.front(), knots.back(), n);
  out.front() = nodes.front();
  out.back() = nodes.back();
  return DiscreteCurve::open(std::move(out));
}

namespace testing {
void set_curvature_stencil_scale(double scale) { g_curvature_scale.store(scale); }
double curvature_stencil_scale() { return g_curvature_scale.load(); }
}  // namespace testing

}  // namespace elastic_flow
