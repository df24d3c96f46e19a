#include "elastic_flow/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "elastic_flow/estimates.hpp"
#include "elastic_flow/flow.hpp"
#include "elastic_flow/geometry.hpp"

namespace elastic_flow {

namespace {

constexpr std::array<GnTriple, 6> kTriples{{
    {0, 1, 4.0},
    {0, 2, 6.0},
    {0, 1, kInfinity},
    {1, 2, 4.0},
    {1, 3, kInfinity},
    {2, 4, 2.0},
}};

constexpr std::array<double, 8> kEpsilons{0.0, 0.0125, 0.025, 0.05, 0.1, 0.2, 0.5, 1.0};

/// Uniform double in [lo, hi) from the top 53 bits, identical on every platform.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

struct Placement {
  double angle;
  Point2 shift;
};

Placement random_placement(std::mt19937_64& rng) {
  const double angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return {angle, {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)}};
}

/// Distinct mode numbers in 1..max_mode with coefficients in [-1, 1].
void random_modes(std::mt19937_64& rng, int max_mode, std::vector<int>& m, std::vector<double>& a) {
  const std::size_t count = 1 + rng() % 4;
  while (m.size() < count) {
    const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_mode));
    if (std::find(m.begin(), m.end(), k) != m.end()) continue;
    m.push_back(k);
    a.push_back(uniform(rng, -1.0, 1.0));
  }
}

/// Graph y = sum a_m sin(m pi x) over a chord, steepest slope in [0.05, 2.5].
DiscreteCurve random_graph(std::mt19937_64& rng, std::size_t n) {
  std::vector<int> m;
  std::vector<double> a;
  random_modes(rng, 6, m, a);
  double slope_bound = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) slope_bound += std::abs(a[i]) * m[i] * std::numbers::pi;
  const double slope = uniform(rng, 0.05, 2.5);
  for (double& ai : a) ai *= slope / slope_bound;

  const double chord = uniform(rng, 0.5, 2.0);
  const Placement place = random_placement(rng);
  const Point2 ex{std::cos(place.angle), std::sin(place.angle)};
  const Point2 ey = rotate_ccw(ex);
  auto f = [&](double u) {
    double y = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) y += a[i] * std::sin(m[i] * std::numbers::pi * u);
    return place.shift + (chord * u) * ex + (chord * y) * ey;
  };
  auto df = [&](double u) {
    double dy = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      dy += a[i] * m[i] * std::numbers::pi * std::cos(m[i] * std::numbers::pi * u);
    }
    return chord * ex + (chord * dy) * ey;
  };
  return DiscreteCurve::open(equal_chord_sample(f, df, 0.0, 1.0, n));
}

/// Curve of length L with curvature kappa(sigma) = sum b_m sin(m pi sigma),
/// sigma = s / L, total bending max|kappa| L in [0.1, 12]. Self-intersections
/// are allowed. Nodes sit at equal arclength.
DiscreteCurve random_bent(std::mt19937_64& rng, std::size_t n) {
  std::vector<int> m;
  std::vector<double> b;
  random_modes(rng, 4, m, b);
  const double len = uniform(rng, 0.5, 2.0);
  double kappa_bound = 0.0;
  for (double bi : b) kappa_bound += std::abs(bi);
  const double bending = uniform(rng, 0.1, 12.0);
  for (double& bi : b) bi *= bending / (kappa_bound * len);
  const Placement place = random_placement(rng);

  auto theta = [&](double sigma) {
    double t = place.angle;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double w = m[i] * std::numbers::pi;
      t += len * b[i] * (1.0 - std::cos(w * sigma)) / w;
    }
    return t;
  };
  // 5-point Gauss-Legendre per cell
  constexpr std::array<double, 5> x{0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                    0.9061798459386640};
  constexpr std::array<double, 5> w{0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                    0.2369268850561891, 0.2369268850561891};
  std::vector<Point2> nodes(n + 1);
  nodes[0] = place.shift;
  const double h = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mid = (static_cast<double>(i) + 0.5) * h;
    Point2 d;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double th = theta(mid + 0.5 * h * x[k]);
      d += (0.5 * h * w[k] * len) * Point2{std::cos(th), std::sin(th)};
    }
    nodes[i + 1] = nodes[i] + d;
  }
  return DiscreteCurve::open(std::move(nodes));
}

DiscreteCurve random_curve(std::mt19937_64& rng) {
  constexpr std::array<std::size_t, 3> kSizes{64, 96, 128};
  const std::size_t n = kSizes[rng() % kSizes.size()];
  return (rng() % 2 == 0) ? random_graph(rng, n) : random_bent(rng, n);
}

double positive_ratio(double num, double den) {
  if (!(den > 0.0)) return 0.0;
  return std::max(0.0, num / den);
}

}  // namespace

std::span<const GnTriple> gn_triples() { return kTriples; }
std::span<const double> calibration_epsilons() { return kEpsilons; }

std::vector<DiscreteCurve> random_curve_corpus(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<DiscreteCurve> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_curve(rng));
  return out;
}

CalibratedConstants CalibratedConstants::scaled(double factor) const {
  CalibratedConstants out = *this;
  out.gn_u6 *= factor;
  out.gn_u4 *= factor;
  for (double& c : out.gn_general) c *= factor;
  out.z_coeff *= factor;
  return out;
}

CalibratedConstants calibrate(std::span<const DiscreteCurve> corpus) {
  CalibratedConstants c;
  c.gn_general.assign(kTriples.size(), 0.0);
  for (const DiscreteCurve& curve : corpus) {
    const GeometryCache g = compute_geometry(curve);
    const std::vector<double>& u = g.kappa;
    const double len = g.total_length;

    // each slack is linear in its constant: slack(C) = slack(0) + C * slack'(0)
    const double base6 = gn_specialized_u6(g, u, 0.0);
    const double unit6 = gn_specialized_u6(g, u, 1.0) - base6;
    c.gn_u6 = std::max(c.gn_u6, positive_ratio(-base6, unit6));
    const double base4 = gn_specialized_u4(g, u, 0.0);
    const double unit4 = gn_specialized_u4(g, u, 1.0) - base4;
    c.gn_u4 = std::max(c.gn_u4, positive_ratio(-base4, unit4));

    for (std::size_t k = 0; k < kTriples.size(); ++k) {
      const GnTriple t = kTriples[k];
      const double sigma = gn_sigma(t.n_ord, t.j_ord, t.p);
      const std::vector<double> du =
          t.n_ord == 0 ? u : arclength_derivative(g, u, t.n_ord);
      const std::vector<double> dj = arclength_derivative(g, u, t.j_ord);
      const double u2 = lp_norm(g, u, 2.0);
      const double unit = std::pow(lp_norm(g, dj, 2.0), sigma) * std::pow(u2, 1.0 - sigma) +
                          u2 / std::pow(len, t.j_ord * sigma);
      c.gn_general[k] = std::max(c.gn_general[k], positive_ratio(lp_norm(g, du, t.p), unit));
    }

    for (double eps : kEpsilons) {
      const FlowState state(curve, eps);
      const double p = integrate(g, [&] {
        std::vector<double> k2(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) k2[i] = u[i] * u[i];
        return k2;
      }());
      const double z_unit = std::pow(p, 5) + p * p * p + p * p;
      c.z_coeff = std::max(c.z_coeff, positive_ratio(kappa_l2_rate(state), z_unit));
    }
  }
  return c;
}

CalibratedConstants standard_constants(std::uint64_t seed) {
  const std::vector<DiscreteCurve> corpus = random_curve_corpus(kCalibrationCorpusSize, seed);
  return calibrate(corpus).scaled(kCalibrationSafetyFactor);
}

}  // namespace elastic_flow
