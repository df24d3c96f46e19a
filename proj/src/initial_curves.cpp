#include "elastic_flow/initial_curves.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <fmt/format.h>

#include "elastic_flow/geometry.hpp"

namespace elastic_flow {

namespace {

constexpr double kPi = std::numbers::pi;

/// Graph over the chord P->Q: P + u (Q - P) + offset(u) R(Q - P).
struct GraphCurve {
  Point2 p, chord, normal;
  std::function<double(double)> offset, offset_derivative;

  Point2 operator()(double u) const { return p + u * chord + offset(u) * normal; }
  Point2 derivative(double u) const { return chord + offset_derivative(u) * normal; }
};

void check_speed_ratio(const GraphCurve& g) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int k = 0; k <= 4096; ++k) {
    const double speed = norm(g.derivative(k / 4096.0));
    lo = std::min(lo, speed);
    hi = std::max(hi, speed);
  }
  if (!(lo > 0.0) || hi / lo > kMaxSpeedRatio) {
    throw BadParams(fmt::format("amplitude too large: parametrization speed ratio {:.3g} exceeds {}",
                                hi / lo, kMaxSpeedRatio));
  }
}

// Antiderivative from 0 of the C^2 step 6t^5 - 15t^4 + 10t^3.
double smoothstep_integral(double t) { return t * t * t * t * (2.5 + t * (-3.0 + t)); }

/// Curve given by its curvature profile, parametrized by arclength.
class ArcWithFlatEnds {
 public:
  explicit ArcWithFlatEnds(const InitialCurveParams& prm)
      : p_(prm.p), k_(1.0 / prm.arc_radius), ramp_(prm.ramp_length), flat_(prm.flat_length) {
    core_ = prm.arc_angle * prm.arc_radius - prm.ramp_length;
    length_ = 2.0 * flat_ + 2.0 * ramp_ + core_;
    cells_.resize(kCells + 1);
    cells_[0] = p_;
    for (std::size_t c = 0; c < kCells; ++c) {
      cells_[c + 1] = cells_[c] + integral(cell_start(c), cell_start(c + 1));
    }
  }

  double length() const { return length_; }

  double turning(double s) const {
    const double a = flat_, b = flat_ + ramp_, c = b + core_, d = c + ramp_;
    if (s <= a) return 0.0;
    if (s <= b) return k_ * ramp_ * smoothstep_integral((s - a) / ramp_);
    if (s <= c) return k_ * (0.5 * ramp_ + (s - b));
    if (s <= d) return k_ * (0.5 * ramp_ + core_ + ramp_ * (0.5 - smoothstep_integral(1.0 - (s - c) / ramp_)));
    return k_ * (ramp_ + core_);
  }

  Point2 derivative(double s) const {
    const double th = turning(s);
    return {std::cos(th), std::sin(th)};
  }

  Point2 operator()(double s) const {
    s = std::clamp(s, 0.0, length_);
    const auto c = std::min(kCells - 1, static_cast<std::size_t>(s / length_ * kCells));
    return cells_[c] + integral(cell_start(c), s);
  }

 private:
  static constexpr std::size_t kCells = 4096;

  double cell_start(std::size_t c) const {
    return length_ * static_cast<double>(c) / static_cast<double>(kCells);
  }

  /// Gauss-Legendre (8 points) of the unit tangent over [a, b].
  Point2 integral(double a, double b) const {
    static constexpr std::array<double, 4> x{0.1834346424956498, 0.5255324099163290,
                                             0.7966664774136267, 0.9602898564975363};
    static constexpr std::array<double, 4> w{0.3626837833783620, 0.3137066458778873,
                                             0.2223810344533745, 0.1012285362903763};
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    Point2 acc{};
    for (std::size_t k = 0; k < 4; ++k) {
      acc += w[k] * (derivative(mid - half * x[k]) + derivative(mid + half * x[k]));
    }
    return half * acc;
  }

  Point2 p_;
  double k_, ramp_, flat_, core_ = 0.0, length_ = 0.0;
  std::vector<Point2> cells_;
};

}  // namespace

std::string_view to_string(CurveFamily family) {
  switch (family) {
    case CurveFamily::segment: return "segment";
    case CurveFamily::flattened_sine: return "flattened_sine";
    case CurveFamily::bump_perturbed_segment: return "bump_perturbed_segment";
    case CurveFamily::arc_with_flat_ends: return "arc_with_flat_ends";
  }
  return "?";
}

std::optional<CurveFamily> parse_curve_family(std::string_view name) {
  for (CurveFamily f : {CurveFamily::segment, CurveFamily::flattened_sine,
                        CurveFamily::bump_perturbed_segment, CurveFamily::arc_with_flat_ends}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

DiscreteCurve make_initial_curve(const InitialCurveParams& prm, std::size_t n) {
  if (n < kMinSegments) throw BadParams(fmt::format("n must be at least {}", kMinSegments));

  if (prm.family == CurveFamily::arc_with_flat_ends) {
    if (!(prm.arc_radius > 0.0) || !(prm.ramp_length > 0.0) || !(prm.flat_length >= 0.0) ||
        !(prm.arc_angle > 0.0)) {
      throw BadParams("arc_with_flat_ends needs positive radius, ramp and angle");
    }
    if (prm.arc_angle * prm.arc_radius < prm.ramp_length) {
      throw BadParams("arc_with_flat_ends: ramp longer than the turning allows");
    }
    const ArcWithFlatEnds arc(prm);
    auto nodes = equal_chord_sample([&](double s) { return arc(s); },
                                    [&](double s) { return arc.derivative(s); }, 0.0, arc.length(), n);
    nodes.front() = prm.p;
    return DiscreteCurve::open(std::move(nodes));
  }

  const Point2 chord = prm.q - prm.p;
  const double span = norm(chord);
  if (!(span > 0.0)) throw BadParams("P and Q must be distinct");
  GraphCurve g{prm.p, chord, rotate_ccw(chord), [](double) { return 0.0; },
               [](double) { return 0.0; }};

  switch (prm.family) {
    case CurveFamily::segment:
      break;
    case CurveFamily::flattened_sine: {
      if (!(prm.amplitude >= 0.0) || prm.modes < 1) {
        throw BadParams("flattened_sine needs amplitude >= 0 and modes >= 1");
      }
      const double a = prm.amplitude, w = prm.modes * kPi;
      g.offset = [a, w](double u) { return a * std::sin(w * u); };
      g.offset_derivative = [a, w](double u) { return a * w * std::cos(w * u); };
      break;
    }
    case CurveFamily::bump_perturbed_segment: {
      const double lo = prm.support_lo, hi = prm.support_hi, a = prm.amplitude;
      if (!(lo > 0.0 && hi < 1.0 && lo < hi) || !(a >= 0.0)) {
        throw BadParams("bump support must satisfy 0 < lo < hi < 1 and amplitude >= 0");
      }
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      g.offset = [=](double u) {
        const double r = (u - mid) / half;
        return std::abs(r) < 1.0 ? a * std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0;
      };
      g.offset_derivative = [=](double u) {
        const double r = (u - mid) / half;
        if (std::abs(r) >= 1.0) return 0.0;
        const double q = 1.0 - r * r;
        return a * std::exp(1.0 - 1.0 / q) * (-2.0 * r / (q * q)) / half;
      };
      break;
    }
    case CurveFamily::arc_with_flat_ends:
      break;
  }
  check_speed_ratio(g);
  auto nodes = equal_chord_sample([&](double u) { return g(u); },
                                  [&](double u) { return g.derivative(u); }, 0.0, 1.0, n);
  nodes.front() = prm.p;
  nodes.back() = prm.q;
  return DiscreteCurve::open(std::move(nodes));
}

}  // namespace elastic_flow
