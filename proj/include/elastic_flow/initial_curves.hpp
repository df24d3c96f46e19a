#pragma once

#include <numbers>
#include <optional>
#include <string_view>

#include "elastic_flow/curve.hpp"

namespace elastic_flow {

enum class CurveFamily { segment, flattened_sine, bump_perturbed_segment, arc_with_flat_ends };

std::string_view to_string(CurveFamily family);
std::optional<CurveFamily> parse_curve_family(std::string_view name);

/// Parameters of the initial-curve families. Lengths and amplitudes of the
/// graph families are relative to |Q - P|.
struct InitialCurveParams {
  CurveFamily family = CurveFamily::segment;
  Point2 p{0.0, 0.0};
  Point2 q{1.0, 0.0};

  // flattened_sine: offset amplitude * sin(modes * pi * u) along the chord normal
  // bump_perturbed_segment: smooth bump of height `amplitude` on [support_lo, support_hi]
  double amplitude = 0.1;
  int modes = 1;
  double support_lo = 0.3;
  double support_hi = 0.7;

  // arc_with_flat_ends: starts at p heading along +x; straight runs of
  // flat_length, C^2 curvature ramps of ramp_length, and a core arc of
  // radius arc_radius, turning by arc_angle in total. Q is wherever it ends.
  double arc_angle = std::numbers::pi;
  double arc_radius = 0.25;
  double ramp_length = 0.1;
  double flat_length = 0.3;
};

/// Largest admissible ratio between the fastest and slowest parametrization
/// speed of a graph family; beyond it BadParams is thrown.
inline constexpr double kMaxSpeedRatio = 10.0;

/// Samples the family at n segments of equal length, nodes exactly on the
/// analytic curve. Every family satisfies kappa = 0 at both ends; the sine
/// profile is odd about both endpoints so all its even derivatives vanish there.
DiscreteCurve make_initial_curve(const InitialCurveParams& params, std::size_t n);

}  // namespace elastic_flow
