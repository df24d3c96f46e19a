#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "elastic_flow/curve.hpp"
#include "elastic_flow/initial_curves.hpp"

namespace test_support {

using elastic_flow::DiscreteCurve;
using elastic_flow::Point2;

inline DiscreteCurve circle(double r, std::size_t n, Point2 c = {0.0, 0.0}) {
  std::vector<Point2> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    nodes.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return DiscreteCurve::closed(nodes);
}

inline DiscreteCurve segment(std::size_t n, Point2 p = {0.0, 0.0}, Point2 q = {1.0, 0.0}) {
  std::vector<Point2> nodes;
  for (std::size_t i = 0; i <= n; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(n);
    nodes.push_back(p + u * (q - p));
  }
  nodes.back() = q;
  return DiscreteCurve::open(nodes);
}

inline elastic_flow::InitialCurveParams sine(double amplitude) {
  elastic_flow::InitialCurveParams p;
  p.family = elastic_flow::CurveFamily::flattened_sine;
  p.amplitude = amplitude;
  return p;
}

inline elastic_flow::InitialCurveParams loop(double radius) {
  elastic_flow::InitialCurveParams p;
  p.family = elastic_flow::CurveFamily::arc_with_flat_ends;
  p.arc_angle = 2.0 * std::numbers::pi;
  p.arc_radius = radius;
  p.ramp_length = 0.1;
  p.flat_length = 0.4;
  return p;
}

template <class T>
double max_abs(const T& values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace test_support
