#pragma once

#include <span>
#include <vector>

#include "elastic_flow/curve.hpp"

namespace elastic_flow {

/// Not-a-knot cubic interpolant through (knots[i], values[i]).
class CubicSpline {
 public:
  CubicSpline(std::span<const double> knots, std::span<const double> values);

  double value(double u) const;
  double derivative(double u) const;

  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }

 private:
  std::size_t segment(double u) const;

  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> second_;  // second derivatives at the knots
};

/// Planar curve u -> (x(u), y(u)) with both coordinates splined on the same knots.
class PlanarSpline {
 public:
  PlanarSpline(std::span<const double> knots, std::span<const Point2> points);

  Point2 operator()(double u) const { return {x_.value(u), y_.value(u)}; }
  Point2 derivative(double u) const { return {x_.derivative(u), y_.derivative(u)}; }
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  static std::vector<double> coordinate(std::span<const Point2> points, bool want_x);

  CubicSpline x_;
  CubicSpline y_;
};

}  // namespace elastic_flow
