#include "elastic_flow/spline.hpp"

#include <algorithm>

#include "elastic_flow/banded.hpp"

namespace elastic_flow {

CubicSpline::CubicSpline(std::span<const double> knots, std::span<const double> values)
    : knots_(knots.begin(), knots.end()), values_(values.begin(), values.end()) {
  const std::size_t m = knots_.size();
  if (m < 4 || values_.size() != m) throw BadParams("not-a-knot spline needs at least 4 knots");
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (!(knots_[i + 1] > knots_[i])) throw BadParams("spline knots must be strictly increasing");
  }
  const std::size_t n = m - 1;
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = knots_[i + 1] - knots_[i];

  BandedMatrix a(m, 2, 2);
  std::vector<double> rhs(m, 0.0);
  // third derivative continuous across the second and second-to-last knots
  a.at(0, 0) = h[1];
  a.at(0, 1) = -(h[0] + h[1]);
  a.at(0, 2) = h[0];
  for (std::size_t i = 1; i < n; ++i) {
    a.at(i, i - 1) = h[i - 1];
    a.at(i, i) = 2.0 * (h[i - 1] + h[i]);
    a.at(i, i + 1) = h[i];
    rhs[i] = 6.0 * ((values_[i + 1] - values_[i]) / h[i] - (values_[i] - values_[i - 1]) / h[i - 1]);
  }
  a.at(n, n - 2) = h[n - 1];
  a.at(n, n - 1) = -(h[n - 2] + h[n - 1]);
  a.at(n, n) = h[n - 2];
  second_ = BandedLU(a).solve(rhs);
}

std::size_t CubicSpline::segment(double u) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
  if (it == knots_.begin()) return 0;
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  return std::min(i, knots_.size() - 2);
}

double CubicSpline::value(double u) const {
  const std::size_t i = segment(u);
  const double h = knots_[i + 1] - knots_[i];
  const double t = u - knots_[i];
  const double b = (values_[i + 1] - values_[i]) / h - h * (2.0 * second_[i] + second_[i + 1]) / 6.0;
  const double c = 0.5 * second_[i];
  const double d = (second_[i + 1] - second_[i]) / (6.0 * h);
  return values_[i] + t * (b + t * (c + t * d));
}

double CubicSpline::derivative(double u) const {
  const std::size_t i = segment(u);
  const double h = knots_[i + 1] - knots_[i];
  const double t = u - knots_[i];
  const double b = (values_[i + 1] - values_[i]) / h - h * (2.0 * second_[i] + second_[i + 1]) / 6.0;
  const double c = 0.5 * second_[i];
  const double d = (second_[i + 1] - second_[i]) / (6.0 * h);
  return b + t * (2.0 * c + 3.0 * t * d);
}

std::vector<double> PlanarSpline::coordinate(std::span<const Point2> points, bool want_x) {
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = want_x ? points[i].x : points[i].y;
  return out;
}

PlanarSpline::PlanarSpline(std::span<const double> knots, std::span<const Point2> points)
    : x_(knots, coordinate(points, true)), y_(knots, coordinate(points, false)) {}

}  // namespace elastic_flow
