#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "elastic_flow/curve.hpp"

namespace elastic_flow {

/// Finite-difference weights (Fornberg) for the `order`-th derivative at
/// `center` from samples at `points`. Exact for polynomials of degree
/// < points.size().
std::vector<double> fd_weights(double center, std::span<const double> points, int order);

/// Arclength quantities of a DiscreteCurve.
///
/// Derivative stencils are centered (3 points for orders 1-2, 5 points for
/// orders 3-4) in the cumulative chord-length coordinate. Near the ends of an
/// open curve the missing samples come from odd reflection about the endpoint,
/// f(-s) = 2 f(0) - f(s), which is the symmetry class of a solution whose
/// even arclength derivatives vanish at the boundary. As a consequence kappa
/// is exactly zero at both endpoints of an open curve.
struct GeometryCache {
  Topology topology = Topology::open;
  double total_length = 0.0;
  double min_segment = 0.0;
  std::vector<double> arclength;  ///< s_i, s_0 = 0
  std::vector<double> ds;         ///< trapezoid weights in arclength
  std::vector<Point2> tangent;
  std::vector<Point2> normal;  ///< tangent rotated counterclockwise by pi/2
  std::vector<double> kappa;
  std::array<std::vector<double>, 4> kappa_s;  ///< kappa_s[j-1] = d^j kappa / ds^j

  std::size_t size() const { return kappa.size(); }
  const std::vector<double>& kappa_derivative(int order) const {
    return order == 0 ? kappa : kappa_s.at(static_cast<std::size_t>(order - 1));
  }
};

struct StencilTerm {
  std::size_t index;
  double weight;
};

/// Centered stencil of `order` (1..4) at node i, with ghost samples folded
/// onto the real nodes they reflect (a ghost weight w adds 2w at the endpoint
/// and -w at the mirrored node).
std::vector<StencilTerm> stencil_terms(const GeometryCache& cache, std::size_t i, int order);

/// Throws DegenerateCurve if a segment is shorter than 1e-14 of the length.
GeometryCache compute_geometry(const DiscreteCurve& curve);

/// d^order field / ds^order, order in 1..4, with the stencils described above.
std::vector<double> arclength_derivative(const GeometryCache& cache, std::span<const double> field,
                                         int order);

/// Composite trapezoid rule in arclength.
double integrate(const GeometryCache& cache, std::span<const double> field);

/// Samples `curve_fn` on [u0, u1] at n+1 points with equal consecutive chord
/// lengths; the first and last samples are curve_fn(u0) and curve_fn(u1).
std::vector<Point2> equal_chord_sample(const std::function<Point2(double)>& curve_fn,
                                       const std::function<Point2(double)>& curve_derivative,
                                       double u0, double u1, std::size_t n);

/// Moves the nodes of an open curve along its not-a-knot cubic interpolant
/// (chord-length parametrized) so that every segment has the same length.
/// Endpoints are copied bit-for-bit.
DiscreteCurve reparametrize_constant_speed(const DiscreteCurve& curve);

namespace testing {
/// Mutation hook for negative controls: scales the curvature stencil.
/// 1.0 restores the correct stencil.
void set_curvature_stencil_scale(double scale);
double curvature_stencil_scale();
}  // namespace testing

}  // namespace elastic_flow
