#pragma once

#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "elastic_flow/diagnostics.hpp"
#include "elastic_flow/flow.hpp"
#include "elastic_flow/gronwall.hpp"

namespace elastic_flow {

class BadExponent : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// F_eps = int (1 + eps kappa^2) ds by the trapezoid rule.
double energy(const FlowState& state);

/// All per-step scalars except lambda_endpoint_residual, which needs the
/// neighbouring steps and is filled in by run().
DiagnosticsRecord diagnose(const FlowState& state);

/// |(F_{k+1} - F_{k-1}) / (2 dt) + int E^2 ds at t_k|, 1 <= k <= last - 1.
double dissipation_residual(const Trajectory& traj, std::size_t k);

/// Endpoint curvature measured directly from the positions with one-sided
/// stencils on `points` nodes (4 gives second order, 6 fourth, 8 sixth).
/// Independent of the odd-reflection ghosts used by compute_geometry.
double endpoint_curvature_one_sided(const DiscreteCurve& curve, bool right_end, std::size_t points = 4);

/// |d^j kappa / ds^j| at both ends for j = 0, 2, 4, from one-sided stencils:
/// j = 0 from positions (8 points), j = 2 and j = 4 from the interior curvature values
/// kappa_1..kappa_5 and kappa_1..kappa_6. No ghost values are used.
BoundaryResiduals boundary_residuals(const FlowState& state);

/// d/dt int kappa^2 ds predicted for the current state:
/// int (-2 kappa_s^2 + kappa^4) + eps int (-4 kappa_ss^2 - kappa^6 - 4 kappa^3 kappa_ss).
double kappa_l2_rate(const FlowState& state);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Discrete L^p norm in arclength (trapezoid), p = kInfinity gives the max.
double lp_norm(const GeometryCache& cache, std::span<const double> u, double p);

/// Interpolation inequality
///   ||d^n u||_p <= C ||d^j u||_2^sigma ||u||_2^(1-sigma) + B / L^(j sigma) ||u||_2,
/// sigma = (n + 1/2 - 1/p) / j. Returns RHS - LHS.
double gn_check(const GeometryCache& cache, std::span<const double> u, int n_ord, int j_ord, double p,
                double const_c, double const_b);
double gn_sigma(int n_ord, int j_ord, double p);

/// int u^6 <= int u_ss^2 + C (int u^2)^5 + C / L^2 (int u^2)^3; returns RHS - LHS.
double gn_specialized_u6(const GeometryCache& cache, std::span<const double> u, double const_c);
/// int u^4 <= int u_s^2 + C (int u^2)^3 + C / L (int u^2)^2; returns RHS - LHS.
double gn_specialized_u4(const GeometryCache& cache, std::span<const double> u, double const_c);

struct ComparisonResult {
  bool holds = false;
  /// min over recorded t > 0 of g(t) - int kappa^2 ds (t = 0 agrees by construction)
  double margin = 0.0;
};

/// Compares the measured int kappa^2 of every diagnostics record against the
/// solution g of g' = Z(g) with Z = curvature_majorant(setup.coeff_c).
ComparisonResult comparison_check(const Trajectory& traj, const GronwallSetup& setup);

}  // namespace elastic_flow
