#pragma once

#include <array>

namespace elastic_flow {

/// |d^j kappa / ds^j| at the left and right endpoint for j = 0, 2, 4.
struct BoundaryResiduals {
  std::array<double, 3> left{};
  std::array<double, 3> right{};
};

/// Per-step scalar record of a trajectory.
struct DiagnosticsRecord {
  double t = 0.0;
  double length = 0.0;
  double energy = 0.0;       ///< F_eps = int (1 + eps kappa^2) ds
  double dissipation = 0.0;  ///< int E^2 ds
  std::array<double, 5> kappa_l2_sq{};  ///< ||d^j kappa||^2_{L^2}, j = 0..4
  BoundaryResiduals boundary;
  double lambda_endpoint_residual = 0.0;  ///< |lambda(l) + dl/dt|
  double max_abs_e = 0.0;
  double max_abs_lambda = 0.0;
};

}  // namespace elastic_flow
