#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "elastic_flow/curve.hpp"
#include "elastic_flow/diagnostics.hpp"
#include "elastic_flow/geometry.hpp"

namespace elastic_flow {

class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularityDetected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BadConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Time-stepping parameters. epsilon = 0 selects the curvature flow.
struct FlowConfig {
  double epsilon = 0.0;
  double dt = 1e-4;
  std::size_t n = 128;  ///< segments (n + 1 nodes)
  double t_end = 1.0;
  std::size_t reparam_every = 1;
  double kappa_blowup_threshold = 1e3;
  double solver_tol = 1e-10;

  /// min(1e-4, 0.1 h^2) with h = 1/n.
  static double default_dt(std::size_t n);
  static FlowConfig with_defaults(double epsilon, std::size_t n = 128);

  /// Throws BadConfig naming the offending field.
  void validate() const;
  std::size_t step_count() const;
};

/// Curve plus its geometry at one instant; the cache always matches the curve.
class FlowState {
 public:
  FlowState(DiscreteCurve curve, double epsilon, double time = 0.0, std::size_t step_index = 0);

  const DiscreteCurve& curve() const { return curve_; }
  const GeometryCache& cache() const { return cache_; }
  double time() const { return time_; }
  double epsilon() const { return epsilon_; }
  std::size_t step_index() const { return step_index_; }

 private:
  DiscreteCurve curve_;
  GeometryCache cache_;
  double time_;
  double epsilon_;
  std::size_t step_index_;
};

/// E = -kappa + eps (2 kappa_ss + kappa^3); the curve moves by -E along the normal.
std::vector<double> normal_velocity(const FlowState& state);

/// lambda(s) = -int_0^s E kappa ds by the cumulative trapezoid; lambda(0) = 0.
std::vector<double> tangential_velocity(const FlowState& state);

/// d kappa / dt along the lambda-parametrized flow, evaluated two ways.
struct CurvatureRate {
  std::vector<double> compact;   ///< -E_ss - kappa^2 E + lambda kappa_s
  std::vector<double> expanded;  ///< the same expression with E substituted
};
CurvatureRate curvature_evolution_rhs(const FlowState& state);

/// d kappa / dt at fixed normalized arclength s / l, i.e. the rate seen by the
/// nodes of a constant-speed grid. Differs from the compact form by the
/// tangential drift -(s / l) lambda(l) kappa_s.
std::vector<double> constant_speed_kappa_rate(const FlowState& state);

/// One linearly implicit step. Throws SolverFailure or SingularityDetected.
FlowState step(const FlowState& state, const FlowConfig& config);

enum class Termination { reached_t_end, singularity_detected, solver_failure };
std::string_view to_string(Termination t);

struct Trajectory {
  std::vector<FlowState> states;  ///< snapshots, strictly increasing in time
  std::vector<DiagnosticsRecord> diagnostics;  ///< one per step including t = 0
  Termination terminated_by = Termination::reached_t_end;
  std::string termination_detail;
  double dt = 0.0;
  double epsilon = 0.0;

  double final_time() const { return diagnostics.empty() ? 0.0 : diagnostics.back().t; }
  /// Snapshot with the given step index, if it was stored.
  const FlowState* snapshot_at_step(std::size_t step) const;
};

struct RunOptions {
  std::size_t stride = 1;  ///< snapshot every stride steps; the last state is always kept
  std::set<std::size_t> extra_snapshot_steps;
};

class IncompatibleInitialData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Endpoint curvature tolerance for run()'s compatibility precondition,
/// measured with sixth-order one-sided stencils.
inline constexpr double kCompatibilityTolerance = 1e-6;

Trajectory run(const DiscreteCurve& initial, const FlowConfig& config, const RunOptions& options = {});

}  // namespace elastic_flow
