#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "elastic_flow/flow.hpp"

namespace elastic_flow {

class WindowMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kMaxDistanceOrder = 3;

/// epsilon ladder against the epsilon = 0 reference.
struct SweepConfig {
  std::vector<double> epsilons;  ///< strictly decreasing, in (0, 1]
  FlowConfig base;               ///< dt, n, t_end shared by every run; base.epsilon is ignored
  double delta = 0.0;            ///< comparison window is [delta, t_end]
  int k_max = 1;                 ///< highest derivative order, <= 3
  std::vector<double> snapshot_times;  ///< empty: 20 equally spaced times in the window

  /// Default delta = 0.05 t_end.
  static SweepConfig with_defaults(std::vector<double> epsilons, const FlowConfig& base);

  /// Throws BadConfig naming the offending field.
  void validate() const;
  /// Snapshot times on the dt grid, always including delta and t_end.
  std::vector<std::size_t> snapshot_steps() const;
};

/// sup over common snapshots in [t0, t1], nodes and j <= k of
/// |d^j_x Y_a - d^j_x Y_b|, Y the constant-speed parametrization over x in [0, 1].
/// Trajectories with different n are compared after resampling b onto a's
/// grid with the not-a-knot spline in x.
/// Throws WindowMismatch if either trajectory ended before t1 or the window
/// holds no common snapshot.
double ck_distance(const Trajectory& a, const Trajectory& b, int k, double t0, double t1);

/// All distances d_0..d_k at once; same contract as ck_distance.
std::vector<double> ck_distances(const Trajectory& a, const Trajectory& b, int k, double t0, double t1);

struct ConvergenceRow {
  double epsilon = 0.0;
  std::vector<double> distance;  ///< d_0..d_kmax; empty if the row did not cover the window
  Termination terminated_by = Termination::reached_t_end;
  std::string detail;
  bool complete() const { return !distance.empty(); }
};

struct ConvergenceReport {
  double delta = 0.0;
  double t_end = 0.0;
  double dt = 0.0;
  std::size_t n = 0;
  int k_max = 0;
  Termination reference_terminated_by = Termination::reached_t_end;
  std::vector<ConvergenceRow> rows;  ///< in ladder order (decreasing epsilon)
  /// slope of log d_k against log epsilon; nullopt when fewer than two
  /// complete rows have d_k above 1e-10
  std::vector<std::optional<double>> fitted_order;
  std::vector<bool> monotone;  ///< d_k strictly decreasing along the ladder, all rows complete
};

/// Worker count from ELASTIC_FLOW_THREADS (>= 1), else hardware concurrency.
unsigned worker_threads();

ConvergenceReport run_sweep(const DiscreteCurve& initial, const SweepConfig& config, unsigned threads = 0);

/// Time of singularity detection (one step past the last completed state), if any.
std::optional<double> singularity_time_estimate(const Trajectory& traj);

}  // namespace elastic_flow
