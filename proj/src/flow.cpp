#include "elastic_flow/flow.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "elastic_flow/banded.hpp"
#include "elastic_flow/estimates.hpp"

namespace elastic_flow {

double FlowConfig::default_dt(std::size_t n) {
  const double h = 1.0 / static_cast<double>(n);
  return std::min(1e-4, 0.1 * h * h);
}

FlowConfig FlowConfig::with_defaults(double epsilon, std::size_t n) {
  FlowConfig c;
  c.epsilon = epsilon;
  c.n = n;
  c.dt = default_dt(n);
  return c;
}

void FlowConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw BadConfig(fmt::format("epsilon: {} is outside [0, 1]", epsilon));
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw BadConfig(fmt::format("dt: {} must be positive", dt));
  if (n < kMinSegments) throw BadConfig(fmt::format("n: {} is below the minimum {}", n, kMinSegments));
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw BadConfig(fmt::format("t_end: {} must be positive", t_end));
  }
  if (reparam_every < 1) throw BadConfig("reparam_every: must be at least 1");
  if (!(kappa_blowup_threshold > 0.0)) {
    throw BadConfig(fmt::format("kappa_blowup_threshold: {} must be positive", kappa_blowup_threshold));
  }
  if (!(solver_tol > 0.0)) throw BadConfig(fmt::format("solver_tol: {} must be positive", solver_tol));
}

std::size_t FlowConfig::step_count() const {
  return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

FlowState::FlowState(DiscreteCurve curve, double epsilon, double time, std::size_t step_index)
    : curve_(std::move(curve)),
      cache_(compute_geometry(curve_)),
      time_(time),
      epsilon_(epsilon),
      step_index_(step_index) {}

std::vector<double> normal_velocity(const FlowState& state) {
  const GeometryCache& g = state.cache();
  const double eps = state.epsilon();
  const auto& k = g.kappa;
  const auto& kss = g.kappa_s[1];
  std::vector<double> e(g.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = -k[i] + eps * (2.0 * kss[i] + k[i] * k[i] * k[i]);
  }
  return e;
}

std::vector<double> tangential_velocity(const FlowState& state) {
  const GeometryCache& g = state.cache();
  const std::vector<double> e = normal_velocity(state);
  std::vector<double> lam(g.size(), 0.0);
  for (std::size_t i = 1; i < lam.size(); ++i) {
    const double h = g.arclength[i] - g.arclength[i - 1];
    lam[i] = lam[i - 1] - 0.5 * h * (e[i - 1] * g.kappa[i - 1] + e[i] * g.kappa[i]);
  }
  return lam;
}

CurvatureRate curvature_evolution_rhs(const FlowState& state) {
  const GeometryCache& g = state.cache();
  const double eps = state.epsilon();
  const std::vector<double> e = normal_velocity(state);
  const std::vector<double> lam = tangential_velocity(state);
  const std::vector<double> ess = arclength_derivative(g, e, 2);
  const auto& k = g.kappa;
  const auto& k1 = g.kappa_s[0];
  const auto& k2 = g.kappa_s[1];
  const auto& k4 = g.kappa_s[3];

  CurvatureRate out;
  out.compact.resize(g.size());
  out.expanded.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double kk = k[i] * k[i];
    out.compact[i] = -ess[i] - kk * e[i] + lam[i] * k1[i];
    out.expanded[i] = k2[i] + kk * k[i] - 2.0 * eps * k4[i] - 6.0 * eps * k[i] * k1[i] * k1[i] -
                      5.0 * eps * kk * k2[i] - eps * kk * kk * k[i] + lam[i] * k1[i];
  }
  return out;
}

std::vector<double> constant_speed_kappa_rate(const FlowState& state) {
  const GeometryCache& g = state.cache();
  std::vector<double> rate = curvature_evolution_rhs(state).compact;
  const std::vector<double> lam = tangential_velocity(state);
  const double lam_end = lam.back();
  for (std::size_t i = 0; i < rate.size(); ++i) {
    rate[i] -= (g.arclength[i] / g.total_length) * lam_end * g.kappa_s[0][i];
  }
  return rate;
}

FlowState step(const FlowState& state, const FlowConfig& config) {
  const GeometryCache& g = state.cache();
  const auto nodes = state.curve().nodes();
  const std::size_t m = nodes.size();
  const double dt = config.dt;
  const double eps = state.epsilon();
  const std::vector<double> e = normal_velocity(state);

  // (I - dt (D2 - 2 eps D4)) dX = dt V nu with V = -E; pinned rows are identity
  BandedMatrix a(m, 2, 2);
  std::vector<double> bx(m, 0.0), by(m, 0.0);
  a.at(0, 0) = 1.0;
  a.at(m - 1, m - 1) = 1.0;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    a.at(i, i) += 1.0;
    for (const StencilTerm& t : stencil_terms(g, i, 2)) a.at(i, t.index) -= dt * t.weight;
    if (eps > 0.0) {
      for (const StencilTerm& t : stencil_terms(g, i, 4)) a.at(i, t.index) += 2.0 * eps * dt * t.weight;
    }
    const Point2 rhs = (-dt * e[i]) * g.normal[i];
    bx[i] = rhs.x;
    by[i] = rhs.y;
  }

  std::vector<double> dx, dy;
  try {
    const BandedLU lu(a);
    dx = lu.solve_refined(a, bx);
    dy = lu.solve_refined(a, by);
  } catch (const SingularMatrix& err) {
    throw SolverFailure(fmt::format("t={}: {}", state.time(), err.what()));
  }
  const double err = std::max(backward_error(a, dx, bx), backward_error(a, dy, by));
  if (!(err <= config.solver_tol)) {
    throw SolverFailure(fmt::format("t={}: backward error {:.3e} exceeds solver_tol {:.3e}",
                                    state.time(), err, config.solver_tol));
  }

  std::vector<Point2> next(nodes.begin(), nodes.end());
  for (std::size_t i = 1; i + 1 < m; ++i) next[i] += Point2{dx[i], dy[i]};

  const double t_next = state.time() + dt;
  try {
    DiscreteCurve curve = DiscreteCurve::open(std::move(next));
    if (curve.min_segment_length() < 1e-6 * curve.total_length()) {
      throw SingularityDetected(fmt::format("t={}: segment collapsed to {:.3e} of the length", t_next,
                                            curve.min_segment_length() / curve.total_length()));
    }
    if ((state.step_index() + 1) % config.reparam_every == 0) {
      curve = reparametrize_constant_speed(curve);
    }
    FlowState out(std::move(curve), eps, t_next, state.step_index() + 1);
    double kmax = 0.0;
    for (double k : out.cache().kappa) kmax = std::max(kmax, std::abs(k));
    if (!(kmax <= config.kappa_blowup_threshold)) {
      throw SingularityDetected(fmt::format("t={}: max |kappa| = {:.6g} exceeds threshold {:.6g}",
                                            t_next, kmax, config.kappa_blowup_threshold));
    }
    return out;
  } catch (const DegenerateCurve& err) {
    throw SingularityDetected(fmt::format("t={}: {}", t_next, err.what()));
  }
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::reached_t_end:
      return "reached_t_end";
    case Termination::singularity_detected:
      return "singularity_detected";
    case Termination::solver_failure:
      return "solver_failure";
  }
  return "unknown";
}

const FlowState* Trajectory::snapshot_at_step(std::size_t step) const {
  auto it = std::lower_bound(states.begin(), states.end(), step,
                             [](const FlowState& s, std::size_t k) { return s.step_index() < k; });
  if (it == states.end() || it->step_index() != step) return nullptr;
  return &*it;
}

Trajectory run(const DiscreteCurve& initial, const FlowConfig& config, const RunOptions& options) {
  config.validate();
  if (options.stride < 1) throw BadConfig("stride: must be at least 1");
  if (!initial.is_open()) throw BadConfig("initial curve must be open");
  if (initial.segments() != config.n) {
    throw BadConfig(fmt::format("n: config has {} segments, initial curve has {}", config.n,
                                initial.segments()));
  }
  for (bool right : {false, true}) {
    const double k = endpoint_curvature_one_sided(initial, right, 8);
    if (!(std::abs(k) <= kCompatibilityTolerance)) {
      throw IncompatibleInitialData(fmt::format("endpoint curvature {:.3e} at the {} end exceeds {:.1e}", k,
                                                right ? "right" : "left", kCompatibilityTolerance));
    }
  }

  Trajectory traj;
  traj.dt = config.dt;
  traj.epsilon = config.epsilon;
  const std::size_t steps = config.step_count();

  FlowState current(initial, config.epsilon);
  std::vector<double> lambda_end;
  auto record = [&](const FlowState& s) {
    traj.diagnostics.push_back(diagnose(s));
    lambda_end.push_back(tangential_velocity(s).back());
  };
  record(current);
  traj.states.push_back(current);

  for (std::size_t k = 1; k <= steps; ++k) {
    try {
      FlowState next = step(current, config);
      current = std::move(next);
    } catch (const SingularityDetected& err) {
      traj.terminated_by = Termination::singularity_detected;
      traj.termination_detail = err.what();
      break;
    } catch (const SolverFailure& err) {
      traj.terminated_by = Termination::solver_failure;
      traj.termination_detail = err.what();
      break;
    }
    record(current);
    const bool keep = k % options.stride == 0 || k == steps || options.extra_snapshot_steps.count(k) > 0;
    if (keep) traj.states.push_back(current);
  }
  if (traj.states.back().step_index() != current.step_index()) traj.states.push_back(current);

  // dl/dt by centered differences, one-sided at the ends of the record
  const std::size_t count = traj.diagnostics.size();
  for (std::size_t k = 0; k < count && count >= 2; ++k) {
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k + 1 == count ? k : k + 1;
    const double rate = (traj.diagnostics[hi].length - traj.diagnostics[lo].length) /
                        (static_cast<double>(hi - lo) * config.dt);
    traj.diagnostics[k].lambda_endpoint_residual = std::abs(lambda_end[k] + rate);
  }
  return traj;
}

}  // namespace elastic_flow
