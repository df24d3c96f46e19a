#include "elastic_flow/estimates.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

namespace elastic_flow {

double energy(const FlowState& state) {
  const GeometryCache& g = state.cache();
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.0 + state.epsilon() * g.kappa[i] * g.kappa[i];
  return integrate(g, f);
}

namespace {

double integral_of_square(const GeometryCache& g, std::span<const double> u) {
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += g.ds[i] * u[i] * u[i];
  return sum;
}

double integral_of_power(const GeometryCache& g, std::span<const double> u, int p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += g.ds[i] * std::pow(u[i], p);
  return sum;
}

double max_abs(std::span<const double> u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

/// Node indices and arclength offsets from one end, walking inwards.
struct EndSamples {
  std::vector<std::size_t> index;
  std::vector<double> s;
};

EndSamples end_samples(const DiscreteCurve& curve, bool right_end, std::size_t first, std::size_t count) {
  const auto nodes = curve.nodes();
  const std::size_t last = nodes.size() - 1;
  EndSamples out;
  double s = 0.0;
  std::size_t prev = right_end ? last : 0;
  for (std::size_t k = 0; k < first + count; ++k) {
    const std::size_t idx = right_end ? last - k : k;
    if (k > 0) s += norm(nodes[idx] - nodes[prev]);
    prev = idx;
    if (k >= first) {
      out.index.push_back(idx);
      // arclength runs in the curve's direction, so it decreases inwards from the right end
      out.s.push_back(right_end ? -s : s);
    }
  }
  return out;
}

double one_sided_derivative(const DiscreteCurve& curve, std::span<const double> field, bool right_end,
                            std::size_t first, std::size_t count, int order) {
  const EndSamples e = end_samples(curve, right_end, first, count);
  const std::vector<double> w = fd_weights(0.0, e.s, order);
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * field[e.index[k]];
  return acc;
}

}  // namespace

double endpoint_curvature_one_sided(const DiscreteCurve& curve, bool right_end, std::size_t points) {
  if (points < 3 || points > curve.node_count()) throw BadParams("one-sided curvature needs 3..n+1 points");
  const EndSamples e = end_samples(curve, right_end, 0, points);
  const std::vector<double> w1 = fd_weights(0.0, e.s, 1);
  const std::vector<double> w2 = fd_weights(0.0, e.s, 2);
  const auto nodes = curve.nodes();
  Point2 d1, d2;
  for (std::size_t k = 0; k < points; ++k) {
    d1 += w1[k] * nodes[e.index[k]];
    d2 += w2[k] * nodes[e.index[k]];
  }
  const double speed = norm(d1);
  return cross(d1, d2) / (speed * speed * speed);
}

BoundaryResiduals boundary_residuals(const FlowState& state) {
  const DiscreteCurve& c = state.curve();
  const auto& kappa = state.cache().kappa;
  BoundaryResiduals r;
  for (bool right : {false, true}) {
    auto& side = right ? r.right : r.left;
    side[0] = std::abs(endpoint_curvature_one_sided(c, right, 8));
    side[1] = std::abs(one_sided_derivative(c, kappa, right, 1, 5, 2));
    side[2] = std::abs(one_sided_derivative(c, kappa, right, 1, 6, 4));
  }
  return r;
}

DiagnosticsRecord diagnose(const FlowState& state) {
  const GeometryCache& g = state.cache();
  DiagnosticsRecord d;
  d.t = state.time();
  d.length = g.total_length;
  d.energy = energy(state);
  const std::vector<double> e = normal_velocity(state);
  d.dissipation = integral_of_square(g, e);
  for (int j = 0; j <= 4; ++j) {
    d.kappa_l2_sq[static_cast<std::size_t>(j)] = integral_of_square(g, g.kappa_derivative(j));
  }
  d.boundary = boundary_residuals(state);
  d.max_abs_e = max_abs(e);
  d.max_abs_lambda = max_abs(tangential_velocity(state));
  return d;
}

double dissipation_residual(const Trajectory& traj, std::size_t k) {
  if (k < 1 || k + 1 >= traj.diagnostics.size()) {
    throw BadParams(fmt::format("dissipation residual needs 1 <= k <= {}, got {}",
                                traj.diagnostics.size() < 2 ? 0 : traj.diagnostics.size() - 2, k));
  }
  const auto& d = traj.diagnostics;
  return std::abs((d[k + 1].energy - d[k - 1].energy) / (2.0 * traj.dt) + d[k].dissipation);
}

double kappa_l2_rate(const FlowState& state) {
  const GeometryCache& g = state.cache();
  const auto& k = g.kappa;
  const auto& k1 = g.kappa_s[0];
  const auto& k2 = g.kappa_s[1];
  const double eps = state.epsilon();
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double k3 = k[i] * k[i] * k[i];
    f[i] = -2.0 * k1[i] * k1[i] + k3 * k[i] +
           eps * (-4.0 * k2[i] * k2[i] - k3 * k3 - 4.0 * k3 * k2[i]);
  }
  return integrate(g, f);
}

double lp_norm(const GeometryCache& cache, std::span<const double> u, double p) {
  if (std::isinf(p)) return max_abs(u);
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += cache.ds[i] * std::pow(std::abs(u[i]), p);
  return std::pow(sum, 1.0 / p);
}

double gn_sigma(int n_ord, int j_ord, double p) {
  if (j_ord < 1) throw BadParams("j must be at least 1");
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  const double sigma = (n_ord + 0.5 - inv_p) / j_ord;
  if (!(sigma >= 0.0 && sigma <= 1.0)) {
    throw BadExponent(fmt::format("sigma = {} for n={}, j={}, p={} is outside [0, 1]", sigma, n_ord, j_ord, p));
  }
  return sigma;
}

double gn_check(const GeometryCache& cache, std::span<const double> u, int n_ord, int j_ord, double p,
                double const_c, double const_b) {
  if (u.size() != cache.size()) throw BadParams("field length does not match node count");
  if (!(p >= 2.0)) throw BadParams("p must be at least 2");
  if (!(const_c > 0.0 && const_b > 0.0)) throw BadParams("GN constants must be positive");
  if (j_ord > 4) throw BadParams("derivative orders above 4 are not available");
  const double sigma = gn_sigma(n_ord, j_ord, p);
  if (n_ord < 0 || n_ord > j_ord - 1) throw BadParams("GN needs 0 <= n <= j - 1");

  const std::vector<double> du =
      n_ord == 0 ? std::vector<double>(u.begin(), u.end()) : arclength_derivative(cache, u, n_ord);
  const std::vector<double> dj = arclength_derivative(cache, u, j_ord);
  const double lhs = lp_norm(cache, du, p);
  const double u2 = lp_norm(cache, u, 2.0);
  const double dj2 = lp_norm(cache, dj, 2.0);
  const double len = cache.total_length;
  const double rhs = const_c * std::pow(dj2, sigma) * std::pow(u2, 1.0 - sigma) +
                     const_b / std::pow(len, j_ord * sigma) * u2;
  return rhs - lhs;
}

double gn_specialized_u6(const GeometryCache& cache, std::span<const double> u, double const_c) {
  if (u.size() != cache.size()) throw BadParams("field length does not match node count");
  const std::vector<double> uss = arclength_derivative(cache, u, 2);
  const double m2 = integral_of_square(cache, u);
  const double len = cache.total_length;
  const double rhs = integral_of_square(cache, uss) + const_c * std::pow(m2, 5) +
                     const_c / (len * len) * std::pow(m2, 3);
  return rhs - integral_of_power(cache, u, 6);
}

double gn_specialized_u4(const GeometryCache& cache, std::span<const double> u, double const_c) {
  if (u.size() != cache.size()) throw BadParams("field length does not match node count");
  const std::vector<double> us = arclength_derivative(cache, u, 1);
  const double m2 = integral_of_square(cache, u);
  const double len = cache.total_length;
  const double rhs =
      integral_of_square(cache, us) + const_c * std::pow(m2, 3) + const_c / len * m2 * m2;
  return rhs - integral_of_power(cache, u, 4);
}

ComparisonResult comparison_check(const Trajectory& traj, const GronwallSetup& setup) {
  if (!(setup.g0 >= 0.0) || !(setup.coeff_c >= 0.0)) {
    throw BadParams("comparison needs g0 >= 0 and C >= 0");
  }
  const double horizon = std::max(setup.t_max_query, traj.final_time());
  const GronwallSolution g = gronwall_solve(GrowthLaw::curvature_majorant(setup.coeff_c), setup.g0, horizon);

  ComparisonResult out;
  out.holds = true;
  out.margin = kInfinity;
  for (const DiagnosticsRecord& d : traj.diagnostics) {
    const double measured = d.kappa_l2_sq[0];
    const double bound = d.t <= g.covered_time() ? g.value(d.t) : kInfinity;
    if (!(measured <= bound)) out.holds = false;
    if (d.t > 0.0) out.margin = std::min(out.margin, bound - measured);
  }
  if (traj.diagnostics.size() < 2) out.margin = 0.0;
  return out;
}

}  // namespace elastic_flow
