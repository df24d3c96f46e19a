#include "elastic_flow/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string_view>
#include <thread>

#include <fmt/format.h>

#include "elastic_flow/geometry.hpp"
#include "elastic_flow/spline.hpp"

namespace elastic_flow {

SweepConfig SweepConfig::with_defaults(std::vector<double> epsilons, const FlowConfig& base) {
  SweepConfig c;
  c.epsilons = std::move(epsilons);
  c.base = base;
  c.delta = 0.05 * base.t_end;
  return c;
}

namespace {

bool on_dt_grid(double t, double dt) {
  const double steps = t / dt;
  return std::abs(steps - std::round(steps)) <= 1e-6 * std::max(1.0, steps);
}

std::size_t to_step(double t, double dt) { return static_cast<std::size_t>(std::llround(t / dt)); }

}  // namespace

void SweepConfig::validate() const {
  base.validate();
  if (epsilons.empty()) throw BadConfig("sweep.epsilons: must not be empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0 && epsilons[i] <= 1.0)) {
      throw BadConfig(fmt::format("sweep.epsilons: {} is outside (0, 1]", epsilons[i]));
    }
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      throw BadConfig("sweep.epsilons: must be strictly decreasing");
    }
  }
  if (!(delta >= 0.0 && delta < base.t_end)) {
    throw BadConfig(fmt::format("sweep.delta: {} must lie in [0, t_end)", delta));
  }
  if (k_max < 0 || k_max > kMaxDistanceOrder) {
    throw BadConfig(fmt::format("sweep.k_max: {} is outside 0..{}", k_max, kMaxDistanceOrder));
  }
  for (double t : snapshot_times) {
    if (!(t >= 0.0 && t <= base.t_end)) {
      throw BadConfig(fmt::format("sweep.snapshot_times: {} is outside [0, t_end]", t));
    }
    if (!on_dt_grid(t, base.dt)) {
      throw BadConfig(fmt::format("sweep.snapshot_times: {} is not a multiple of dt = {}", t, base.dt));
    }
  }
}

std::vector<std::size_t> SweepConfig::snapshot_steps() const {
  std::vector<std::size_t> steps;
  const std::size_t last = base.step_count();
  const auto first = static_cast<std::size_t>(std::ceil(delta / base.dt - 1e-9));
  if (snapshot_times.empty()) {
    constexpr int kDefaultSnapshots = 20;
    for (int i = 0; i < kDefaultSnapshots; ++i) {
      const double t = delta + (base.t_end - delta) * i / (kDefaultSnapshots - 1);
      steps.push_back(std::min(last, to_step(t, base.dt)));
    }
  } else {
    for (double t : snapshot_times) steps.push_back(to_step(t, base.dt));
  }
  steps.push_back(std::min(first, last));
  steps.push_back(last);
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  return steps;
}

namespace {

/// Open-curve stencil layout on the uniform parameter grid x_i = i / n.
GeometryCache parameter_grid(std::size_t n) {
  GeometryCache g;
  g.topology = Topology::open;
  g.total_length = 1.0;
  g.arclength.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g.arclength[i] = static_cast<double>(i) / static_cast<double>(n);
  g.kappa.assign(n + 1, 0.0);  // only size() is read
  return g;
}

/// d^j_x of the node positions for j = 0..k.
std::vector<std::vector<Point2>> parameter_derivatives(const GeometryCache& grid, std::span<const Point2> nodes,
                                                       int k) {
  std::vector<std::vector<Point2>> out;
  out.emplace_back(nodes.begin(), nodes.end());
  for (int j = 1; j <= k; ++j) {
    std::vector<Point2> d(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (const StencilTerm& t : stencil_terms(grid, i, j)) d[i] += t.weight * nodes[t.index];
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<Point2> resample(std::span<const Point2> nodes, std::size_t n) {
  const std::size_t m = nodes.size() - 1;
  if (m == n) return {nodes.begin(), nodes.end()};
  std::vector<double> knots(m + 1);
  for (std::size_t i = 0; i <= m; ++i) knots[i] = static_cast<double>(i) / static_cast<double>(m);
  const PlanarSpline spline(knots, nodes);
  std::vector<Point2> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out[i] = spline(static_cast<double>(i) / static_cast<double>(n));
  out.front() = nodes.front();
  out.back() = nodes.back();
  return out;
}

const FlowState* snapshot_near(const Trajectory& traj, double t, double tol) {
  auto it = std::lower_bound(traj.states.begin(), traj.states.end(), t - tol,
                             [](const FlowState& s, double v) { return s.time() < v; });
  if (it == traj.states.end() || std::abs(it->time() - t) > tol) return nullptr;
  return &*it;
}

}  // namespace

std::vector<double> ck_distances(const Trajectory& a, const Trajectory& b, int k, double t0, double t1) {
  if (k < 0 || k > kMaxDistanceOrder) throw BadParams(fmt::format("k = {} is outside 0..{}", k, kMaxDistanceOrder));
  if (!(t0 <= t1)) throw BadParams("window must satisfy t0 <= t1");
  const double tol = 0.5 * std::min(a.dt, b.dt);
  for (const Trajectory* t : {&a, &b}) {
    if (t->final_time() < t1 - tol) {
      throw WindowMismatch(fmt::format("trajectory ended at t = {} ({}) before the window end {}",
                                       t->final_time(), to_string(t->terminated_by), t1));
    }
  }
  std::vector<double> dist(static_cast<std::size_t>(k) + 1, 0.0);
  std::size_t common = 0;
  GeometryCache grid;
  for (const FlowState& sa : a.states) {
    if (sa.time() < t0 - tol || sa.time() > t1 + tol) continue;
    const FlowState* sb = snapshot_near(b, sa.time(), tol);
    if (sb == nullptr) continue;
    ++common;
    const std::size_t n = sa.curve().segments();
    if (grid.size() != n + 1) grid = parameter_grid(n);
    const std::vector<Point2> nb = resample(sb->curve().nodes(), n);
    const auto da = parameter_derivatives(grid, sa.curve().nodes(), k);
    const auto db = parameter_derivatives(grid, nb, k);
    for (std::size_t j = 0; j < dist.size(); ++j) {
      for (std::size_t i = 0; i <= n; ++i) dist[j] = std::max(dist[j], norm(da[j][i] - db[j][i]));
    }
  }
  if (common == 0) throw WindowMismatch(fmt::format("no common snapshot in [{}, {}]", t0, t1));
  // sup over all orders up to j
  for (std::size_t j = 1; j < dist.size(); ++j) dist[j] = std::max(dist[j], dist[j - 1]);
  return dist;
}

double ck_distance(const Trajectory& a, const Trajectory& b, int k, double t0, double t1) {
  return ck_distances(a, b, k, t0, t1).back();
}

unsigned worker_threads() {
  if (const char* env = std::getenv("ELASTIC_FLOW_THREADS")) {
    const std::string_view s(env);
    unsigned v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::optional<double> log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) return std::nullopt;
  return sxy / sxx;
}

}  // namespace

ConvergenceReport run_sweep(const DiscreteCurve& initial, const SweepConfig& config, unsigned threads) {
  config.validate();
  RunOptions options;
  options.stride = config.base.step_count() + 1;
  for (std::size_t s : config.snapshot_steps()) options.extra_snapshot_steps.insert(s);

  // task 0 is the shared epsilon = 0 reference
  const std::size_t tasks = config.epsilons.size() + 1;
  std::vector<Trajectory> results(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks; i = next++) {
      FlowConfig cfg = config.base;
      cfg.epsilon = i == 0 ? 0.0 : config.epsilons[i - 1];
      try {
        results[i] = run(initial, cfg, options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned count = std::min<unsigned>(threads == 0 ? worker_threads() : threads, static_cast<unsigned>(tasks));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ConvergenceReport report;
  report.delta = config.delta;
  report.t_end = config.base.t_end;
  report.dt = config.base.dt;
  report.n = config.base.n;
  report.k_max = config.k_max;
  report.reference_terminated_by = results[0].terminated_by;
  for (std::size_t i = 1; i < tasks; ++i) {
    ConvergenceRow row;
    row.epsilon = config.epsilons[i - 1];
    row.terminated_by = results[i].terminated_by;
    row.detail = results[i].termination_detail;
    try {
      row.distance = ck_distances(results[i], results[0], config.k_max, config.delta, config.base.t_end);
    } catch (const WindowMismatch& err) {
      row.detail = err.what();
    }
    report.rows.push_back(std::move(row));
  }

  const auto kcount = static_cast<std::size_t>(config.k_max) + 1;
  report.fitted_order.assign(kcount, std::nullopt);
  report.monotone.assign(kcount, false);
  for (std::size_t k = 0; k < kcount; ++k) {
    std::vector<double> eps, dist;
    bool all_complete = true;
    bool decreasing = report.rows.size() >= 2;
    for (std::size_t r = 0; r < report.rows.size(); ++r) {
      const ConvergenceRow& row = report.rows[r];
      if (!row.complete()) {
        all_complete = false;
        continue;
      }
      if (r > 0 && report.rows[r - 1].complete() && !(row.distance[k] < report.rows[r - 1].distance[k])) {
        decreasing = false;
      }
      if (row.distance[k] > 1e-10) {
        eps.push_back(row.epsilon);
        dist.push_back(row.distance[k]);
      }
    }
    report.monotone[k] = all_complete && decreasing;
    report.fitted_order[k] = log_slope(eps, dist);
  }
  return report;
}

std::optional<double> singularity_time_estimate(const Trajectory& traj) {
  if (traj.terminated_by != Termination::singularity_detected) return std::nullopt;
  return traj.final_time() + traj.dt;
}

}  // namespace elastic_flow
