#include "elastic_flow/gronwall.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "elastic_flow/curve.hpp"

namespace elastic_flow {

GrowthLaw GrowthLaw::curvature_majorant(double c) {
  return {fmt::format("C(p^5+p^3+p^2), C={}", c),
          [c](double p) { return c * (std::pow(p, 5) + p * p * p + p * p); },
          [c](double p) { return c * (5.0 * std::pow(p, 4) + 3.0 * p * p + 2.0 * p); }};
}

GrowthLaw GrowthLaw::linear() {
  return {"p", [](double p) { return p; }, [](double) { return 1.0; }};
}

GrowthLaw GrowthLaw::quadratic() {
  return {"p^2", [](double p) { return p * p; }, [](double p) { return 2.0 * p; }};
}

void GronwallSetup::validate() const {
  if (!(g0 > 0.0) || !std::isfinite(g0)) throw BadParams(fmt::format("g0: {} must be positive", g0));
  if (!(coeff_c > 0.0) || !std::isfinite(coeff_c)) {
    throw BadParams(fmt::format("coeff_c: {} must be positive", coeff_c));
  }
  if (!(t_max_query > 0.0)) throw BadParams(fmt::format("t_max_query: {} must be positive", t_max_query));
}

namespace {

// Dormand-Prince 5(4)
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

struct Hermite {
  double value, derivative;
};

/// Quintic Hermite interpolant on [t0, t0 + h] matching value, first and
/// second derivative at both ends.
Hermite hermite(double theta, double h, double y0, double y1, double d0, double d1, double s0, double s1) {
  const double t = theta, t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
  const double h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
  const double h3 = 0.5 * (t3 - 2 * t4 + t5);
  const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
  const double h5 = 10 * t3 - 15 * t4 + 6 * t5;
  const double dh0 = -30 * t2 + 60 * t3 - 30 * t4;
  const double dh1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
  const double dh2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
  const double dh3 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
  const double dh4 = -12 * t2 + 28 * t3 - 15 * t4;
  const double dh5 = 30 * t2 - 60 * t3 + 30 * t4;
  const double v = h0 * y0 + h1 * h * d0 + h2 * h * h * s0 + h3 * h * h * s1 + h4 * h * d1 + h5 * y1;
  const double dv = (dh0 * y0 + dh1 * h * d0 + dh2 * h * h * s0 + dh3 * h * h * s1 + dh4 * h * d1 + dh5 * y1) / h;
  return {v, dv};
}

/// int_g^inf dp / Z(p), infinite when Z grows at most linearly.
double tail_time(const GrowthLaw& law, double g) {
  const double ratio = law.z(2.0 * g) / law.z(g);
  if (!(ratio > 2.0 * (1.0 + 1e-9))) return std::numeric_limits<double>::infinity();
  // p = g / v maps (g, inf) onto (0, 1)
  auto f = [&](double v) {
    if (v <= 0.0) return 0.0;
    const double z = law.z(g / v);
    if (!std::isfinite(z)) return 0.0;
    return g / (v * v * z);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-12);
}

}  // namespace

std::size_t GronwallSolution::interval(double t) const {
  if (!(t >= times_.front() && t <= times_.back())) {
    throw OutOfDomain(fmt::format("t = {} is outside the solved range [0, {}]", t, times_.back()));
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times_.begin());
  return i == 0 ? 0 : std::min(i - 1, times_.size() - 2);
}

double GronwallSolution::value(double t) const {
  if (times_.size() == 1) {
    if (t != times_.front()) throw OutOfDomain("solution has a single point");
    return values_.front();
  }
  const std::size_t i = interval(t);
  const double h = times_[i + 1] - times_[i];
  const double y0 = values_[i], y1 = values_[i + 1];
  const double d0 = law_.z(y0), d1 = law_.z(y1);
  return hermite((t - times_[i]) / h, h, y0, y1, d0, d1, law_.dz(y0) * d0, law_.dz(y1) * d1).value;
}

double GronwallSolution::derivative(double t) const {
  if (times_.size() == 1) return law_.z(values_.front());
  const std::size_t i = interval(t);
  const double h = times_[i + 1] - times_[i];
  const double y0 = values_[i], y1 = values_[i + 1];
  const double d0 = law_.z(y0), d1 = law_.z(y1);
  return hermite((t - times_[i]) / h, h, y0, y1, d0, d1, law_.dz(y0) * d0, law_.dz(y1) * d1).derivative;
}

double GronwallSolution::inverse(double v) const {
  if (!(v >= values_.front() && v <= values_.back())) {
    throw OutOfDomain(fmt::format("g = {} is outside the solved range [{}, {}]", v, values_.front(), values_.back()));
  }
  const auto it = std::lower_bound(values_.begin(), values_.end(), v);
  const auto i = static_cast<std::size_t>(it - values_.begin());
  if (values_[i] == v) return times_[i];
  double lo = times_[i - 1], hi = times_[i];
  while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (value(mid) < v) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

GronwallSolution gronwall_solve(const GrowthLaw& law, double g0, double t_max) {
  if (!(g0 >= 0.0) || !std::isfinite(g0)) throw BadParams(fmt::format("g0: {} must be finite and >= 0", g0));
  if (!(t_max > 0.0)) throw BadParams(fmt::format("t_max: {} must be positive", t_max));
  GronwallSolution sol;
  sol.law_ = law;
  sol.times_.push_back(0.0);
  sol.values_.push_back(g0);

  const auto& z = law.z;
  double t = 0.0, y = g0;
  double k1 = z(y);
  double h = k1 > 0.0 ? std::min(t_max, 1e-3 * std::max(y, 1e-300) / k1) : t_max;
  const double rtol = kGronwallRelTol;
  for (int guard = 0; guard < 10'000'000 && t < t_max; ++guard) {
    h = std::min(h, t_max - t);
    const double k2 = z(y + h * a21 * k1);
    const double k3 = z(y + h * (a31 * k1 + a32 * k2));
    const double k4 = z(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const double k5 = z(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const double k6 = z(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const double y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double k7 = z(y_new);
    const double err_abs = std::abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
    const double scale = rtol * std::max(std::abs(y), std::abs(y_new)) + 1e-300;
    const double err = err_abs / scale;
    if (!std::isfinite(y_new) || !std::isfinite(err)) {
      h *= 0.2;
      continue;
    }
    if (err <= 1.0) {
      t = (t_max - t <= h) ? t_max : t + h;
      y = y_new;
      k1 = k7;
      sol.times_.push_back(t);
      sol.values_.push_back(y);
      if (y > kBlowupValue) {
        const double crossing = sol.inverse(kBlowupValue);
        sol.blowup_ = crossing + tail_time(law, kBlowupValue);
        break;
      }
    }
    const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
    if (h < 1e-15 * std::max(1.0, t)) {
      // fast laws reach the resolution of t before kBlowupValue; the rest of the escape is the tail
      const double tail = tail_time(law, y);
      if (!(tail <= 1e-12 * std::max(1.0, t))) {
        throw OutOfDomain(fmt::format("step size underflow at t = {}", t));
      }
      sol.blowup_ = t + tail;
      break;
    }
  }
  return sol;
}

GronwallSolution gronwall_solve(const GronwallSetup& setup) {
  setup.validate();
  return gronwall_solve(GrowthLaw::curvature_majorant(setup.coeff_c), setup.g0, setup.t_max_query);
}

double doubling_time(const GrowthLaw& law, double g0, double t_max, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw BadParams(fmt::format("s: {} must be positive", s));
  const GronwallSolution sol = gronwall_solve(law, s < g0 ? s : g0, t_max);
  if (!(2.0 * s <= sol.max_value())) {
    throw OutOfDomain(fmt::format("2s = {} is beyond the solved range (max g = {})", 2.0 * s, sol.max_value()));
  }
  const double theta = sol.inverse(2.0 * s) - sol.inverse(s);
  if (!(theta > 0.0)) throw OutOfDomain(fmt::format("doubling time at s = {} is not positive", s));
  return theta;
}

double doubling_time(const GronwallSetup& setup, double s) {
  setup.validate();
  return doubling_time(GrowthLaw::curvature_majorant(setup.coeff_c), setup.g0, setup.t_max_query, s);
}

}  // namespace elastic_flow
