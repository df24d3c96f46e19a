#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace elastic_flow {

class OutOfDomain : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Right-hand side Z of the scalar growth law g' = Z(g), with Z'.
struct GrowthLaw {
  std::string name;
  std::function<double(double)> z;
  std::function<double(double)> dz;

  /// Z(p) = C p^5 + C p^3 + C p^2, the majorant of d/dt int kappa^2 ds.
  static GrowthLaw curvature_majorant(double c);
  static GrowthLaw linear();     ///< Z(p) = p
  static GrowthLaw quadratic();  ///< Z(p) = p^2
};

struct GronwallSetup {
  double g0 = 1.0;
  double coeff_c = 1.0;
  double t_max_query = 1.0;

  void validate() const;
};

/// Values above this are treated as blown up.
inline constexpr double kBlowupValue = 1e12;
inline constexpr double kGronwallRelTol = 1e-10;

/// Dense solution of g' = Z(g), g(0) = g0 on [0, covered_time()].
///
/// Stepping uses the Dormand-Prince 5(4) pair; between steps the solution is
/// the quintic Hermite interpolant of (g, Z(g), Z'(g) Z(g)) at both ends.
class GronwallSolution {
 public:
  double value(double t) const;
  double derivative(double t) const;
  /// g^{-1}(value) by bisection to 1e-12 on the dense output; requires
  /// g0 <= value <= max_value() and Z > 0.
  double inverse(double value) const;

  double covered_time() const { return times_.back(); }
  double max_value() const { return values_.back(); }
  double initial_value() const { return values_.front(); }
  /// Time g crosses kBlowupValue plus int_{kBlowupValue}^inf dp / Z(p);
  /// nullopt when g stayed finite up to the query horizon.
  std::optional<double> blowup_time() const { return blowup_; }

  std::span<const double> times() const { return times_; }
  std::span<const double> values() const { return values_; }
  const GrowthLaw& law() const { return law_; }

 private:
  friend GronwallSolution gronwall_solve(const GrowthLaw&, double, double);
  std::size_t interval(double t) const;

  GrowthLaw law_;
  std::vector<double> times_;
  std::vector<double> values_;
  std::optional<double> blowup_;
};

GronwallSolution gronwall_solve(const GrowthLaw& law, double g0, double t_max);
GronwallSolution gronwall_solve(const GronwallSetup& setup);

/// Theta(s) = g^{-1}(2s) - g^{-1}(s). For s below g0 the law is re-solved
/// from s, which gives the same Theta since it only depends on Z.
/// Throws OutOfDomain if 2s is beyond the solved range.
double doubling_time(const GrowthLaw& law, double g0, double t_max, double s);
double doubling_time(const GronwallSetup& setup, double s);

}  // namespace elastic_flow
