#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "elastic_flow/curve.hpp"

namespace elastic_flow {

/// Exponent triple (n, j, p) of the general interpolation inequality.
struct GnTriple {
  int n_ord;
  int j_ord;
  double p;
};

/// Triples checked by the calibration and the property tests.
std::span<const GnTriple> gn_triples();

/// Values of epsilon over which the growth-law constant is calibrated.
std::span<const double> calibration_epsilons();

inline constexpr std::size_t kCalibrationCorpusSize = 200;
inline constexpr double kCalibrationSafetyFactor = 2.0;

/// Seeded random curves, half of them graphs y = sum a_m sin(m pi x) over a
/// chord and half given by a curvature profile sum b_m sin(m pi s / L), each
/// randomly rotated and translated. Every curve has zero curvature at both ends.
std::vector<DiscreteCurve> random_curve_corpus(std::size_t count, std::uint64_t seed);

/// Smallest constants for which each inequality holds on a corpus, with u = kappa.
struct CalibratedConstants {
  double gn_u6 = 0.0;
  double gn_u4 = 0.0;
  std::vector<double> gn_general;  ///< one per gn_triples() entry, C = B
  double z_coeff = 0.0;            ///< d/dt int kappa^2 <= C (p^5 + p^3 + p^2)

  CalibratedConstants scaled(double factor) const;
};

CalibratedConstants calibrate(std::span<const DiscreteCurve> corpus);

/// Calibration on the standard corpus for `seed`, times the safety factor.
CalibratedConstants standard_constants(std::uint64_t seed);

}  // namespace elastic_flow
