#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace elastic_flow {

class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Square band matrix with `lower` sub- and `upper` super-diagonals.
///
/// Storage keeps `lower` extra super-diagonals so the LU factorization with
/// partial pivoting can be done in place.
class BandedMatrix {
 public:
  BandedMatrix(std::size_t n, std::size_t lower, std::size_t upper);

  std::size_t size() const { return n_; }
  std::size_t lower() const { return kl_; }
  std::size_t upper() const { return ku_; }

  /// Entry (i, j); must lie inside the band.
  double& at(std::size_t i, std::size_t j);
  double at(std::size_t i, std::size_t j) const;
  bool in_band(std::size_t i, std::size_t j) const;

  /// y = A x
  std::vector<double> multiply(std::span<const double> x) const;
  double norm_inf() const;

 private:
  friend class BandedLU;
  std::size_t n_, kl_, ku_, width_;
  std::vector<double> data_;
};

/// LU factorization with partial pivoting of a BandedMatrix.
class BandedLU {
 public:
  explicit BandedLU(BandedMatrix a);

  std::vector<double> solve(std::span<const double> rhs) const;
  /// Solve, then apply one step of iterative refinement against `original`.
  std::vector<double> solve_refined(const BandedMatrix& original,
                                    std::span<const double> rhs) const;

 private:
  BandedMatrix lu_;
  std::vector<std::size_t> pivots_;
};

/// Normwise backward error ||b - A x||_inf / (||A||_inf ||x||_inf + ||b||_inf).
double backward_error(const BandedMatrix& a, std::span<const double> x,
                      std::span<const double> b);

}  // namespace elastic_flow
