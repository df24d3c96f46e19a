#include "elastic_flow/banded.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace elastic_flow {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t lower, std::size_t upper)
    : n_(n), kl_(lower), ku_(upper), width_(2 * lower + upper + 1), data_(n * width_, 0.0) {}

bool BandedMatrix::in_band(std::size_t i, std::size_t j) const {
  return i < n_ && j < n_ && j + kl_ >= i && j <= i + ku_ + kl_;
}

double& BandedMatrix::at(std::size_t i, std::size_t j) {
  if (!in_band(i, j)) throw std::out_of_range(fmt::format("({}, {}) outside band", i, j));
  return data_[i * width_ + (j + kl_ - i)];
}

double BandedMatrix::at(std::size_t i, std::size_t j) const {
  if (!in_band(i, j)) return 0.0;
  return data_[i * width_ + (j + kl_ - i)];
}

std::vector<double> BandedMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i >= kl_ ? i - kl_ : 0;
    const std::size_t hi = std::min(n_ - 1, i + ku_ + kl_);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += at(i, j) * x[j];
    y[i] = sum;
  }
  return y;
}

double BandedMatrix::norm_inf() const {
  double m = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i >= kl_ ? i - kl_ : 0;
    const std::size_t hi = std::min(n_ - 1, i + ku_ + kl_);
    double row = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) row += std::abs(at(i, j));
    m = std::max(m, row);
  }
  return m;
}

BandedLU::BandedLU(BandedMatrix a) : lu_(std::move(a)), pivots_(lu_.size()) {
  const std::size_t n = lu_.n_;
  const std::size_t kl = lu_.kl_;
  const std::size_t ku = lu_.ku_;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t last_row = std::min(n - 1, k + kl);
    const std::size_t last_col = std::min(n - 1, k + kl + ku);
    std::size_t p = k;
    double best = std::abs(lu_.at(k, k));
    for (std::size_t r = k + 1; r <= last_row; ++r) {
      if (std::abs(lu_.at(r, k)) > best) {
        best = std::abs(lu_.at(r, k));
        p = r;
      }
    }
    if (best == 0.0) throw SingularMatrix(fmt::format("zero pivot in column {}", k));
    pivots_[k] = p;
    if (p != k) {
      for (std::size_t c = k; c <= last_col; ++c) std::swap(lu_.at(k, c), lu_.at(p, c));
    }
    const double pivot = lu_.at(k, k);
    for (std::size_t r = k + 1; r <= last_row; ++r) {
      const double l = lu_.at(r, k) / pivot;
      lu_.at(r, k) = l;
      if (l == 0.0) continue;
      for (std::size_t c = k + 1; c <= last_col; ++c) lu_.at(r, c) -= l * lu_.at(k, c);
    }
  }
}

std::vector<double> BandedLU::solve(std::span<const double> rhs) const {
  const std::size_t n = lu_.n_;
  const std::size_t kl = lu_.kl_;
  const std::size_t ku = lu_.ku_;
  std::vector<double> b(rhs.begin(), rhs.end());
  for (std::size_t k = 0; k < n; ++k) {
    std::swap(b[k], b[pivots_[k]]);
    const std::size_t last_row = std::min(n - 1, k + kl);
    for (std::size_t r = k + 1; r <= last_row; ++r) b[r] -= lu_.at(r, k) * b[k];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    const std::size_t last_col = std::min(n - 1, ii + kl + ku);
    double sum = b[ii];
    for (std::size_t c = ii + 1; c <= last_col; ++c) sum -= lu_.at(ii, c) * b[c];
    b[ii] = sum / lu_.at(ii, ii);
  }
  return b;
}

std::vector<double> BandedLU::solve_refined(const BandedMatrix& original,
                                            std::span<const double> rhs) const {
  std::vector<double> x = solve(rhs);
  const std::vector<double> ax = original.multiply(x);
  std::vector<double> residual(rhs.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) residual[i] = rhs[i] - ax[i];
  const std::vector<double> correction = solve(residual);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += correction[i];
  return x;
}

double backward_error(const BandedMatrix& a, std::span<const double> x,
                      std::span<const double> b) {
  const std::vector<double> ax = a.multiply(x);
  double r = 0.0, xn = 0.0, bn = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    r = std::max(r, std::abs(b[i] - ax[i]));
    xn = std::max(xn, std::abs(x[i]));
    bn = std::max(bn, std::abs(b[i]));
  }
  const double scale = a.norm_inf() * xn + bn;
  return scale > 0.0 ? r / scale : 0.0;
}

}  // namespace elastic_flow
