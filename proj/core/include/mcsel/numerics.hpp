#pragma once

// Small dense linear algebra, special functions and log-domain helpers.
//
// Matrices here are tiny (model dimensions rarely exceed a dozen), so every
// routine is a plain unblocked loop over row-major storage.

#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

namespace mcsel {

/// Dense symmetric d x d matrix stored row-major.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim);
  /// Builds from nested rows; throws kDimensionMismatch if not square.
  SymMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(std::span<const double> diag);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }

  /// Largest |m(i,j) - m(j,i)|.
  double asymmetry() const noexcept;

  /// y = m x
  std::vector<double> multiply(std::span<const double> x) const;
  /// x' m x
  double quadratic_form(std::span<const double> x) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Lower-triangular Cholesky factor L of an SPD matrix m = L L'.
class CholeskyFactor {
 public:
  CholeskyFactor() = default;

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return lower_[i * dim_ + j]; }

  /// Solves m x = b.
  std::vector<double> solve(std::span<const double> b) const;
  /// x = L^{-T} z, i.e. a draw with covariance m^{-1} when z is standard normal.
  std::vector<double> solve_upper(std::span<const double> z) const;
  /// ||L' x||^2 == x' m x, always >= 0.
  double quadratic_form(std::span<const double> x) const;
  /// ln|m| = 2 sum ln L_kk
  double log_det() const noexcept;
  /// (m^{-1})_kk from one pair of triangular solves.
  double inverse_diagonal(std::size_t k) const;
  /// L L'
  SymMatrix reconstruct() const;

 private:
  friend CholeskyFactor cholesky(const SymMatrix& m);
  std::size_t dim_ = 0;
  std::vector<double> lower_;
};

/// Throws kNotPositiveDefinite on a non-positive pivot and kInvalidArgument
/// when m deviates from symmetry by more than 1e-12.
CholeskyFactor cholesky(const SymMatrix& m);

double log_det(const SymMatrix& m);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// P(chi^2(d) <= x).
double chi2_cdf(int d, double x);

/// Volume of the unit ball in d dimensions.
double unit_ball_volume(int d);
double log_unit_ball_volume(int d);

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// ln sum exp(v_i), shifted by the maximum. Throws kEmptyInput on empty input.
double log_sum_exp(std::span<const double> values);

/// ln((1/n) sum exp(v_i)). Exactly v when every entry equals v.
double log_mean_exp(std::span<const double> values);

/// Log-domain representation of a nonnegative quantity.
class LogValue {
 public:
  constexpr LogValue() noexcept = default;

  static constexpr LogValue zero() noexcept { return LogValue(); }
  static constexpr LogValue from_log(double log_value) noexcept {
    LogValue v;
    v.log_ = log_value;
    return v;
  }
  static LogValue from_linear(double x);

  constexpr double log() const noexcept { return log_; }
  constexpr bool is_zero() const noexcept { return log_ == kLogZero; }

  LogValue& operator+=(LogValue other) noexcept;
  LogValue& operator*=(LogValue other) noexcept;

  friend LogValue operator+(LogValue a, LogValue b) noexcept { return a += b; }
  friend LogValue operator*(LogValue a, LogValue b) noexcept { return a *= b; }
  friend constexpr bool operator==(LogValue a, LogValue b) noexcept { return a.log_ == b.log_; }

 private:
  double log_ = kLogZero;
};

}  // namespace mcsel
