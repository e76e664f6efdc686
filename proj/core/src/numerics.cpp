#include "mcsel/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mcsel/error.hpp"

namespace mcsel {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kGammaRelTol = 1e-12;
constexpr int kGammaMaxIter = 500;

double log_gamma(double a) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(a, &sign);
#else
  return std::lgamma(a);
#endif
}

// sum_{n>=0} x^n / (a (a+1) ... (a+n)), scaled by x^a e^-x / Gamma(a).
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < kGammaMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kGammaRelTol) {
      return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
    }
  }
  throw Error(Errc::kNumericalFailure, "incomplete gamma series did not converge");
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_q_continued_fraction(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kGammaMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kGammaRelTol) {
      return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
    }
  }
  throw Error(Errc::kNumericalFailure, "incomplete gamma continued fraction did not converge");
}

}  // namespace

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kNotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kAcceptanceTooLow: return "AcceptanceTooLow";
    case Errc::kPartitionTooLarge: return "PartitionTooLarge";
    case Errc::kEmptyCandidates: return "EmptyCandidates";
    case Errc::kFileNotFound: return "FileNotFound";
    case Errc::kParseError: return "ParseError";
    case Errc::kConfigError: return "ConfigError";
    case Errc::kNumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : SymMatrix(rows.size()) {
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != dim_) {
      throw Error(Errc::kDimensionMismatch, "SymMatrix rows must form a square matrix");
    }
    std::size_t j = 0;
    for (double v : row) (*this)(i, j++) = v;
    ++i;
  }
}

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

double SymMatrix::asymmetry() const noexcept {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i + 1; j < dim_; ++j) {
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
    }
  }
  return worst;
}

std::vector<double> SymMatrix::multiply(std::span<const double> x) const {
  if (x.size() != dim_) throw Error(Errc::kDimensionMismatch, "matrix-vector size mismatch");
  std::vector<double> y(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) acc += (*this)(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

double SymMatrix::quadratic_form(std::span<const double> x) const {
  const auto mx = multiply(x);
  double acc = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) acc += x[i] * mx[i];
  return acc;
}

// ---------------------------------------------------------------------------
// Cholesky

constexpr double kRankTolerance = 1e-12;

CholeskyFactor cholesky(const SymMatrix& m) {
  const std::size_t d = m.dim();
  if (d == 0) throw Error(Errc::kInvalidArgument, "cholesky of an empty matrix");
  if (m.asymmetry() > kSymmetryTolerance) {
    throw Error(Errc::kInvalidArgument, "cholesky requires a symmetric matrix");
  }
  CholeskyFactor f;
  f.dim_ = d;
  f.lower_.assign(d * d, 0.0);
  auto L = [&](std::size_t i, std::size_t j) -> double& { return f.lower_[i * d + j]; };
  for (std::size_t j = 0; j < d; ++j) {
    double pivot = m(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= L(j, k) * L(j, k);
    // A pivot that is a rounding residue of the diagonal means the column is
    // (numerically) in the span of the previous ones.
    if (!(pivot > kRankTolerance * m(j, j)) || !std::isfinite(pivot)) {
      throw Error(Errc::kNotPositiveDefinite,
                  "matrix is not positive definite (pivot " + std::to_string(j) + ")");
    }
    const double diag = std::sqrt(pivot);
    L(j, j) = diag;
    for (std::size_t i = j + 1; i < d; ++i) {
      double acc = m(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= L(i, k) * L(j, k);
      L(i, j) = acc / diag;
    }
  }
  return f;
}

std::vector<double> CholeskyFactor::solve(std::span<const double> b) const {
  if (b.size() != dim_) throw Error(Errc::kDimensionMismatch, "cholesky solve size mismatch");
  std::vector<double> x(b.begin(), b.end());
  // L w = b
  for (std::size_t i = 0; i < dim_; ++i) {
    double acc = x[i];
    for (std::size_t k = 0; k < i; ++k) acc -= (*this)(i, k) * x[k];
    x[i] = acc / (*this)(i, i);
  }
  return solve_upper(x);
}

std::vector<double> CholeskyFactor::solve_upper(std::span<const double> z) const {
  if (z.size() != dim_) throw Error(Errc::kDimensionMismatch, "cholesky solve size mismatch");
  std::vector<double> x(z.begin(), z.end());
  for (std::size_t ii = dim_; ii-- > 0;) {
    double acc = x[ii];
    for (std::size_t k = ii + 1; k < dim_; ++k) acc -= (*this)(k, ii) * x[k];
    x[ii] = acc / (*this)(ii, ii);
  }
  return x;
}

double CholeskyFactor::quadratic_form(std::span<const double> x) const {
  if (x.size() != dim_) throw Error(Errc::kDimensionMismatch, "quadratic form size mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    double v = 0.0;
    for (std::size_t i = j; i < dim_; ++i) v += (*this)(i, j) * x[i];
    acc += v * v;
  }
  return acc;
}

double CholeskyFactor::log_det() const noexcept {
  double acc = 0.0;
  for (std::size_t k = 0; k < dim_; ++k) acc += std::log((*this)(k, k));
  return 2.0 * acc;
}

double CholeskyFactor::inverse_diagonal(std::size_t k) const {
  if (k >= dim_) throw Error(Errc::kDimensionMismatch, "inverse_diagonal index out of range");
  std::vector<double> e(dim_, 0.0);
  e[k] = 1.0;
  return solve(e)[k];
}

SymMatrix CholeskyFactor::reconstruct() const {
  SymMatrix m(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k <= j; ++k) acc += (*this)(i, k) * (*this)(j, k);
      m(i, j) = acc;
      m(j, i) = acc;
    }
  }
  return m;
}

double log_det(const SymMatrix& m) { return cholesky(m).log_det(); }

// ---------------------------------------------------------------------------
// Special functions

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw Error(Errc::kInvalidArgument, "regularized_gamma_p requires a > 0 and x >= 0");
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return std::clamp(gamma_p_series(a, x), 0.0, 1.0);
  return std::clamp(1.0 - gamma_q_continued_fraction(a, x), 0.0, 1.0);
}

double chi2_cdf(int d, double x) {
  if (d < 1) throw Error(Errc::kInvalidArgument, "chi2_cdf requires d >= 1");
  return regularized_gamma_p(0.5 * d, 0.5 * x);
}

double unit_ball_volume(int d) {
  if (d < 1) throw Error(Errc::kInvalidArgument, "unit_ball_volume requires d >= 1");
  double v = (d % 2 == 1) ? 2.0 : std::numbers::pi;
  for (int k = (d % 2 == 1) ? 3 : 4; k <= d; k += 2) v *= 2.0 * std::numbers::pi / k;
  return v;
}

double log_unit_ball_volume(int d) {
  if (d < 1) throw Error(Errc::kInvalidArgument, "log_unit_ball_volume requires d >= 1");
  double lv = (d % 2 == 1) ? std::numbers::ln2 : std::log(std::numbers::pi);
  for (int k = (d % 2 == 1) ? 3 : 4; k <= d; k += 2) lv += std::log(2.0 * std::numbers::pi / k);
  return lv;
}

// ---------------------------------------------------------------------------
// Log domain

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::kEmptyInput, "log_sum_exp of an empty list");
  const double top = *std::max_element(values.begin(), values.end());
  if (top == kLogZero || std::isinf(top)) return top;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

double log_mean_exp(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::kEmptyInput, "log_mean_exp of an empty list");
  const double top = *std::max_element(values.begin(), values.end());
  if (top == kLogZero || std::isinf(top)) return top;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc / static_cast<double>(values.size()));
}

LogValue LogValue::from_linear(double x) {
  if (!(x >= 0.0)) throw Error(Errc::kInvalidArgument, "LogValue requires a nonnegative quantity");
  return from_log(x == 0.0 ? kLogZero : std::log(x));
}

LogValue& LogValue::operator+=(LogValue other) noexcept {
  if (other.is_zero()) return *this;
  if (is_zero()) {
    log_ = other.log_;
    return *this;
  }
  const double hi = std::max(log_, other.log_);
  const double lo = std::min(log_, other.log_);
  log_ = hi + std::log1p(std::exp(lo - hi));
  return *this;
}

LogValue& LogValue::operator*=(LogValue other) noexcept {
  log_ = (is_zero() || other.is_zero()) ? kLogZero : log_ + other.log_;
  return *this;
}

}  // namespace mcsel
