#pragma once

// Candidate model families: likelihood evaluation, ML fitting with the sample
// Fisher information, and data generation. Only Gaussian linear regression
// (polynomial trends) is provided, but estimators see nothing beyond
// FittedModel, so other families slot in behind ModelFamily.

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "mcsel/numerics.hpp"
#include "mcsel/random.hpp"

namespace mcsel {

/// Observations y(1..N) with known noise variance.
class Dataset {
 public:
  /// Throws kInvalidArgument unless N >= 2 and noise_variance > 0.
  Dataset(std::vector<double> y, double noise_variance);

  std::span<const double> y() const noexcept { return y_; }
  std::size_t size() const noexcept { return y_.size(); }
  double noise_variance() const noexcept { return noise_variance_; }

 private:
  std::vector<double> y_;
  double noise_variance_;
};

/// N x n design matrix, row t holds phi(t)'.
class RegressorMatrix {
 public:
  RegressorMatrix(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t t, std::size_t i) const { return data_[t * cols_ + i]; }
  double& operator()(std::size_t t, std::size_t i) { return data_[t * cols_ + i]; }
  std::span<const double> row(std::size_t t) const {
    return {data_.data() + t * cols_, cols_};
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// x_i(t) = [-5 + 10 (t-1)/(N-1)]^(i-1), t = 1..N, i = 1..order.
RegressorMatrix polynomial_regressors(std::size_t N, std::size_t order);

/// ln p(y | theta) = -(N/2) ln(2 pi sigma^2) - RSS(theta) / (2 sigma^2).
double log_likelihood(const Dataset& data, const RegressorMatrix& regressors,
                      std::span<const double> theta);

/// theta -> ln p(y | M, theta) for one fitted candidate.
class LikelihoodSurface {
 public:
  virtual ~LikelihoodSurface() = default;
  virtual std::size_t dim() const noexcept = 0;
  virtual double log_likelihood(std::span<const double> theta) const = 0;
};

/// A candidate after ML fitting. Immutable once built.
struct FittedModel {
  int order = 0;
  std::size_t dim = 0;
  std::vector<double> theta_hat;
  SymMatrix fim;
  CholeskyFactor fim_factor;
  double max_loglik = 0.0;
  std::shared_ptr<const LikelihoodSurface> surface;

  double log_likelihood(std::span<const double> theta) const {
    return surface->log_likelihood(theta);
  }
};

/// Assembles a FittedModel, factoring the FIM. Throws kNotPositiveDefinite or
/// kDimensionMismatch.
FittedModel make_fitted_model(int order, std::vector<double> theta_hat, SymMatrix fim,
                              double max_loglik,
                              std::shared_ptr<const LikelihoodSurface> surface);

/// Least-squares fit via the normal equations; J = (1/sigma^2) sum phi phi'.
/// The returned surface evaluates
///   ln p(y | theta) = max_loglik - (theta - theta_hat)' J (theta - theta_hat) / 2
/// which is exact for Gaussian linear regression and never exceeds max_loglik.
FittedModel fit(const Dataset& data, const RegressorMatrix& regressors);

/// y(t) = phi(t)' coeffs + e(t), e ~ N(0, sigma2) i.i.d.
Dataset generate_data(RandomStream& rng, std::span<const double> coeffs, double sigma2,
                      std::size_t N);

class ModelFamily {
 public:
  virtual ~ModelFamily() = default;

  virtual std::string_view name() const noexcept = 0;
  virtual std::size_t dim(int order) const = 0;
  virtual double log_likelihood(const Dataset& data, int order,
                                std::span<const double> theta) const = 0;
  virtual FittedModel fit(const Dataset& data, int order) const = 0;
  /// Generates N samples from the member whose parameters are `coeffs`.
  virtual Dataset generate(RandomStream& rng, std::span<const double> coeffs, double sigma2,
                           std::size_t N) const = 0;
};

class PolynomialFamily final : public ModelFamily {
 public:
  std::string_view name() const noexcept override { return "polynomial"; }
  std::size_t dim(int order) const override;
  double log_likelihood(const Dataset& data, int order,
                        std::span<const double> theta) const override;
  FittedModel fit(const Dataset& data, int order) const override;
  Dataset generate(RandomStream& rng, std::span<const double> coeffs, double sigma2,
                   std::size_t N) const override;
};

}  // namespace mcsel
