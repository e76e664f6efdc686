#include "mcsel/models.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mcsel/error.hpp"

namespace mcsel {

namespace {

class LinearGaussianSurface final : public LikelihoodSurface {
 public:
  LinearGaussianSurface(std::vector<double> theta_hat, CholeskyFactor fim_factor,
                        double max_loglik)
      : theta_hat_(std::move(theta_hat)),
        fim_factor_(std::move(fim_factor)),
        max_loglik_(max_loglik) {}

  std::size_t dim() const noexcept override { return theta_hat_.size(); }

  double log_likelihood(std::span<const double> theta) const override {
    if (theta.size() != theta_hat_.size()) {
      throw Error(Errc::kDimensionMismatch, "theta has the wrong dimension");
    }
    std::vector<double> delta(theta.size());
    for (std::size_t k = 0; k < delta.size(); ++k) delta[k] = theta[k] - theta_hat_[k];
    return max_loglik_ - 0.5 * fim_factor_.quadratic_form(delta);
  }

 private:
  std::vector<double> theta_hat_;
  CholeskyFactor fim_factor_;
  double max_loglik_;
};

}  // namespace

Dataset::Dataset(std::vector<double> y, double noise_variance)
    : y_(std::move(y)), noise_variance_(noise_variance) {
  if (y_.size() < 2) throw Error(Errc::kInvalidArgument, "dataset needs N >= 2 samples");
  if (!(noise_variance_ > 0.0) || !std::isfinite(noise_variance_)) {
    throw Error(Errc::kInvalidArgument, "noise variance sigma2 must be positive");
  }
  for (double v : y_) {
    if (!std::isfinite(v)) throw Error(Errc::kInvalidArgument, "dataset contains non-finite y");
  }
}

RegressorMatrix::RegressorMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

RegressorMatrix polynomial_regressors(std::size_t N, std::size_t order) {
  if (N < 2) throw Error(Errc::kInvalidArgument, "polynomial_regressors requires N >= 2");
  if (order < 1) throw Error(Errc::kInvalidArgument, "polynomial_regressors requires order >= 1");
  RegressorMatrix phi(N, order);
  for (std::size_t t = 0; t < N; ++t) {
    const double base = -5.0 + 10.0 * static_cast<double>(t) / static_cast<double>(N - 1);
    double power = 1.0;
    for (std::size_t i = 0; i < order; ++i) {
      phi(t, i) = power;
      power *= base;
    }
  }
  return phi;
}

double log_likelihood(const Dataset& data, const RegressorMatrix& regressors,
                      std::span<const double> theta) {
  if (regressors.rows() != data.size() || regressors.cols() != theta.size()) {
    throw Error(Errc::kDimensionMismatch,
                "log_likelihood: data, regressors and theta dimensions disagree");
  }
  const auto y = data.y();
  double rss = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const auto phi = regressors.row(t);
    double fitted = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) fitted += phi[i] * theta[i];
    const double r = y[t] - fitted;
    rss += r * r;
  }
  const double s2 = data.noise_variance();
  const double n = static_cast<double>(y.size());
  return -0.5 * n * std::log(2.0 * std::numbers::pi * s2) - rss / (2.0 * s2);
}

FittedModel make_fitted_model(int order, std::vector<double> theta_hat, SymMatrix fim,
                              double max_loglik,
                              std::shared_ptr<const LikelihoodSurface> surface) {
  if (theta_hat.size() != fim.dim() || (surface && surface->dim() != fim.dim())) {
    throw Error(Errc::kDimensionMismatch, "fitted model components disagree on dimension");
  }
  FittedModel m;
  m.order = order;
  m.dim = theta_hat.size();
  m.fim_factor = cholesky(fim);
  m.theta_hat = std::move(theta_hat);
  m.fim = std::move(fim);
  m.max_loglik = max_loglik;
  m.surface = std::move(surface);
  return m;
}

FittedModel fit(const Dataset& data, const RegressorMatrix& regressors) {
  if (regressors.rows() != data.size()) {
    throw Error(Errc::kDimensionMismatch, "fit: regressors and data lengths disagree");
  }
  const std::size_t n = regressors.cols();
  SymMatrix gram(n);
  std::vector<double> rhs(n, 0.0);
  const auto y = data.y();
  for (std::size_t t = 0; t < data.size(); ++t) {
    const auto phi = regressors.row(t);
    for (std::size_t i = 0; i < n; ++i) {
      rhs[i] += phi[i] * y[t];
      for (std::size_t j = 0; j <= i; ++j) gram(i, j) += phi[i] * phi[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) gram(j, i) = gram(i, j);
  }
  const auto theta_hat = cholesky(gram).solve(rhs);

  SymMatrix fim(n);
  const double inv_s2 = 1.0 / data.noise_variance();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) fim(i, j) = gram(i, j) * inv_s2;
  }
  const double max_ll = log_likelihood(data, regressors, theta_hat);

  FittedModel model =
      make_fitted_model(static_cast<int>(n), theta_hat, std::move(fim), max_ll, nullptr);
  model.surface =
      std::make_shared<LinearGaussianSurface>(model.theta_hat, model.fim_factor, max_ll);
  return model;
}

Dataset generate_data(RandomStream& rng, std::span<const double> coeffs, double sigma2,
                      std::size_t N) {
  if (coeffs.empty()) throw Error(Errc::kInvalidArgument, "generate_data needs coefficients");
  if (!(sigma2 > 0.0)) throw Error(Errc::kInvalidArgument, "sigma2 must be positive");
  const auto phi = polynomial_regressors(N, coeffs.size());
  const double sigma = std::sqrt(sigma2);
  std::vector<double> y(N);
  for (std::size_t t = 0; t < N; ++t) {
    const auto row = phi.row(t);
    double mean = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) mean += row[i] * coeffs[i];
    y[t] = mean + sigma * rng.normal();
  }
  return Dataset(std::move(y), sigma2);
}

std::size_t PolynomialFamily::dim(int order) const {
  if (order < 1) throw Error(Errc::kInvalidArgument, "polynomial order must be >= 1");
  return static_cast<std::size_t>(order);
}

double PolynomialFamily::log_likelihood(const Dataset& data, int order,
                                        std::span<const double> theta) const {
  return mcsel::log_likelihood(data, polynomial_regressors(data.size(), dim(order)), theta);
}

FittedModel PolynomialFamily::fit(const Dataset& data, int order) const {
  return mcsel::fit(data, polynomial_regressors(data.size(), dim(order)));
}

Dataset PolynomialFamily::generate(RandomStream& rng, std::span<const double> coeffs,
                                   double sigma2, std::size_t N) const {
  return generate_data(rng, coeffs, sigma2, N);
}

}  // namespace mcsel
