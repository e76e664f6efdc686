#pragma once

// Fixtures and independent oracles shared by the unit and acceptance tests.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mcsel/models.hpp"
#include "mcsel/numerics.hpp"
#include "mcsel/random.hpp"

namespace mcsel::test {

inline const std::vector<double> kReferenceCoefficients{0.1, 0.1, -0.3, 0.4};

inline Dataset reference_dataset(std::size_t N, std::uint64_t seed) {
  RandomStream rng(seed);
  return generate_data(rng, kReferenceCoefficients, 1.0, N);
}

/// ln p(y | theta) = c everywhere.
class ConstantSurface final : public LikelihoodSurface {
 public:
  ConstantSurface(std::size_t dim, double c) : dim_(dim), c_(c) {}
  std::size_t dim() const noexcept override { return dim_; }
  double log_likelihood(std::span<const double>) const override { return c_; }

 private:
  std::size_t dim_;
  double c_;
};

/// -(1/2) theta' J theta around `center`, peak value `top`.
class QuadraticSurface final : public LikelihoodSurface {
 public:
  QuadraticSurface(std::vector<double> center, SymMatrix metric, double top)
      : center_(std::move(center)), metric_(std::move(metric)), top_(top) {}
  std::size_t dim() const noexcept override { return center_.size(); }
  double log_likelihood(std::span<const double> theta) const override {
    std::vector<double> d(center_.size());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = theta[k] - center_[k];
    return top_ - 0.5 * metric_.quadratic_form(d);
  }

 private:
  std::vector<double> center_;
  SymMatrix metric_;
  double top_;
};

inline FittedModel constant_model(std::vector<double> center, SymMatrix fim, double c) {
  const auto d = center.size();
  return make_fitted_model(static_cast<int>(d), std::move(center), std::move(fim), c,
                           std::make_shared<ConstantSurface>(d, c));
}

inline FittedModel quadratic_model(std::vector<double> center, SymMatrix fim, double top = 0.0) {
  auto surface = std::make_shared<QuadraticSurface>(center, fim, top);
  const auto d = center.size();
  return make_fitted_model(static_cast<int>(d), std::move(center), std::move(fim), top,
                           std::move(surface));
}

/// Trapezoid rule with n intervals.
template <typename F>
double trapezoid(F&& f, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  double sum = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i < n; ++i) sum += f(a + h * static_cast<double>(i));
  return sum * h;
}

/// One Richardson step on the 2000-point trapezoid (halved grid as partner);
/// the O(h^2) term cancels, leaving O(h^4).
template <typename F>
double trapezoid_2000(F&& f, double a, double b) {
  const double fine = trapezoid(f, a, b, 2000);
  const double coarse = trapezoid(f, a, b, 1000);
  return (4.0 * fine - coarse) / 3.0;
}

/// Expected value of exp(ln p_hat - max_loglik) for the intercept-only model,
/// by quadrature of the direct likelihood over C (= B in one dimension).
struct InterceptOracle {
  double uniform = 0.0;    // UE, UEG and UB
  double truncated = 0.0;  // GE
};

inline InterceptOracle intercept_oracle(const Dataset& data, const FittedModel& model,
                                        double mu) {
  const auto x = polynomial_regressors(data.size(), 1);
  const double c = model.theta_hat[0];
  const double J = model.fim(0, 0);
  const double r = std::sqrt(mu / J);
  const double rho = std::erf(std::sqrt(mu / 2.0));
  auto f = [&](double th) {
    const double v[1] = {th};
    return std::exp(log_likelihood(data, x, v) - model.max_loglik);
  };
  auto fg = [&](double th) {
    const double g = std::sqrt(J / (2.0 * std::numbers::pi)) * std::exp(-0.5 * J * (th - c) * (th - c));
    return f(th) * g / rho;
  };
  return {trapezoid_2000(f, c - r, c + r) / (2.0 * r), trapezoid_2000(fg, c - r, c + r)};
}

inline double sample_variance(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

inline double sample_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("mcsel_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace mcsel::test
