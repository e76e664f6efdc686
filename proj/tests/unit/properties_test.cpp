// Randomized invariants across modules.

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mcsel/estimators.hpp"
#include "mcsel/sampling.hpp"
#include "mcsel/selection.hpp"
#include "test_support.hpp"

namespace mcsel {
namespace {

SymMatrix random_spd(RandomStream& rng, std::size_t d) {
  // A A' + d I
  std::vector<double> a(d * d);
  for (double& v : a) v = rng.normal();
  SymMatrix m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double s = i == j ? static_cast<double>(d) : 0.0;
      for (std::size_t k = 0; k < d; ++k) s += a[i * d + k] * a[j * d + k];
      m(i, j) = s;
    }
  return m;
}

TEST(Property, CholeskyReconstructs) {
  RandomStream rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 8;
    const auto m = random_spd(rng, d);
    const auto r = cholesky(m).reconstruct();
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        ASSERT_NEAR(r(i, j), m(i, j), 1e-12 * std::max(1.0, std::abs(m(i, j))));
  }
}

TEST(Property, LogSumExpShiftInvariant) {
  RandomStream rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + trial % 20);
    for (double& x : v) x = rng.uniform(-50.0, 50.0);
    const double base = log_sum_exp(v);
    const double shift = rng.uniform(-1000.0, 1000.0);
    for (double& x : v) x += shift;
    ASSERT_NEAR(log_sum_exp(v), base + shift, 1e-9 * std::max(1.0, std::abs(base + shift)));
    ASSERT_GE(log_sum_exp(v), *std::max_element(v.begin(), v.end()));
  }
}

TEST(Property, Chi2CdfMonotoneAndBounded) {
  for (int d = 1; d <= 12; ++d) {
    double prev = 0.0;
    for (double x = 0.0; x <= 60.0; x += 0.25) {
      const double p = chi2_cdf(d, x);
      ASSERT_GE(p, prev);
      ASSERT_LE(p, 1.0);
      prev = p;
    }
  }
}

TEST(Property, EllipsoidInsideBoundingBox) {
  RandomStream rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 1 + trial % 4;
    std::vector<double> c(d);
    for (double& v : c) v = rng.uniform(-3.0, 3.0);
    const auto e = make_ellipsoid(c, random_spd(rng, d), rng.uniform(0.5, 20.0));
    const auto box = bounding_box(e);
    const auto batch = sample_uniform_ellipsoid(rng, e, 200);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      ASSERT_TRUE(box.contains(batch.point(i)));
      ASSERT_TRUE(contains(e, batch.point(i)));
    }
    ASSERT_LE(ellipsoid_log_volume(e), box.log_volume() + 1e-12);
  }
}

TEST(Property, PartitionCellsLocatePoints) {
  RandomStream rng(4);
  const Box b{{-1.0, 0.0, 2.0}, {1.0, 3.0, 2.5}};
  const auto p = partition(b, 4);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> x(3);
    for (std::size_t k = 0; k < 3; ++k) x[k] = rng.uniform(b.lo[k], b.hi[k]);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < p.size(); ++k) hits += p.cell(k).contains(x);
    ASSERT_GE(hits, 1u);
  }
}

TEST(Property, EstimatesBoundedByMaxLoglik) {
  RandomStream rng(5);
  const PolynomialFamily fam;
  for (int trial = 0; trial < 300; ++trial) {
    const int order = 1 + trial % 5;
    const std::size_t N = 8 + static_cast<std::size_t>(rng.uniform() * 80);
    std::vector<double> coeffs(order);
    for (double& c : coeffs) c = rng.uniform(-1.0, 1.0);
    const Dataset data = generate_data(rng, coeffs, std::exp(rng.uniform(-4.0, 4.0)), N);
    const auto model = fam.fit(data, order);
    EstimatorSettings s;
    s.samples = 2 + static_cast<std::size_t>(rng.uniform() * 40);
    s.mu = rng.uniform(0.5, 25.0);
    s.strat_segments = 1 + trial % 3;
    const auto kind = static_cast<EstimatorKind>(trial % 5);
    const auto est = estimate_marginal(kind, rng, model, s);
    ASSERT_LE(est.log_value, model.max_loglik + 1e-9) << to_string(kind);
    ASSERT_GE(est.mc_std_error_log, 0.0);
  }
}

TEST(Property, SelectionAttainsOptimum) {
  RandomStream rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 7;
    std::vector<MarginalEstimate> est;
    std::vector<CriterionScore> crit;
    for (std::size_t k = 0; k < n; ++k) {
      const double v = std::round(rng.uniform(-5.0, 5.0));  // ties are common
      est.push_back({v, 0.0, 10, EstimatorKind::kUE});
      crit.push_back({v, 2.0, CriterionKind::kBIC});
    }
    const auto a = select_map(est);
    const auto b = select_criterion(crit);
    ASSERT_EQ(a.scores.size(), n);
    for (std::size_t k = 0; k < n; ++k) {
      ASSERT_LE(a.scores[k], a.scores[a.selected_order - 1]);
      ASSERT_GE(b.scores[k], b.scores[b.selected_order - 1]);
      if (k + 1 < static_cast<std::size_t>(a.selected_order))
        ASSERT_LT(a.scores[k], a.scores[a.selected_order - 1]);
      if (k + 1 < static_cast<std::size_t>(b.selected_order))
        ASSERT_GT(b.scores[k], b.scores[b.selected_order - 1]);
    }
  }
}

}  // namespace
}  // namespace mcsel
