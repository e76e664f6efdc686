#include "mcsel/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mcsel/error.hpp"

namespace mcsel {

namespace {

void require_samples(std::size_t M) {
  if (M < 2) throw Error(Errc::kInvalidArgument, "estimators need M >= 2 samples");
}

std::vector<double> log_likelihoods(const FittedModel& model, const SampleBatch& batch) {
  std::vector<double> ll(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) ll[i] = model.log_likelihood(batch.point(i));
  return ll;
}

MarginalEstimate plain_average(const std::vector<double>& ll, EstimatorKind kind) {
  const auto s = summarize_log_weights(ll);
  return {s.log_mean, s.std_error_log, ll.size(), kind};
}

}  // namespace

std::string_view to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::kUE: return "ue";
    case EstimatorKind::kUEG: return "ueg";
    case EstimatorKind::kGE: return "ge";
    case EstimatorKind::kUB: return "ub";
    case EstimatorKind::kUBStratified: return "ub-strat";
  }
  return "?";
}

std::string_view to_string(CriterionKind kind) noexcept {
  return kind == CriterionKind::kAIC ? "aic" : "bic";
}

CriterionScore penalized_criterion(double max_loglik, std::size_t d, double gamma,
                                   CriterionKind method) {
  return {-2.0 * max_loglik + gamma * static_cast<double>(d), gamma, method};
}

CriterionScore aic(const FittedModel& model) {
  return penalized_criterion(model.max_loglik, model.dim, 2.0, CriterionKind::kAIC);
}

CriterionScore bic(const FittedModel& model, std::size_t N) {
  if (N < 2) throw Error(Errc::kInvalidArgument, "bic needs N >= 2");
  return penalized_criterion(model.max_loglik, model.dim, std::log(static_cast<double>(N)),
                             CriterionKind::kBIC);
}

LogMeanSummary summarize_log_weights(std::span<const double> log_weights) {
  if (log_weights.empty()) throw Error(Errc::kEmptyInput, "no samples to average");
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  if (top == kLogZero) return {kLogZero, 0.0};
  const auto n = static_cast<double>(log_weights.size());
  std::vector<double> w(log_weights.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(log_weights[i] - top);
    sum += w[i];
  }
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : w) ss += (v - mean) * (v - mean);
  const double var = w.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {top + std::log(mean), std::sqrt(var / n) / mean};
}

double log_gaussian_proposal(const FittedModel& model, std::span<const double> theta) {
  std::vector<double> delta(model.dim);
  for (std::size_t k = 0; k < model.dim; ++k) delta[k] = theta[k] - model.theta_hat[k];
  const double d = static_cast<double>(model.dim);
  return 0.5 * model.fim_factor.log_det() - 0.5 * d * std::log(2.0 * std::numbers::pi) -
         0.5 * model.fim_factor.quadratic_form(delta);
}

MarginalEstimate ue_estimate(RandomStream& rng, const FittedModel& model, const Ellipsoid& e,
                             std::size_t M, const AcceptanceGuard& guard) {
  require_samples(M);
  const auto batch = sample_uniform_ellipsoid(rng, e, M, guard);
  return plain_average(log_likelihoods(model, batch), EstimatorKind::kUE);
}

MarginalEstimate ueg_estimate(RandomStream& rng, const FittedModel& model, const Ellipsoid& e,
                              std::size_t M, const AcceptanceGuard& guard) {
  require_samples(M);
  const auto batch = sample_truncated_gaussian(rng, model, e, M, guard);
  std::vector<double> ratio(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto theta = batch.point(i);
    ratio[i] = model.log_likelihood(theta) - log_gaussian_proposal(model, theta);
  }
  const auto s = summarize_log_weights(ratio);
  const double log_rho = std::log(chi2_cdf(static_cast<int>(e.dim()), e.radius));
  return {log_rho - ellipsoid_log_volume(e) + s.log_mean, s.std_error_log, batch.size(),
          EstimatorKind::kUEG};
}

MarginalEstimate ge_estimate(RandomStream& rng, const FittedModel& model, const Ellipsoid& e,
                             std::size_t M, const AcceptanceGuard& guard) {
  require_samples(M);
  const auto batch = sample_truncated_gaussian(rng, model, e, M, guard);
  return plain_average(log_likelihoods(model, batch), EstimatorKind::kGE);
}

MarginalEstimate ub_estimate(RandomStream& rng, const FittedModel& model, const Box& box,
                             std::size_t M) {
  require_samples(M);
  const auto batch = sample_uniform_box(rng, box, M);
  return plain_average(log_likelihoods(model, batch), EstimatorKind::kUB);
}

MarginalEstimate ub_stratified_estimate(RandomStream& rng, const FittedModel& model,
                                        const BoxPartition& partition, std::size_t M) {
  require_samples(M);
  const std::size_t cells = partition.size();
  std::vector<double> weights(cells);
  std::vector<std::size_t> counts(cells);
  std::vector<double> ll;
  for (std::size_t k = 0; k < cells; ++k) {
    weights[k] = partition.weight(k);
    counts[k] = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(weights[k] * static_cast<double>(M))));
    const auto batch = sample_uniform_box(rng, partition.cell(k), counts[k]);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      ll.push_back(model.log_likelihood(batch.point(i)));
    }
  }

  const double top = *std::max_element(ll.begin(), ll.end());
  std::vector<double> means(cells);
  std::vector<double> variances(cells, 0.0);
  bool every_cell_has_spread = true;
  std::size_t offset = 0;
  for (std::size_t k = 0; k < cells; ++k) {
    const std::size_t m = counts[k];
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += std::exp(ll[offset + i] - top);
    means[k] = sum / static_cast<double>(m);
    if (m > 1) {
      double ss = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double dv = std::exp(ll[offset + i] - top) - means[k];
        ss += dv * dv;
      }
      variances[k] = ss / static_cast<double>(m - 1);
    } else {
      every_cell_has_spread = false;
    }
    offset += m;
  }

  // Normalizing by sum(rho_k) (== 1 up to rounding) keeps a constant
  // likelihood exact for any cell count.
  double weighted = 0.0;
  double weight_sum = 0.0;
  for (std::size_t k = 0; k < cells; ++k) {
    weighted += weights[k] * means[k];
    weight_sum += weights[k];
  }
  const double combined = weighted / weight_sum;

  double var = 0.0;
  if (every_cell_has_spread) {
    for (std::size_t k = 0; k < cells; ++k) {
      const double r = weights[k] / weight_sum;
      var += r * r * variances[k] / static_cast<double>(counts[k]);
    }
  } else {
    // Single-draw cells carry no within-cell spread; fall back to the
    // unstratified variance, which bounds the stratified one.
    const auto n = static_cast<double>(ll.size());
    double sum = 0.0;
    for (double v : ll) sum += std::exp(v - top);
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : ll) {
      const double dv = std::exp(v - top) - mean;
      ss += dv * dv;
    }
    var = ss / (n - 1.0) / n;
  }
  return {top + std::log(combined), std::sqrt(var) / combined, ll.size(),
          EstimatorKind::kUBStratified};
}

double mc_variance_bound(const FittedModel& model, std::size_t M) {
  if (M < 1) throw Error(Errc::kInvalidArgument, "mc_variance_bound needs M >= 1");
  return 2.0 * model.max_loglik - std::log(static_cast<double>(M));
}

MarginalEstimate estimate_marginal(EstimatorKind kind, RandomStream& rng,
                                   const FittedModel& model, const EstimatorSettings& settings) {
  const double mu = settings.mu.value_or(default_mu(static_cast<int>(model.dim)));
  const Ellipsoid e = build_ellipsoid(model, mu);
  switch (kind) {
    case EstimatorKind::kUE: return ue_estimate(rng, model, e, settings.samples, settings.guard);
    case EstimatorKind::kUEG: return ueg_estimate(rng, model, e, settings.samples, settings.guard);
    case EstimatorKind::kGE: return ge_estimate(rng, model, e, settings.samples, settings.guard);
    case EstimatorKind::kUB: return ub_estimate(rng, model, bounding_box(e), settings.samples);
    case EstimatorKind::kUBStratified:
      return ub_stratified_estimate(
          rng, model, partition(bounding_box(e), settings.strat_segments, settings.partition_cap),
          settings.samples);
  }
  throw Error(Errc::kInvalidArgument, "unknown estimator kind");
}

}  // namespace mcsel
