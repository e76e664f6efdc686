#pragma once

// Monte-Carlo estimates of the marginal likelihood p(y | M_n) under
// data-driven priors, plus the AIC/BIC penalized criteria.
//
// Everything stays in the log domain: the natural-scale estimate is never
// formed, only ln p_hat and a delta-method standard error of ln p_hat.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "mcsel/models.hpp"
#include "mcsel/random.hpp"
#include "mcsel/regions.hpp"
#include "mcsel/sampling.hpp"

namespace mcsel {

enum class EstimatorKind {
  kUE,            // uniform prior on the ellipsoid
  kUEG,           // same prior, Gaussian importance proposal
  kGE,            // truncated Gaussian prior on the ellipsoid
  kUB,            // uniform prior on the bounding box
  kUBStratified,  // UB with equal-width stratification of the box
};

std::string_view to_string(EstimatorKind kind) noexcept;

struct MarginalEstimate {
  double log_value = kLogZero;
  double mc_std_error_log = 0.0;
  std::size_t samples_used = 0;
  EstimatorKind method = EstimatorKind::kUE;
};

enum class CriterionKind { kAIC, kBIC };

std::string_view to_string(CriterionKind kind) noexcept;

struct CriterionScore {
  double value = 0.0;
  double gamma = 0.0;
  CriterionKind method = CriterionKind::kAIC;
};

/// -2 max_loglik + gamma d
CriterionScore penalized_criterion(double max_loglik, std::size_t d, double gamma,
                                   CriterionKind method);
CriterionScore aic(const FittedModel& model);
CriterionScore bic(const FittedModel& model, std::size_t N);

/// ln of the sample mean of exp(log_weights) and the delta-method standard
/// error std(w) / (mean(w) sqrt(M)) computed on weights shifted by the max.
struct LogMeanSummary {
  double log_mean = kLogZero;
  double std_error_log = 0.0;
};
LogMeanSummary summarize_log_weights(std::span<const double> log_weights);

MarginalEstimate ue_estimate(RandomStream& rng, const FittedModel& model, const Ellipsoid& e,
                             std::size_t M, const AcceptanceGuard& guard = {});

/// rho / (M V(C)) sum p(y|theta_m) / g(theta_m) with rho = chi2_cdf(d, mu).
MarginalEstimate ueg_estimate(RandomStream& rng, const FittedModel& model, const Ellipsoid& e,
                              std::size_t M, const AcceptanceGuard& guard = {});

MarginalEstimate ge_estimate(RandomStream& rng, const FittedModel& model, const Ellipsoid& e,
                             std::size_t M, const AcceptanceGuard& guard = {});

MarginalEstimate ub_estimate(RandomStream& rng, const FittedModel& model, const Box& box,
                             std::size_t M);

/// Cell k receives max(1, round(rho_k M)) uniform draws; the cell means are
/// combined with weights rho_k.
MarginalEstimate ub_stratified_estimate(RandomStream& rng, const FittedModel& model,
                                        const BoxPartition& partition, std::size_t M);

/// ln of the bound p(y | theta_hat)^2 / M on var(p_hat).
double mc_variance_bound(const FittedModel& model, std::size_t M);

/// ln g(theta) for the Gaussian N(theta_hat, J^{-1}).
double log_gaussian_proposal(const FittedModel& model, std::span<const double> theta);

/// Knobs shared by all estimators when driven by kind.
struct EstimatorSettings {
  std::size_t samples = 1000;
  /// Ellipsoid radius; default_mu(d) when unset.
  std::optional<double> mu;
  /// Stratification segments per axis; required for kUBStratified.
  std::size_t strat_segments = 1;
  std::uint64_t partition_cap = kDefaultPartitionCap;
  AcceptanceGuard guard;
};

MarginalEstimate estimate_marginal(EstimatorKind kind, RandomStream& rng,
                                   const FittedModel& model, const EstimatorSettings& settings);

}  // namespace mcsel
