#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcsel/estimators.hpp"

namespace mcsel {

/// A model-selection rule: one of the marginal-likelihood estimators (MAP)
/// or a penalized criterion.
enum class Rule { kUE, kUEG, kGE, kUB, kUBStratified, kAIC, kBIC };

std::string_view to_string(Rule rule) noexcept;
/// Accepts the names produced by to_string; nullopt otherwise.
std::optional<Rule> parse_rule(std::string_view name) noexcept;
/// "ub,bic,aic,ue,ueg,ge,ub-strat"
std::string valid_rule_names();

bool is_map_rule(Rule rule) noexcept;
EstimatorKind estimator_for(Rule rule);

struct SelectionOutcome {
  Rule rule = Rule::kUB;
  /// Candidate k (0-based) holds the score of order k + 1: ln p_hat for MAP
  /// rules, the criterion value for AIC/BIC. Excluded candidates hold -inf
  /// (MAP) or +inf (criteria).
  std::vector<double> scores;
  int selected_order = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
};

/// argmax of log_value (+ optional log prior), ties to the smaller order.
/// Throws kEmptyCandidates on an empty list and kNumericalFailure when every
/// candidate is excluded.
SelectionOutcome select_map(std::span<const MarginalEstimate> estimates,
                            std::span<const double> log_model_prior = {});

/// argmin of value, ties to the smaller order.
SelectionOutcome select_criterion(std::span<const CriterionScore> scores);

}  // namespace mcsel
