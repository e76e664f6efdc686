#include "mcsel/selection.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "mcsel/error.hpp"

namespace mcsel {

namespace {

constexpr std::array<std::pair<Rule, std::string_view>, 7> kRuleNames{{
    {Rule::kUB, "ub"},
    {Rule::kBIC, "bic"},
    {Rule::kAIC, "aic"},
    {Rule::kUE, "ue"},
    {Rule::kUEG, "ueg"},
    {Rule::kGE, "ge"},
    {Rule::kUBStratified, "ub-strat"},
}};

}  // namespace

std::string_view to_string(Rule rule) noexcept {
  for (const auto& [r, name] : kRuleNames) {
    if (r == rule) return name;
  }
  return "?";
}

std::optional<Rule> parse_rule(std::string_view name) noexcept {
  for (const auto& [r, n] : kRuleNames) {
    if (n == name) return r;
  }
  return std::nullopt;
}

std::string valid_rule_names() {
  std::string out;
  for (const auto& [r, n] : kRuleNames) {
    if (!out.empty()) out += ',';
    out += n;
  }
  return out;
}

bool is_map_rule(Rule rule) noexcept { return rule != Rule::kAIC && rule != Rule::kBIC; }

EstimatorKind estimator_for(Rule rule) {
  switch (rule) {
    case Rule::kUE: return EstimatorKind::kUE;
    case Rule::kUEG: return EstimatorKind::kUEG;
    case Rule::kGE: return EstimatorKind::kGE;
    case Rule::kUB: return EstimatorKind::kUB;
    case Rule::kUBStratified: return EstimatorKind::kUBStratified;
    case Rule::kAIC:
    case Rule::kBIC: break;
  }
  throw Error(Errc::kInvalidArgument, "rule " + std::string(to_string(rule)) +
                                          " is not a marginal-likelihood rule");
}

SelectionOutcome select_map(std::span<const MarginalEstimate> estimates,
                            std::span<const double> log_model_prior) {
  if (estimates.empty()) throw Error(Errc::kEmptyCandidates, "no candidate models to select from");
  if (!log_model_prior.empty() && log_model_prior.size() != estimates.size()) {
    throw Error(Errc::kDimensionMismatch, "model prior length differs from candidate count");
  }
  SelectionOutcome out;
  out.rule = Rule::kUB;
  switch (estimates.front().method) {
    case EstimatorKind::kUE: out.rule = Rule::kUE; break;
    case EstimatorKind::kUEG: out.rule = Rule::kUEG; break;
    case EstimatorKind::kGE: out.rule = Rule::kGE; break;
    case EstimatorKind::kUB: out.rule = Rule::kUB; break;
    case EstimatorKind::kUBStratified: out.rule = Rule::kUBStratified; break;
  }
  out.samples = estimates.front().samples_used;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    double score = estimates[k].log_value;
    if (!log_model_prior.empty()) score += log_model_prior[k];
    out.scores.push_back(score);
    if (score > best) {
      best = score;
      out.selected_order = static_cast<int>(k + 1);
    }
  }
  if (out.selected_order == 0) {
    throw Error(Errc::kNumericalFailure, "every candidate model was excluded");
  }
  return out;
}

SelectionOutcome select_criterion(std::span<const CriterionScore> scores) {
  if (scores.empty()) throw Error(Errc::kEmptyCandidates, "no candidate models to select from");
  SelectionOutcome out;
  out.rule = scores.front().method == CriterionKind::kAIC ? Rule::kAIC : Rule::kBIC;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < scores.size(); ++k) {
    out.scores.push_back(scores[k].value);
    if (scores[k].value < best) {
      best = scores[k].value;
      out.selected_order = static_cast<int>(k + 1);
    }
  }
  if (out.selected_order == 0) {
    throw Error(Errc::kNumericalFailure, "every candidate model was excluded");
  }
  return out;
}

}  // namespace mcsel
