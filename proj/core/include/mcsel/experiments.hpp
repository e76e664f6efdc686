#pragma once

// Polynomial order-selection studies: fixed-design histograms and
// probability of correct selection versus N, the average probability over
// random coefficient draws, single-dataset selection and sampler diagnostics.
//
// Replication r of every study draws from its own derived RandomStream, and
// results are folded in replication order, so reports do not depend on the
// number of worker threads.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcsel/estimators.hpp"
#include "mcsel/models.hpp"
#include "mcsel/selection.hpp"

namespace mcsel {

enum class ExperimentKind { kFig1, kFig2, kFig3, kSelect };

std::string_view to_string(ExperimentKind kind) noexcept;

struct ExperimentConfig {
  std::optional<ExperimentKind> experiment;
  std::vector<std::size_t> n_list;
  int true_order = 4;
  std::vector<double> true_coefficients;
  double coefficient_half_width = 0.5;
  double sigma2 = 1.0;
  int max_order = 6;
  std::size_t replications = 1000;
  std::size_t coefficient_draws = 100;
  std::size_t samples = 1000;
  std::vector<Rule> rules;
  std::optional<std::uint64_t> seed;
  /// Segments per axis for ub-strat; nullopt selects the largest L with
  /// L^max_order <= samples.
  std::optional<std::size_t> strat_segments;
  std::uint64_t partition_cap = kDefaultPartitionCap;
  /// Per-order ellipsoid radius override (index 0 is order 1).
  std::optional<std::vector<double>> mu;
  /// Optional ln p(M_n) offsets for MAP rules (index 0 is order 1).
  std::optional<std::vector<double>> model_log_prior;
  std::optional<std::string> data_path;

  double mu_for(int order) const;
  std::size_t resolved_strat_segments() const;
  EstimatorSettings estimator_settings(int order) const;
};

/// Parses and validates a JSON config. Missing `sigma2`, unknown keys, bad
/// rule names and inconsistent counts raise kConfigError naming the field;
/// an oversize stratification raises kPartitionTooLarge naming the cap.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate_config(const ExperimentConfig& config);
/// The fully resolved configuration (every default spelled out).
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Draws a fresh seed when the config has none.
std::uint64_t resolve_seed(ExperimentConfig& config);

struct RuleTally {
  Rule rule = Rule::kUB;
  /// histogram[k] counts selections of order k + 1.
  std::vector<std::uint64_t> histogram;
  /// Runs in which no candidate could be scored.
  std::uint64_t failures = 0;
  /// Candidates dropped because a sampler starved (AcceptanceTooLow).
  std::uint64_t sampler_failures = 0;
  /// Fixed design: fraction of runs selecting the true order.
  double prob_correct = 0.0;
  /// Random polynomials: per true order n, fraction selecting n.
  std::vector<double> prob_correct_by_order;
  /// Random polynomials: triple average of the Kronecker tally.
  double avg_prob = 0.0;
  double mean_mc_std_error_log = 0.0;
};

struct SampleSizeResult {
  std::size_t N = 0;
  std::uint64_t runs = 0;
  /// Candidates excluded because their FIM was singular.
  std::uint64_t excluded_candidates = 0;
  std::vector<RuleTally> rules;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<SampleSizeResult> results;
  double wall_time_seconds = 0.0;
};

/// Data from the fixed true coefficients; histogram and P(correct) per N.
ExperimentReport run_fixed_design(const ExperimentConfig& config, unsigned jobs = 1);

/// Coefficients drawn uniformly from the cube [-h, h]^n for every true order
/// n = 1..max_order; reports the averaged probability of correct selection.
ExperimentReport run_random_polynomials(const ExperimentConfig& config, unsigned jobs = 1);

ExperimentReport run_experiment(const ExperimentConfig& config, unsigned jobs = 1);

struct SelectOnceResult {
  std::vector<SelectionOutcome> outcomes;
  /// Per rule, per candidate; empty for AIC/BIC.
  std::vector<std::vector<double>> mc_std_error_log;
  std::vector<int> excluded_orders;
  std::size_t N = 0;
};

/// Fits every candidate order to one dataset and applies each enabled rule.
SelectOnceResult select_once(const Dataset& data, const ExperimentConfig& config);
SelectOnceResult select_once(const std::filesystem::path& data_path,
                             const ExperimentConfig& config);

struct OrderDiagnostics {
  int order = 0;
  double mu = 0.0;
  double rho = 0.0;
  double uniform_ellipsoid_acceptance = 0.0;
  double truncated_gaussian_acceptance = 0.0;
  /// Fraction of fits whose ellipsoid holds the true parameters; only for
  /// orders that contain the true model.
  std::optional<double> coverage;
  std::optional<std::string> error;
};

struct DiagnosticsReport {
  ExperimentConfig config;
  std::size_t N = 0;
  std::vector<OrderDiagnostics> orders;
};

DiagnosticsReport run_sampler_diagnostics(const ExperimentConfig& config, unsigned jobs = 1);

// --- artifacts --------------------------------------------------------------

Dataset read_dataset_csv(const std::filesystem::path& path, double sigma2);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

/// "%.17g"
std::string format_number(double v);

std::string histogram_csv(const ExperimentReport& report);
std::string prob_correct_csv(const ExperimentReport& report);
std::string avg_prob_csv(const ExperimentReport& report);
nlohmann::json report_to_json(const ExperimentReport& report);
nlohmann::json selection_to_json(const SelectOnceResult& result, const ExperimentConfig& config);
nlohmann::json diagnostics_to_json(const DiagnosticsReport& report);

/// Writes histogram.csv, prob_correct.csv or avg_prob.csv, and report.json.
/// Returns the written paths.
std::vector<std::filesystem::path> write_report(const ExperimentReport& report,
                                                const std::filesystem::path& out_dir);

}  // namespace mcsel
