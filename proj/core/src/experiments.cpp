#include "mcsel/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <type_traits>

#include "mcsel/error.hpp"
#include "mcsel/regions.hpp"

namespace mcsel {

namespace {

using nlohmann::json;

constexpr std::uint64_t kCoefficientStream = 0xC0EFF1C1E7ULL;
constexpr std::uint64_t kDiagnosticsStream = 0xD1A6ULL;
constexpr std::uint64_t kSelectStream = 0x5E1EC7ULL;

const std::vector<double> kReferenceCoefficients{0.1, 0.1, -0.3, 0.4};
const std::vector<std::size_t> kDefaultNGrid{50, 100, 200, 400, 700, 1000};

[[noreturn]] void config_error(const std::string& field, const std::string& message) {
  throw Error(Errc::kConfigError, "config field '" + field + "': " + message);
}

bool integral_fits(const json& v, bool non_negative) {
  if (!v.is_number_integer()) return false;
  return !non_negative || v.is_number_unsigned() || v.get<std::int64_t>() >= 0;
}

template <typename T>
T get_field(const json& j, const std::string& key, const char* expected) {
  const json& v = j.at(key);
  bool ok = true;
  if constexpr (std::is_integral_v<T>) {
    ok = integral_fits(v, std::is_unsigned_v<T>);
  } else if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
    ok = v.is_array() && std::all_of(v.begin(), v.end(),
                                     [](const json& e) { return integral_fits(e, true); });
  }
  if (!ok) config_error(key, std::string("expected ") + expected);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    config_error(key, std::string("expected ") + expected);
  }
}

std::uint64_t rule_stream(Rule rule, int order) {
  return 1 + static_cast<std::uint64_t>(rule) * 64 + static_cast<std::uint64_t>(order);
}

// Runs body(i) for i in [0, count) on up to `jobs` threads. The exception of
// the lowest failing index is rethrown.
template <typename Body>
void parallel_for(std::size_t count, unsigned jobs, Body&& body) {
  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

struct CandidateFits {
  std::vector<std::optional<FittedModel>> fits;
  std::uint64_t excluded = 0;
};

CandidateFits fit_candidates(const ModelFamily& family, const Dataset& data, int max_order) {
  CandidateFits out;
  out.fits.resize(static_cast<std::size_t>(max_order));
  for (int order = 1; order <= max_order; ++order) {
    try {
      out.fits[order - 1] = family.fit(data, order);
    } catch (const Error& e) {
      if (e.code() != Errc::kNotPositiveDefinite) throw;
      ++out.excluded;
    }
  }
  return out;
}

struct RuleScore {
  SelectionOutcome outcome;
  std::vector<double> std_errors;
  std::uint64_t sampler_failures = 0;
  bool failed = false;
};

RuleScore score_rule(Rule rule, const CandidateFits& candidates, const ExperimentConfig& config,
                     std::size_t N, const RandomStream& base) {
  RuleScore out;
  const std::size_t count = candidates.fits.size();
  try {
    if (is_map_rule(rule)) {
      const EstimatorKind kind = estimator_for(rule);
      std::vector<MarginalEstimate> estimates(count);
      out.std_errors.assign(count, 0.0);
      for (std::size_t k = 0; k < count; ++k) {
        const int order = static_cast<int>(k + 1);
        estimates[k].method = kind;
        if (!candidates.fits[k]) continue;
        RandomStream rng = base.split(rule_stream(rule, order));
        try {
          estimates[k] =
              estimate_marginal(kind, rng, *candidates.fits[k], config.estimator_settings(order));
          out.std_errors[k] = estimates[k].mc_std_error_log;
        } catch (const Error& e) {
          if (e.code() != Errc::kAcceptanceTooLow) throw;
          ++out.sampler_failures;
        }
      }
      std::vector<double> prior;
      if (config.model_log_prior) prior = *config.model_log_prior;
      out.outcome = select_map(estimates, prior);
    } else {
      std::vector<CriterionScore> scores(count);
      for (std::size_t k = 0; k < count; ++k) {
        const auto method = rule == Rule::kAIC ? CriterionKind::kAIC : CriterionKind::kBIC;
        if (!candidates.fits[k]) {
          scores[k] = {std::numeric_limits<double>::infinity(), 0.0, method};
          continue;
        }
        scores[k] = rule == Rule::kAIC ? aic(*candidates.fits[k]) : bic(*candidates.fits[k], N);
      }
      out.outcome = select_criterion(scores);
    }
  } catch (const Error& e) {
    if (e.code() != Errc::kNumericalFailure) throw;
    out.failed = true;
    out.outcome.selected_order = 0;
  }
  out.outcome.rule = rule;
  out.outcome.seed = config.seed.value_or(0);
  out.outcome.samples = is_map_rule(rule) ? config.samples : 0;
  return out;
}

struct RunRecord {
  std::vector<int> selected;  // per rule, 0 on failure
  std::vector<double> se_sum;
  std::vector<std::uint64_t> se_count;
  std::vector<std::uint64_t> sampler_failures;
  std::uint64_t excluded = 0;
};

RunRecord run_one(const ExperimentConfig& config, const Dataset& data, const RandomStream& base) {
  static const PolynomialFamily family;
  const auto candidates = fit_candidates(family, data, config.max_order);
  RunRecord rec;
  rec.excluded = candidates.excluded;
  for (Rule rule : config.rules) {
    const auto score = score_rule(rule, candidates, config, data.size(), base);
    rec.selected.push_back(score.outcome.selected_order);
    double sum = 0.0;
    std::uint64_t n = 0;
    for (std::size_t k = 0; k < score.std_errors.size(); ++k) {
      if (candidates.fits[k]) {
        sum += score.std_errors[k];
        ++n;
      }
    }
    rec.se_sum.push_back(sum);
    rec.se_count.push_back(n);
    rec.sampler_failures.push_back(score.sampler_failures);
  }
  return rec;
}

SampleSizeResult empty_result(const ExperimentConfig& config, std::size_t N) {
  SampleSizeResult res;
  res.N = N;
  for (Rule rule : config.rules) {
    RuleTally t;
    t.rule = rule;
    t.histogram.assign(static_cast<std::size_t>(config.max_order), 0);
    res.rules.push_back(std::move(t));
  }
  return res;
}

// Folds records in index order so the tally is independent of scheduling.
void fold(SampleSizeResult& res, const std::vector<RunRecord>& records,
          std::vector<double>& se_sum, std::vector<std::uint64_t>& se_count) {
  for (const auto& rec : records) {
    ++res.runs;
    res.excluded_candidates += rec.excluded;
    for (std::size_t r = 0; r < res.rules.size(); ++r) {
      auto& tally = res.rules[r];
      const int sel = rec.selected[r];
      if (sel == 0) {
        ++tally.failures;
      } else {
        ++tally.histogram[static_cast<std::size_t>(sel - 1)];
      }
      tally.sampler_failures += rec.sampler_failures[r];
      se_sum[r] += rec.se_sum[r];
      se_count[r] += rec.se_count[r];
    }
  }
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

json rules_to_json(const std::vector<Rule>& rules) {
  json arr = json::array();
  for (Rule r : rules) arr.push_back(std::string(to_string(r)));
  return arr;
}

std::string csv_preamble(const ExperimentConfig& config) {
  return "# config: " + config_to_json(config).dump() + "\n";
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::kFig1: return "fig1";
    case ExperimentKind::kFig2: return "fig2";
    case ExperimentKind::kFig3: return "fig3";
    case ExperimentKind::kSelect: return "select";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Config

double ExperimentConfig::mu_for(int order) const {
  if (mu && static_cast<std::size_t>(order) <= mu->size()) return (*mu)[order - 1];
  return default_mu(order);
}

std::size_t ExperimentConfig::resolved_strat_segments() const {
  if (strat_segments) return *strat_segments;
  return auto_segments(static_cast<std::size_t>(max_order), samples);
}

EstimatorSettings ExperimentConfig::estimator_settings(int order) const {
  EstimatorSettings s;
  s.samples = samples;
  s.mu = mu_for(order);
  s.strat_segments = resolved_strat_segments();
  s.partition_cap = partition_cap;
  return s;
}

ExperimentConfig parse_config(const json& j) {
  static const std::set<std::string> kKnown{
      "experiment", "n_list",       "true_order",      "true_coefficients",
      "coefficient_half_width",     "sigma2",          "max_order",
      "replications",               "coefficient_draws", "samples",
      "rules",      "seed",         "strat_segments",  "partition_cap",
      "mu",         "model_log_prior", "data_path"};
  if (!j.is_object()) config_error("<root>", "expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKnown.contains(key)) config_error(key, "unknown field");
  }

  ExperimentConfig c;
  if (j.contains("experiment")) {
    const auto id = get_field<std::string>(j, "experiment", "a string");
    if (id == "fig1") c.experiment = ExperimentKind::kFig1;
    else if (id == "fig2") c.experiment = ExperimentKind::kFig2;
    else if (id == "fig3") c.experiment = ExperimentKind::kFig3;
    else if (id == "select") c.experiment = ExperimentKind::kSelect;
    else config_error("experiment", "must be one of fig1, fig2, fig3, select (got '" + id + "')");
  }
  const auto kind = c.experiment.value_or(ExperimentKind::kSelect);

  if (!j.contains("sigma2")) config_error("sigma2", "missing required field");
  c.sigma2 = get_field<double>(j, "sigma2", "a positive number");

  if (j.contains("n_list")) {
    c.n_list = get_field<std::vector<std::size_t>>(j, "n_list", "an array of sample sizes");
  } else {
    c.n_list = (kind == ExperimentKind::kFig2 || kind == ExperimentKind::kFig3)
                   ? kDefaultNGrid
                   : std::vector<std::size_t>{100};
  }

  if (j.contains("true_coefficients")) {
    c.true_coefficients =
        get_field<std::vector<double>>(j, "true_coefficients", "an array of numbers");
    c.true_order = static_cast<int>(c.true_coefficients.size());
    if (j.contains("true_order") && get_field<int>(j, "true_order", "an integer") != c.true_order) {
      config_error("true_order", "disagrees with the length of true_coefficients");
    }
  } else if (j.contains("true_order") &&
             get_field<int>(j, "true_order", "an integer") != static_cast<int>(kReferenceCoefficients.size())) {
    config_error("true_coefficients", "required when true_order differs from the default design");
  } else {
    c.true_coefficients = kReferenceCoefficients;
    c.true_order = static_cast<int>(c.true_coefficients.size());
  }

  if (j.contains("coefficient_half_width")) {
    c.coefficient_half_width = get_field<double>(j, "coefficient_half_width", "a number");
  }
  if (j.contains("max_order")) c.max_order = get_field<int>(j, "max_order", "an integer");
  if (j.contains("replications")) {
    c.replications = get_field<std::size_t>(j, "replications", "a positive integer");
  }
  if (j.contains("coefficient_draws")) {
    c.coefficient_draws = get_field<std::size_t>(j, "coefficient_draws", "a positive integer");
  }
  c.samples = kind == ExperimentKind::kFig3 ? 10000 : 1000;
  if (j.contains("samples")) c.samples = get_field<std::size_t>(j, "samples", "an integer >= 2");

  if (j.contains("rules")) {
    const auto names = get_field<std::vector<std::string>>(j, "rules", "an array of rule names");
    for (const auto& name : names) {
      const auto rule = parse_rule(name);
      if (!rule) {
        config_error("rules", "unknown rule '" + name + "'; valid rules: " + valid_rule_names());
      }
      c.rules.push_back(*rule);
    }
  } else {
    c.rules = {Rule::kUB, Rule::kBIC, Rule::kAIC};
  }

  if (j.contains("seed") && !j.at("seed").is_null()) {
    c.seed = get_field<std::uint64_t>(j, "seed", "an unsigned 64-bit integer");
  }
  if (j.contains("strat_segments")) {
    const auto& v = j.at("strat_segments");
    if (v.is_string() && v.get<std::string>() == "auto") {
      c.strat_segments.reset();
    } else if (v.is_number_integer() && v.get<std::int64_t>() >= 1) {
      c.strat_segments = v.get<std::size_t>();
    } else {
      config_error("strat_segments", "expected \"auto\" or a positive integer");
    }
  }
  if (j.contains("partition_cap")) {
    c.partition_cap = get_field<std::uint64_t>(j, "partition_cap", "a positive integer");
  }
  if (j.contains("mu") && !j.at("mu").is_null()) {
    const auto& v = j.at("mu");
    if (v.is_number()) {
      c.mu = std::vector<double>(static_cast<std::size_t>(std::max(c.max_order, 0)),
                                 v.get<double>());
    } else {
      c.mu = get_field<std::vector<double>>(j, "mu", "a number or an array of numbers");
    }
  }
  if (j.contains("model_log_prior") && !j.at("model_log_prior").is_null()) {
    c.model_log_prior =
        get_field<std::vector<double>>(j, "model_log_prior", "an array of numbers");
  }
  if (j.contains("data_path") && !j.at("data_path").is_null()) {
    c.data_path = get_field<std::string>(j, "data_path", "a string");
  }
  validate_config(c);
  return c;
}

void validate_config(const ExperimentConfig& c) {
  if (!(c.sigma2 > 0.0) || !std::isfinite(c.sigma2)) config_error("sigma2", "must be positive");
  if (c.max_order < 1) config_error("max_order", "must be >= 1");
  if (c.n_list.empty()) config_error("n_list", "must not be empty");
  for (auto N : c.n_list) {
    if (N < 2) config_error("n_list", "every sample size must be >= 2");
  }
  if (c.true_order < 1) config_error("true_order", "must be >= 1");
  if (c.true_order > c.max_order && c.experiment != ExperimentKind::kFig3) {
    config_error("true_order", "must not exceed max_order");
  }
  if (c.replications < 1) config_error("replications", "must be >= 1");
  if (c.coefficient_draws < 1) config_error("coefficient_draws", "must be >= 1");
  if (c.samples < 2) config_error("samples", "must be >= 2");
  if (!(c.coefficient_half_width > 0.0)) config_error("coefficient_half_width", "must be positive");
  if (c.rules.empty()) config_error("rules", "at least one rule is required");
  if (c.strat_segments && *c.strat_segments < 1) config_error("strat_segments", "must be >= 1");
  if (c.partition_cap < 1) config_error("partition_cap", "must be >= 1");
  if (c.mu) {
    if (c.mu->size() < static_cast<std::size_t>(c.max_order)) {
      config_error("mu", "needs one radius per candidate order (max_order entries)");
    }
    for (double v : *c.mu) {
      if (!(v > 0.0)) config_error("mu", "radii must be positive");
    }
  }
  if (c.model_log_prior && c.model_log_prior->size() != static_cast<std::size_t>(c.max_order)) {
    config_error("model_log_prior", "needs max_order entries");
  }
  if (std::find(c.rules.begin(), c.rules.end(), Rule::kUBStratified) != c.rules.end()) {
    const auto L = c.resolved_strat_segments();
    if (partition_cell_count(L, static_cast<std::size_t>(c.max_order), c.partition_cap) == 0) {
      throw Error(Errc::kPartitionTooLarge,
                  "config field 'strat_segments': L=" + std::to_string(L) + " gives L^" +
                      std::to_string(c.max_order) + " cells, above the partition cap of " +
                      std::to_string(c.partition_cap));
    }
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kConfigError, "cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error(Errc::kConfigError, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment ? json(std::string(to_string(*c.experiment))) : json(nullptr);
  j["n_list"] = c.n_list;
  j["true_order"] = c.true_order;
  j["true_coefficients"] = c.true_coefficients;
  j["coefficient_half_width"] = c.coefficient_half_width;
  j["sigma2"] = c.sigma2;
  j["max_order"] = c.max_order;
  j["replications"] = c.replications;
  j["coefficient_draws"] = c.coefficient_draws;
  j["samples"] = c.samples;
  j["rules"] = rules_to_json(c.rules);
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["strat_segments"] = c.resolved_strat_segments();
  j["partition_cap"] = c.partition_cap;
  std::vector<double> mu;
  for (int order = 1; order <= c.max_order; ++order) mu.push_back(c.mu_for(order));
  j["mu"] = mu;
  j["model_log_prior"] = c.model_log_prior ? json(*c.model_log_prior) : json(nullptr);
  j["data_path"] = c.data_path ? json(*c.data_path) : json(nullptr);
  return j;
}

std::uint64_t resolve_seed(ExperimentConfig& config) {
  if (!config.seed) {
    std::random_device rd;
    config.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  return *config.seed;
}

// ---------------------------------------------------------------------------
// Runners

ExperimentReport run_fixed_design(const ExperimentConfig& input, unsigned jobs) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig config = input;
  validate_config(config);
  resolve_seed(config);
  if (config.true_order > config.max_order) config_error("true_order", "must not exceed max_order");

  ExperimentReport report;
  const std::size_t R = config.replications;
  const RandomStream master(*config.seed);
  for (std::size_t N : config.n_list) {
    const RandomStream per_n = master.split(N);
    std::vector<RunRecord> records(R);
    parallel_for(R, jobs, [&](std::size_t r) {
      const RandomStream base = per_n.split(r);
      RandomStream data_rng = base.split(0);
      const Dataset data = generate_data(data_rng, config.true_coefficients, config.sigma2, N);
      records[r] = run_one(config, data, base);
    });

    auto res = empty_result(config, N);
    std::vector<double> se_sum(config.rules.size(), 0.0);
    std::vector<std::uint64_t> se_count(config.rules.size(), 0);
    fold(res, records, se_sum, se_count);
    for (std::size_t k = 0; k < res.rules.size(); ++k) {
      auto& tally = res.rules[k];
      tally.prob_correct =
          static_cast<double>(tally.histogram[static_cast<std::size_t>(config.true_order - 1)]) /
          static_cast<double>(res.runs);
      tally.mean_mc_std_error_log =
          se_count[k] ? se_sum[k] / static_cast<double>(se_count[k]) : 0.0;
    }
    report.results.push_back(std::move(res));
  }
  report.config = std::move(config);
  report.wall_time_seconds = elapsed_seconds(start);
  return report;
}

ExperimentReport run_random_polynomials(const ExperimentConfig& input, unsigned jobs) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig config = input;
  validate_config(config);
  resolve_seed(config);

  const auto orders = static_cast<std::size_t>(config.max_order);
  const std::size_t draws = config.coefficient_draws;
  const std::size_t R = config.replications;
  const RandomStream master(*config.seed);

  // Coefficient vectors are shared by every N.
  std::vector<std::vector<double>> coefficients(orders * draws);
  const RandomStream coef_root = master.split(kCoefficientStream);
  for (std::size_t n = 1; n <= orders; ++n) {
    for (std::size_t m = 0; m < draws; ++m) {
      RandomStream rng = coef_root.split(n).split(m);
      auto& c = coefficients[(n - 1) * draws + m];
      c.resize(n);
      for (double& v : c) {
        v = rng.uniform(-config.coefficient_half_width, config.coefficient_half_width);
      }
    }
  }

  ExperimentReport report;
  const std::size_t total = orders * draws * R;
  for (std::size_t N : config.n_list) {
    const RandomStream per_n = master.split(N);
    std::vector<RunRecord> records(total);
    parallel_for(total, jobs, [&](std::size_t task) {
      const std::size_t r = task % R;
      const std::size_t m = (task / R) % draws;
      const std::size_t n = task / (R * draws) + 1;
      const RandomStream base = per_n.split(n).split(m).split(r);
      RandomStream data_rng = base.split(0);
      const Dataset data =
          generate_data(data_rng, coefficients[(n - 1) * draws + m], config.sigma2, N);
      records[task] = run_one(config, data, base);
    });

    auto res = empty_result(config, N);
    std::vector<double> se_sum(config.rules.size(), 0.0);
    std::vector<std::uint64_t> se_count(config.rules.size(), 0);
    fold(res, records, se_sum, se_count);

    for (std::size_t k = 0; k < res.rules.size(); ++k) {
      auto& tally = res.rules[k];
      std::vector<std::uint64_t> correct(orders, 0);
      for (std::size_t task = 0; task < total; ++task) {
        const std::size_t n = task / (R * draws) + 1;
        if (records[task].selected[k] == static_cast<int>(n)) ++correct[n - 1];
      }
      std::uint64_t hits = 0;
      tally.prob_correct_by_order.resize(orders);
      for (std::size_t n = 0; n < orders; ++n) {
        hits += correct[n];
        tally.prob_correct_by_order[n] =
            static_cast<double>(correct[n]) / static_cast<double>(draws * R);
      }
      tally.avg_prob = static_cast<double>(hits) / static_cast<double>(total);
      tally.mean_mc_std_error_log =
          se_count[k] ? se_sum[k] / static_cast<double>(se_count[k]) : 0.0;
    }
    report.results.push_back(std::move(res));
  }
  report.config = std::move(config);
  report.wall_time_seconds = elapsed_seconds(start);
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config, unsigned jobs) {
  if (!config.experiment || *config.experiment == ExperimentKind::kSelect) {
    config_error("experiment", "must be one of fig1, fig2, fig3 for an experiment run");
  }
  if (*config.experiment == ExperimentKind::kFig3) return run_random_polynomials(config, jobs);
  return run_fixed_design(config, jobs);
}

SelectOnceResult select_once(const Dataset& data, const ExperimentConfig& input) {
  ExperimentConfig config = input;
  validate_config(config);
  resolve_seed(config);
  static const PolynomialFamily family;
  const auto candidates = fit_candidates(family, data, config.max_order);
  SelectOnceResult out;
  out.N = data.size();
  for (std::size_t k = 0; k < candidates.fits.size(); ++k) {
    if (!candidates.fits[k]) out.excluded_orders.push_back(static_cast<int>(k + 1));
  }
  const RandomStream base = RandomStream(*config.seed).split(kSelectStream);
  for (Rule rule : config.rules) {
    auto score = score_rule(rule, candidates, config, data.size(), base);
    if (score.failed) throw Error(Errc::kNumericalFailure, "every candidate model was excluded");
    out.outcomes.push_back(std::move(score.outcome));
    out.mc_std_error_log.push_back(std::move(score.std_errors));
  }
  return out;
}

SelectOnceResult select_once(const std::filesystem::path& data_path,
                             const ExperimentConfig& config) {
  return select_once(read_dataset_csv(data_path, config.sigma2), config);
}

DiagnosticsReport run_sampler_diagnostics(const ExperimentConfig& input, unsigned jobs) {
  ExperimentConfig config = input;
  validate_config(config);
  resolve_seed(config);
  DiagnosticsReport report;
  report.N = config.n_list.front();
  const RandomStream root = RandomStream(*config.seed).split(kDiagnosticsStream);

  RandomStream data_rng = root.split(0);
  const Dataset data =
      generate_data(data_rng, config.true_coefficients, config.sigma2, report.N);
  static const PolynomialFamily family;

  for (int order = 1; order <= config.max_order; ++order) {
    OrderDiagnostics od;
    od.order = order;
    od.mu = config.mu_for(order);
    od.rho = chi2_cdf(order, od.mu);
    try {
      const auto model = family.fit(data, order);
      const auto e = build_ellipsoid(model, od.mu);
      RandomStream u_rng = root.split(1000 + static_cast<std::uint64_t>(order));
      od.uniform_ellipsoid_acceptance =
          sample_uniform_ellipsoid(u_rng, e, config.samples).acceptance_rate();
      RandomStream g_rng = root.split(2000 + static_cast<std::uint64_t>(order));
      od.truncated_gaussian_acceptance =
          sample_truncated_gaussian(g_rng, model, e, config.samples).acceptance_rate();
    } catch (const Error& err) {
      if (err.code() != Errc::kNotPositiveDefinite && err.code() != Errc::kAcceptanceTooLow) throw;
      od.error = std::string(to_string(err.code())) + ": " + err.what();
    }
    report.orders.push_back(std::move(od));
  }

  // Coverage of the true parameters (zero-padded for larger orders).
  const int first = config.true_order;
  const std::size_t R = config.replications;
  std::vector<std::vector<char>> hit(R);
  parallel_for(R, jobs, [&](std::size_t r) {
    RandomStream rng = root.split(10'000 + r);
    const Dataset d = generate_data(rng, config.true_coefficients, config.sigma2, report.N);
    hit[r].assign(static_cast<std::size_t>(config.max_order), 0);
    for (int order = first; order <= config.max_order; ++order) {
      try {
        const auto model = family.fit(d, order);
        std::vector<double> truth(static_cast<std::size_t>(order), 0.0);
        std::copy(config.true_coefficients.begin(), config.true_coefficients.end(), truth.begin());
        hit[r][order - 1] = contains(build_ellipsoid(model, config.mu_for(order)), truth) ? 1 : 0;
      } catch (const Error& err) {
        if (err.code() != Errc::kNotPositiveDefinite) throw;
      }
    }
  });
  for (int order = first; order <= config.max_order; ++order) {
    std::size_t inside = 0;
    for (std::size_t r = 0; r < R; ++r) inside += hit[r][order - 1];
    report.orders[order - 1].coverage = static_cast<double>(inside) / static_cast<double>(R);
  }
  report.config = std::move(config);
  return report;
}

// ---------------------------------------------------------------------------
// Artifacts

std::string format_number(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

Dataset read_dataset_csv(const std::filesystem::path& path, double sigma2) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kFileNotFound, "dataset file not found: " + path.string());
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<double> y;
  auto parse_error = [&](const std::string& what) {
    throw Error(Errc::kParseError,
                path.string() + ": line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!have_header) {
      if (text != "t,y") parse_error("expected header 't,y', got '" + text + "'");
      have_header = true;
      continue;
    }
    const auto comma = text.find(',');
    if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos) {
      parse_error("expected two comma-separated fields");
    }
    const std::string t_field = trim(std::string_view(text).substr(0, comma));
    const std::string y_field = trim(std::string_view(text).substr(comma + 1));
    try {
      std::size_t used = 0;
      (void)std::stoll(t_field, &used);
      if (used != t_field.size()) parse_error("field t is not an integer: '" + t_field + "'");
      const double value = std::stod(y_field, &used);
      if (used != y_field.size()) parse_error("field y is not a number: '" + y_field + "'");
      y.push_back(value);
    } catch (const std::logic_error&) {
      parse_error("could not parse row '" + text + "'");
    }
  }
  if (!have_header) {
    ++line_no;
    parse_error("missing header 't,y'");
  }
  if (y.size() < 2) throw Error(Errc::kParseError, path.string() + ": need at least 2 rows");
  try {
    return Dataset(std::move(y), sigma2);
  } catch (const Error& e) {
    throw Error(Errc::kParseError, path.string() + ": " + e.what());
  }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kInvalidArgument, "cannot write " + path.string());
  out << "t,y\n";
  const auto y = data.y();
  for (std::size_t t = 0; t < y.size(); ++t) out << (t + 1) << ',' << format_number(y[t]) << '\n';
}

std::string histogram_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << csv_preamble(report.config) << "rule,N,order,count\n";
  for (std::size_t k = 0; k < report.config.rules.size(); ++k) {
    for (const auto& res : report.results) {
      const auto& tally = res.rules[k];
      for (std::size_t o = 0; o < tally.histogram.size(); ++o) {
        os << to_string(tally.rule) << ',' << res.N << ',' << (o + 1) << ','
           << tally.histogram[o] << '\n';
      }
    }
  }
  return os.str();
}

std::string prob_correct_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << csv_preamble(report.config) << "rule,N,probability\n";
  for (std::size_t k = 0; k < report.config.rules.size(); ++k) {
    for (const auto& res : report.results) {
      os << to_string(res.rules[k].rule) << ',' << res.N << ','
         << format_number(res.rules[k].prob_correct) << '\n';
    }
  }
  return os.str();
}

std::string avg_prob_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << csv_preamble(report.config) << "rule,N,avg_probability\n";
  for (std::size_t k = 0; k < report.config.rules.size(); ++k) {
    for (const auto& res : report.results) {
      os << to_string(res.rules[k].rule) << ',' << res.N << ','
         << format_number(res.rules[k].avg_prob) << '\n';
    }
  }
  return os.str();
}

json report_to_json(const ExperimentReport& report) {
  json j;
  j["config"] = config_to_json(report.config);
  j["seed"] = report.config.seed ? json(*report.config.seed) : json(nullptr);
  j["wall_time_seconds"] = report.wall_time_seconds;
  const bool random_polys = report.config.experiment == ExperimentKind::kFig3;
  json results = json::array();
  for (const auto& res : report.results) {
    json r;
    r["N"] = res.N;
    r["runs"] = res.runs;
    r["excluded_candidates"] = res.excluded_candidates;
    json rules = json::array();
    for (const auto& t : res.rules) {
      json jt;
      jt["rule"] = std::string(to_string(t.rule));
      jt["histogram"] = t.histogram;
      jt["failures"] = t.failures;
      jt["sampler_failures"] = t.sampler_failures;
      jt["mean_mc_std_error_log"] = t.mean_mc_std_error_log;
      if (random_polys) {
        jt["avg_probability"] = t.avg_prob;
        jt["probability_by_true_order"] = t.prob_correct_by_order;
      } else {
        jt["probability_correct"] = t.prob_correct;
      }
      rules.push_back(std::move(jt));
    }
    r["rules"] = std::move(rules);
    results.push_back(std::move(r));
  }
  j["results"] = std::move(results);
  return j;
}

json selection_to_json(const SelectOnceResult& result, const ExperimentConfig& config) {
  json j;
  j["config"] = config_to_json(config);
  j["N"] = result.N;
  j["excluded_orders"] = result.excluded_orders;
  json rules = json::array();
  for (std::size_t k = 0; k < result.outcomes.size(); ++k) {
    const auto& o = result.outcomes[k];
    json r;
    r["rule"] = std::string(to_string(o.rule));
    r["selected_order"] = o.selected_order;
    r["scores"] = json::array();
    for (double s : o.scores) r["scores"].push_back(std::isfinite(s) ? json(s) : json(nullptr));
    r["score_kind"] = is_map_rule(o.rule) ? "log_marginal_likelihood" : "criterion";
    r["seed"] = o.seed;
    r["samples"] = o.samples;
    if (!result.mc_std_error_log[k].empty()) r["mc_std_error_log"] = result.mc_std_error_log[k];
    rules.push_back(std::move(r));
  }
  j["rules"] = std::move(rules);
  return j;
}

json diagnostics_to_json(const DiagnosticsReport& report) {
  json j;
  j["config"] = config_to_json(report.config);
  j["N"] = report.N;
  json orders = json::array();
  for (const auto& od : report.orders) {
    json o;
    o["order"] = od.order;
    o["mu"] = od.mu;
    o["rho"] = od.rho;
    o["uniform_ellipsoid_acceptance"] = od.uniform_ellipsoid_acceptance;
    o["truncated_gaussian_acceptance"] = od.truncated_gaussian_acceptance;
    o["coverage"] = od.coverage ? json(*od.coverage) : json(nullptr);
    if (od.error) o["error"] = *od.error;
    orders.push_back(std::move(o));
  }
  j["orders"] = std::move(orders);
  return j;
}

std::vector<std::filesystem::path> write_report(const ExperimentReport& report,
                                                const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& body) {
    const auto path = out_dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::kInvalidArgument, "cannot write " + path.string());
    out << body;
    written.push_back(path);
  };
  emit("histogram.csv", histogram_csv(report));
  if (report.config.experiment == ExperimentKind::kFig3) {
    emit("avg_prob.csv", avg_prob_csv(report));
  } else {
    emit("prob_correct.csv", prob_correct_csv(report));
  }
  emit("report.json", report_to_json(report).dump(2) + "\n");
  return written;
}

}  // namespace mcsel
