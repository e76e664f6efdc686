#include "mcsel_cli/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mcsel/experiments.hpp"

namespace mcsel::cli {

namespace {

std::vector<Rule> parse_rule_list(const std::string& text) {
  std::vector<Rule> rules;
  std::stringstream ss(text);
  std::string name;
  while (std::getline(ss, name, ',')) {
    const auto rule = parse_rule(name);
    if (!rule) {
      throw Error(Errc::kConfigError,
                  "--rules: unknown rule '" + name + "'; valid rules: " + valid_rule_names());
    }
    rules.push_back(*rule);
  }
  if (rules.empty()) throw Error(Errc::kConfigError, "--rules: empty rule list");
  return rules;
}

ExperimentConfig load_with_overrides(const CliInvocation& inv) {
  ExperimentConfig config = load_config(inv.config_path);
  if (inv.seed) config.seed = inv.seed;
  if (inv.samples) config.samples = *inv.samples;
  if (inv.rules) config.rules = parse_rule_list(*inv.rules);
  if (inv.data_path) {
    if (config.data_path && std::filesystem::path(*config.data_path) != *inv.data_path) {
      throw Error(Errc::kConfigError, "--data conflicts with config field 'data_path' (" +
                                          *config.data_path + ")");
    }
    config.data_path = inv.data_path->string();
  }
  validate_config(config);
  resolve_seed(config);
  return config;
}

void write_json(const std::filesystem::path& dir, const std::string& name,
                const nlohmann::json& j) {
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw Error(Errc::kInvalidArgument, "cannot write " + (dir / name).string());
  f << j.dump(2) << '\n';
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigFailure;
  }
}

}  // namespace

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::kConfigError:
    case Errc::kPartitionTooLarge:
    case Errc::kInvalidArgument:
    case Errc::kDimensionMismatch: return kConfigFailure;
    case Errc::kFileNotFound:
    case Errc::kParseError: return kDataFailure;
    case Errc::kNotPositiveDefinite:
    case Errc::kEmptyInput:
    case Errc::kAcceptanceTooLow:
    case Errc::kEmptyCandidates:
    case Errc::kNumericalFailure: return kNumericalFailure;
  }
  return kNumericalFailure;
}

int cmd_select(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto config = load_with_overrides(inv);
    if (!config.data_path) {
      throw Error(Errc::kConfigError, "no dataset: pass --data or set config field 'data_path'");
    }
    const auto result = select_once(std::filesystem::path(*config.data_path), config);
    write_json(inv.out_dir, "selection.json", selection_to_json(result, config));
    out << "seed=" << *config.seed << " N=" << result.N << '\n';
    for (const auto& o : result.outcomes) {
      out << to_string(o.rule) << ": selected order " << o.selected_order << '\n';
    }
    return static_cast<int>(kOk);
  });
}

int cmd_experiment(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto config = load_with_overrides(inv);
    const auto report = run_experiment(config, inv.jobs);
    const auto files = write_report(report, inv.out_dir);
    out << "experiment=" << to_string(*config.experiment) << " seed=" << *config.seed
        << " wall_time_s=" << report.wall_time_seconds << '\n';
    for (const auto& f : files) out << "wrote " << f.string() << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_sample_diag(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto config = load_with_overrides(inv);
    const auto report = run_sampler_diagnostics(config, inv.jobs);
    write_json(inv.out_dir, "diagnostics.json", diagnostics_to_json(report));
    out << "seed=" << *config.seed << " N=" << report.N << '\n';
    for (const auto& od : report.orders) {
      out << "order " << od.order << ": mu=" << od.mu << " rho=" << od.rho
          << " ue_accept=" << od.uniform_ellipsoid_acceptance
          << " tg_accept=" << od.truncated_gaussian_acceptance;
      if (od.coverage) out << " coverage=" << *od.coverage;
      if (od.error) out << " error=" << *od.error;
      out << '\n';
    }
    return static_cast<int>(kOk);
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Polynomial order selection with Monte-Carlo marginal likelihoods", "mcsel"};
  app.require_subcommand(1);

  CliInvocation inv;
  std::string data;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", inv.config_path, "JSON config file")->required();
    sub->add_option("--out", inv.out_dir, "Output directory (created if absent)");
    sub->add_option("--seed", inv.seed, "Master seed (random when omitted)");
    sub->add_option("--jobs", inv.jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--samples", inv.samples, "Monte-Carlo samples M per estimate");
    sub->add_option("--rules", inv.rules, "Comma list of ub,bic,aic,ue,ueg,ge,ub-strat");
  };
  auto* select = app.add_subcommand("select", "Select the order for one dataset");
  add_common(select);
  select->add_option("--data", inv.data_path, "CSV dataset with header t,y");
  auto* experiment = app.add_subcommand("experiment", "Run a selection study");
  add_common(experiment);
  auto* diag = app.add_subcommand("sample-diag", "Report sampler acceptance and coverage");
  add_common(diag);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? static_cast<int>(kOk) : static_cast<int>(kConfigFailure);
  }

  if (select->parsed()) return cmd_select(inv, out, err);
  if (experiment->parsed()) return cmd_experiment(inv, out, err);
  return cmd_sample_diag(inv, out, err);
}

}  // namespace mcsel::cli
