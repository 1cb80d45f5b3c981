// wupd: command-line front end for weighted belief updating.
//
//   wupd update   --config scenario.json
//   wupd simulate --config scenario.json [--csv out.csv] [--json out.json]
//   wupd analyze  --config pair.json
//   wupd verify   [--seed 42] [--trials 100]
//   wupd fit      --input data.json [--search-box 0.05,5,0.05,5]
//
// Exit status: 0 success, 1 verification or fit failure, 2 invalid config or I/O error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wupd/wupd.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kBadInput = 2;

struct Paths {
  std::string config;
  std::string csv;
  std::string json;
};

void apply_overrides(wupd::OutputConfig& outputs, const Paths& p) {
  if (!p.csv.empty()) outputs.csv = p.csv;
  if (!p.json.empty()) outputs.json = p.json;
}

int cmd_update(const Paths& p) {
  auto config = wupd::parse_scenario(wupd::read_json_file(p.config));
  apply_overrides(config.outputs, p);
  const auto result = wupd::run_update(config);
  wupd::write_outputs(config.outputs, result.csv, result.summary_json);
  if (!config.outputs.json) std::cout << result.summary_json;
  return kOk;
}

int cmd_simulate(const Paths& p) {
  auto config = wupd::parse_scenario(wupd::read_json_file(p.config));
  apply_overrides(config.outputs, p);
  const auto result = wupd::run_scenario(config);
  wupd::write_outputs(config.outputs, result.csv, result.summary_json);
  if (!config.outputs.csv) std::cout << result.csv;
  if (!config.outputs.json) std::cerr << result.summary_json;
  return kOk;
}

int cmd_analyze(const Paths& p) {
  auto config = wupd::parse_analyze(wupd::read_json_file(p.config));
  apply_overrides(config.outputs, p);
  const auto result = wupd::run_analyze(config);
  const std::string text = result.report.dump(2) + "\n";
  wupd::write_outputs(config.outputs, "", text);
  if (!config.outputs.json) std::cout << text;
  return result.theorems_hold ? kOk : kFailed;
}

int cmd_verify(const wupd::VerifyOptions& opts) {
  const auto report = wupd::verify_suite(opts);
  std::cout << wupd::render_text(report);
  return report.all_passed() ? kOk : kFailed;
}

int cmd_fit(const std::string& input, const std::string& box_text, const std::string& json_out) {
  const auto parsed = wupd::parse_fit_input(wupd::read_json_file(input));
  wupd::FitOptions opts;
  if (!box_text.empty()) {
    opts.box = wupd::parse_search_box(box_text);
  } else if (parsed.box) {
    opts.box = *parsed.box;
  }
  wupd::detail::check_box(opts.box);
  wupd::FitResult fit;
  try {
    fit = wupd::fit_weights(parsed.data, opts);
  } catch (const wupd::Error& e) {
    if (e.kind() == wupd::ErrorKind::SearchBoxInvalid) throw;
    std::cerr << "wupd fit: " << e.what() << "\n";
    return kFailed;
  }
  const wupd::Json out{{"alpha_hat", fit.alpha_hat},
                       {"beta_hat", fit.beta_hat},
                       {"log_likelihood", fit.log_likelihood},
                       {"grid_resolution_used", fit.grid_resolution_used},
                       {"evaluations", fit.evaluations}};
  const std::string text = out.dump(2) + "\n";
  if (json_out.empty()) {
    std::cout << text;
  } else {
    wupd::OutputConfig o;
    o.json = json_out;
    wupd::write_outputs(o, "", text);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted belief updating: scenarios, dispersion analysis, verification, weight fitting"};
  app.require_subcommand(1);

  Paths update_paths;
  auto* update = app.add_subcommand("update", "one-shot weighted posterior from a scenario config");
  update->add_option("-c,--config", update_paths.config, "scenario JSON")->required();
  update->add_option("--csv", update_paths.csv, "write the posterior density here");
  update->add_option("--json", update_paths.json, "write the summary here");

  Paths sim_paths;
  auto* simulate = app.add_subcommand("simulate", "run a learning scenario");
  simulate->add_option("-c,--config", sim_paths.config, "scenario JSON")->required();
  simulate->add_option("--csv", sim_paths.csv, "trajectory CSV path (default: stdout)");
  simulate->add_option("--json", sim_paths.json, "summary JSON path (default: stderr)");

  Paths analyze_paths;
  auto* analyze = app.add_subcommand("analyze", "relation, bounds and entropy ordering of two densities");
  analyze->add_option("-c,--config", analyze_paths.config, "analysis JSON")->required();
  analyze->add_option("--json", analyze_paths.json, "report path (default: stdout)");

  wupd::VerifyOptions vopts;
  std::uint64_t replay = 0;
  double gamma = 0.0;
  auto* verify = app.add_subcommand("verify", "randomized check of the dispersion theorems");
  verify->add_option("--seed", vopts.seed, "base seed")->capture_default_str();
  verify->add_option("--trials", vopts.trials, "number of trials")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  verify->add_option("--grid-points", vopts.grid_points, "points per continuous grid")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{3}, std::size_t{1} << 20));
  auto* replay_opt = verify->add_option("--replay", replay, "rerun one trial by its recorded seed");
  auto* gamma_opt = verify->add_option("--gamma", gamma, "force the exponent")->check(CLI::PositiveNumber);
  verify->add_flag("--corrupt", vopts.corrupt, "negative control: break order preservation");

  std::string fit_input;
  std::string fit_box;
  std::string fit_json;
  auto* fit = app.add_subcommand("fit", "estimate (alpha, beta) from reported beliefs");
  fit->add_option("-i,--input", fit_input, "fit input JSON")->required();
  fit->add_option("--search-box", fit_box, "alpha_min,alpha_max,beta_min,beta_max");
  fit->add_option("--json", fit_json, "result path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (*update) return cmd_update(update_paths);
    if (*simulate) return cmd_simulate(sim_paths);
    if (*analyze) return cmd_analyze(analyze_paths);
    if (*verify) {
      if (*replay_opt) vopts.replay_seed = replay;
      if (*gamma_opt) vopts.gamma_override = gamma;
      return cmd_verify(vopts);
    }
    if (*fit) return cmd_fit(fit_input, fit_box, fit_json);
  } catch (const std::exception& e) {
    std::cerr << "wupd: " << e.what() << "\n";
    return kBadInput;
  }
  return kBadInput;
}
