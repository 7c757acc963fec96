#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ice/channel.hpp"
#include "ice/errors.hpp"
#include "ice/harness.hpp"
#include "ice/sat.hpp"
#include "verify.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> snr_db;
};

void add_common(CLI::App* cmd, CommonOptions& options) {
  cmd->add_option("--config", options.config_path, "scenario config JSON file");
  cmd->add_option("--seed", options.seed, "master seed (overrides the config)");
  cmd->add_option("--snr-db", options.snr_db, "SNR in dB (overrides the config)");
}

ice::ScenarioConfig load_config(const CommonOptions& options, bool scenario1_default = false) {
  ice::ScenarioConfig config = options.config_path.empty()
                                   ? (scenario1_default ? ice::ScenarioConfig::scenario1_defaults() : ice::ScenarioConfig{})
                                   : ice::ScenarioConfig::from_json_file(options.config_path);
  if (options.seed) config.seed = *options.seed;
  if (options.snr_db) config.snr_db = *options.snr_db;
  return config;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ice::ConfigError("cannot write " + path.string());
  out << content;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ','))
    if (!item.empty()) items.push_back(item);
  return items;
}

int run_simulate(const ice::ScenarioConfig& config, int k, int trials, const std::string& out_dir) {
  const ice::Constellation constellation = ice::make_constellation(config.constellation, config.normalize);
  const ice::NoiseSpec noise = ice::NoiseSpec::isotropic(config.sigma2(), config.d);
  nlohmann::json doc;
  doc["config"] = nlohmann::json::parse(config.to_json());
  auto& prompts = doc["prompts"] = nlohmann::json::array();
  for (int t = 0; t < trials; ++t) {
    ice::Rng rng(ice::substream_seed(config.seed, static_cast<std::uint64_t>(t)));
    const ice::Prompt prompt = ice::sample_prompt(config, k, constellation, noise, rng);
    nlohmann::json row;
    row["theta"] = prompt.realization.theta;
    if (prompt.realization.alpha) row["alpha"] = *prompt.realization.alpha;
    row["s"] = prompt.s_seq;
    auto& ys = row["y"] = nlohmann::json::array();
    for (const auto& y : prompt.y_seq) ys.push_back(std::vector<double>(y.data(), y.data() + y.size()));
    row["y_query"] = std::vector<double>(prompt.y_query.data(), prompt.y_query.data() + prompt.y_query.size());
    row["s_query"] = prompt.s_query_truth;
    prompts.push_back(std::move(row));
  }
  write_file(fs::path(out_dir) / "prompts.json", doc.dump(2) + "\n");
  std::cout << "wrote " << (fs::path(out_dir) / "prompts.json").string() << "\n";
  return 0;
}

int run_evaluate(const ice::ScenarioConfig& config, const std::string& estimators, int k_max, int trials,
                 bool independent, const std::string& weights_path, const std::string& out_dir) {
  ice::EvalOptions options;
  options.k_max = k_max;
  options.n_trials = trials;
  options.independent_prompts = independent;
  if (!weights_path.empty()) {
    std::ifstream in(weights_path);
    if (!in) throw ice::ConfigError("cannot open weights file: " + weights_path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    options.sat_weights = ice::AttentionWeights::from_json(buffer.str()).w;
  }
  const auto results = ice::evaluate_curve(config, split_list(estimators), options);
  write_file(fs::path(out_dir) / "evaluate.csv", ice::eval_results_to_csv(results));
  std::cout << "wrote " << (fs::path(out_dir) / "evaluate.csv").string() << "\n";
  return 0;
}

int run_train(const ice::ScenarioConfig& config, const ice::TrainConfig& train_config, const std::string& out_dir) {
  ice::Rng rng(config.seed);
  const ice::TrainResult result = ice::train(config, train_config, rng);
  const ice::Constellation constellation = ice::make_constellation(config.constellation, config.normalize);
  const ice::AttentionWeights weights{result.w};
  write_file(fs::path(out_dir) / "weights.json",
             weights.to_json(constellation.size(), ice::train_config_to_json(train_config), config.seed) + "\n");
  write_file(fs::path(out_dir) / "trace.csv", ice::trace_to_csv(result.trace));
  std::cout << "wrote " << (fs::path(out_dir) / "weights.json").string() << " and "
            << (fs::path(out_dir) / "trace.csv").string() << "\n";
  if (!result.trace.empty()) std::cout << "final eval cross-entropy: " << result.trace.back().eval_ce << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"in-context symbol estimation over simulated SIMO channels"};
  app.require_subcommand(1);

  CommonOptions sim_common, eval_common, train_common;
  int sim_kmax = 8, sim_trials = 100;
  std::string sim_out = "out";
  auto* simulate = app.add_subcommand("simulate", "sample prompt datasets to a JSON file");
  add_common(simulate, sim_common);
  simulate->add_option("--kmax", sim_kmax, "context length of each prompt");
  simulate->add_option("--trials", sim_trials, "number of prompts");
  simulate->add_option("--out", sim_out, "output directory");

  std::string eval_estimators = "ca-post,cu-post,sat,sat-limit";
  int eval_kmax = 10, eval_trials = 10000;
  bool eval_independent = false;
  std::string eval_out = "out", eval_weights;
  auto* evaluate = app.add_subcommand("evaluate", "run the Monte Carlo estimator curves, write CSV");
  add_common(evaluate, eval_common);
  evaluate->add_option("--estimators", eval_estimators,
                       "comma list from {ca-post,cu-post,cu-post-h-mmse,cu-post-h-lmmse,sat,sat-limit}");
  evaluate->add_option("--kmax", eval_kmax, "largest context length");
  evaluate->add_option("--trials", eval_trials, "Monte Carlo trials per curve");
  evaluate->add_flag("--independent-prompts", eval_independent, "redraw prompts per k instead of prefix truncation");
  evaluate->add_option("--weights", eval_weights, "trained attention weights JSON for the sat estimators");
  evaluate->add_option("--out", eval_out, "output directory");

  ice::TrainConfig train_config;
  std::string train_out = "out";
  std::string train_init = "zero";
  auto* train = app.add_subcommand("train-sat", "train the single-layer softmax-attention estimator");
  add_common(train, train_common);
  train->add_option("--context-len", train_config.context_len, "prompt length N");
  train->add_option("--epochs", train_config.epochs, "gradient steps (one fresh batch each)");
  train->add_option("--batch-size", train_config.batch_size, "prompts per step");
  train->add_option("--lr", train_config.learning_rate, "learning rate");
  train->add_option("--eval-prompts", train_config.eval_prompts, "held-out prompt count");
  train->add_option("--init", train_init, "initialization: zero | scaled_identity");
  train->add_option("--out", train_out, "output directory");

  std::uint64_t verify_seed = 0;
  auto* verify = app.add_subcommand("verify", "run the invariant/theorem suite");
  verify->add_option("--seed", verify_seed, "seed for the randomized checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(load_config(sim_common), sim_kmax, sim_trials, sim_out);
    if (evaluate->parsed())
      return run_evaluate(load_config(eval_common), eval_estimators, eval_kmax, eval_trials, eval_independent,
                          eval_weights, eval_out);
    if (train->parsed()) {
      if (train_init == "scaled_identity")
        train_config.init = ice::TrainConfig::Init::ScaledIdentity;
      else if (train_init != "zero")
        throw ice::ConfigError("unknown init: " + train_init);
      return run_train(load_config(train_common, /*scenario1_default=*/true), train_config, train_out);
    }
    if (verify->parsed()) return ice::run_verify(verify_seed, std::cout) == 0 ? 0 : 1;
  } catch (const ice::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ice::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
