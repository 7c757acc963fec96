#include "ice/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "ice/errors.hpp"
#include "ice/numeric.hpp"

namespace ice {

bool map_accuracy(const Posterior& posterior, int s_true) { return posterior.map_index() == s_true; }

const std::vector<std::string>& known_estimators() {
  static const std::vector<std::string> names = {"ca-post", "cu-post", "cu-post-h-mmse", "cu-post-h-lmmse",
                                                 "sat",     "sat-limit", "uniform"};
  return names;
}

namespace {

struct CellScore {
  double ce = 0.0;
  bool correct = false;
  bool present = false;
};

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ICE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

class Scorer {
 public:
  Scorer(const ScenarioConfig& config, std::vector<std::string> estimators, const EvalOptions& options)
      : config_(config),
        estimators_(std::move(estimators)),
        options_(options),
        constellation_(make_constellation(config.constellation, config.normalize)),
        noise_(NoiseSpec::isotropic(config.sigma2(), config.d)) {
    for (const auto& name : estimators_) {
      if (std::find(known_estimators().begin(), known_estimators().end(), name) == known_estimators().end())
        throw ConfigError("unknown estimator: " + name);
      const bool needs_clarke = name == "cu-post-h-mmse" || name == "cu-post-h-lmmse";
      if (needs_clarke && config.kind != ScenarioKind::Scenario2)
        throw ConfigError("estimator " + name + " requires Scenario2 (Clarke correlations)");
    }
    sat_w_ = options_.sat_weights ? *options_.sat_weights : noise_.sigma_real_inv();
  }

  int num_estimators() const { return static_cast<int>(estimators_.size()); }

  // Scores for one trial, laid out estimator-major then k.
  std::vector<CellScore> run_trial(int trial) const {
    std::vector<CellScore> scores(static_cast<std::size_t>(num_estimators()) * (options_.k_max + 1));
    const std::uint64_t trial_seed = substream_seed(config_.seed, static_cast<std::uint64_t>(trial));
    Prompt full;
    if (!options_.independent_prompts) {
      Rng trial_rng(trial_seed);
      full = sample_prompt(config_, options_.k_max, constellation_, noise_, trial_rng);
    }
    for (int k = 0; k <= options_.k_max; ++k) {
      Prompt view;
      if (options_.independent_prompts) {
        Rng k_rng(substream_seed(trial_seed, static_cast<std::uint64_t>(k) + 1));
        view = sample_prompt(config_, k, constellation_, noise_, k_rng);
      } else {
        view = prefix_prompt(full, k);
      }
      for (int e = 0; e < num_estimators(); ++e) {
        const auto posterior = score(estimators_[static_cast<std::size_t>(e)], view, k);
        if (!posterior) continue;
        if (std::abs(log_sum_exp(posterior->log_probs())) > 1e-8)
          throw NumericalError("evaluate_curve: scored posterior does not normalize");
        CellScore& cell = scores[static_cast<std::size_t>(e) * (options_.k_max + 1) + static_cast<std::size_t>(k)];
        cell.present = true;
        cell.ce = -std::max(posterior->log_prob(view.s_query_truth), kLogFloor);
        cell.correct = map_accuracy(*posterior, view.s_query_truth);
      }
    }
    return scores;
  }

 private:
  std::optional<Posterior> score(const std::string& name, const Prompt& view, int k) const {
    if (name == "ca-post") return ca_post(view, view.realization.theta, config_, noise_, constellation_);
    if (name == "cu-post") return cu_post(view, config_, noise_, constellation_);
    if (name == "cu-post-h-mmse" || name == "cu-post-h-lmmse") {
      const StackedSystem sys = build_stacked_system(view, constellation_, config_.kind);
      const ChannelEstimate estimate = name == "cu-post-h-mmse"
                                           ? h_mmse(sys, config_.latent_values, noise_, config_.clarke_constants)
                                           : h_lmmse(sys, config_.latent_values, noise_, config_.clarke_constants);
      return point_estimate_posterior(view.y_query, estimate.h, noise_, constellation_);
    }
    if (name == "sat") {
      if (k < 1) return std::nullopt;  // inapplicable, the cell stays absent
      return sat_posterior(view, sat_w_, constellation_.size());
    }
    if (name == "sat-limit") return sat_posterior_limit(view.y_query, view.realization.H_at(k), sat_w_, constellation_);
    if (name == "uniform") return Posterior::from_log_weights(Vec::Zero(constellation_.size()));
    throw ConfigError("unknown estimator: " + name);
  }

  const ScenarioConfig& config_;
  std::vector<std::string> estimators_;
  const EvalOptions& options_;
  Constellation constellation_;
  NoiseSpec noise_;
  Mat sat_w_;
};

}  // namespace

std::vector<EvalResult> evaluate_curve(const ScenarioConfig& config, const std::vector<std::string>& estimators,
                                       const EvalOptions& options) {
  if (options.k_max < 0 || options.n_trials < 1) throw ConfigError("evaluate_curve: k_max >= 0 and n_trials >= 1 required");
  const Scorer scorer(config, estimators, options);
  const int n_cells = scorer.num_estimators() * (options.k_max + 1);

  std::vector<CellScore> all(static_cast<std::size_t>(options.n_trials) * n_cells);
  const int threads = std::min(resolve_threads(options.threads), options.n_trials);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (int t = next.fetch_add(1); t < options.n_trials; t = next.fetch_add(1)) {
        const auto scores = scorer.run_trial(t);
        std::copy(scores.begin(), scores.end(), all.begin() + static_cast<std::ptrdiff_t>(t) * n_cells);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(options.n_trials);
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& thread : pool) thread.join();
  if (failure) std::rethrow_exception(failure);

  // Deterministic reduction: accumulate in trial order per cell.
  std::vector<EvalResult> results;
  for (int e = 0; e < scorer.num_estimators(); ++e) {
    EvalResult result;
    result.estimator = estimators[static_cast<std::size_t>(e)];
    for (int k = 0; k <= options.k_max; ++k) {
      EvalCell cell;
      cell.k = k;
      double sum = 0.0;
      int n = 0;
      int n_correct = 0;
      for (int t = 0; t < options.n_trials; ++t) {
        const CellScore& s = all[static_cast<std::size_t>(t) * n_cells + static_cast<std::size_t>(e) * (options.k_max + 1) +
                                 static_cast<std::size_t>(k)];
        if (!s.present) continue;
        sum += s.ce;
        n_correct += s.correct ? 1 : 0;
        ++n;
      }
      if (n > 0) {
        cell.present = true;
        cell.trials = n;
        cell.ce_mean = sum / n;
        double ss = 0.0;
        for (int t = 0; t < options.n_trials; ++t) {
          const CellScore& s = all[static_cast<std::size_t>(t) * n_cells +
                                   static_cast<std::size_t>(e) * (options.k_max + 1) + static_cast<std::size_t>(k)];
          if (!s.present) continue;
          const double dev = s.ce - cell.ce_mean;
          ss += dev * dev;
        }
        const double se = n > 1 ? std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n)) : 0.0;
        cell.ce_ci90 = 1.645 * se;
        cell.acc_pct = 100.0 * n_correct / n;
      }
      result.cells.push_back(cell);
    }
    results.push_back(std::move(result));
  }
  return results;
}

std::string eval_results_to_csv(const std::vector<EvalResult>& results) {
  std::string out = "# cross-entropy in nats; ce_ci90 = 1.645 * standard error\n";
  out += "estimator,k,ce_mean,ce_ci90,acc_pct,trials\n";
  char line[160];
  for (const EvalResult& result : results) {
    for (const EvalCell& cell : result.cells) {
      if (!cell.present) continue;
      std::snprintf(line, sizeof(line), "%s,%d,%.10g,%.10g,%.6g,%d\n", result.estimator.c_str(), cell.k, cell.ce_mean,
                    cell.ce_ci90, cell.acc_pct, cell.trials);
      out += line;
    }
  }
  return out;
}

}  // namespace ice
