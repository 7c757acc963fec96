#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ice/baselines.hpp"
#include "ice/sat.hpp"

namespace ice {

// True when the posterior argmax equals s_true; ties break to the lowest index.
bool map_accuracy(const Posterior& posterior, int s_true);

struct EvalCell {
  int k = 0;
  bool present = false;  // absent when the estimator is inapplicable (SAT at k = 0)
  double ce_mean = 0.0;
  double ce_ci90 = 0.0;
  double acc_pct = 0.0;
  int trials = 0;
};

struct EvalResult {
  std::string estimator;
  std::vector<EvalCell> cells;
};

struct EvalOptions {
  int k_max = 10;
  int n_trials = 10000;
  bool independent_prompts = false;  // default: prefix truncation of one long prompt
  int threads = 0;                   // 0: ICE_THREADS env var, then hardware concurrency
  std::optional<Mat> sat_weights;    // W for sat / sat-limit; defaults to Sigma_z^-1
};

const std::vector<std::string>& known_estimators();

// Monte Carlo evaluation of the named estimators over context lengths
// 0..k_max. Per trial one prompt of length k_max is drawn and scored at every
// k through prefix truncation (the pair at index k becomes the query);
// independent_prompts redraws per k instead. Trials are seeded by index from
// config.seed, so results do not depend on the worker count.
std::vector<EvalResult> evaluate_curve(const ScenarioConfig& config, const std::vector<std::string>& estimators,
                                       const EvalOptions& options);

// CSV with header "estimator,k,ce_mean,ce_ci90,acc_pct,trials"; cross-entropy
// columns are in nats. Absent cells are skipped.
std::string eval_results_to_csv(const std::vector<EvalResult>& results);

}  // namespace ice
