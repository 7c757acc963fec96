#include "ice/sat.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ice/errors.hpp"
#include "ice/numeric.hpp"

namespace ice {

using nlohmann::json;

TokenMatrix make_token_matrix(const Prompt& prompt, int num_symbols) {
  const int d = static_cast<int>(prompt.y_query.size()) / 2;
  TokenMatrix tokens;
  tokens.d = d;
  tokens.s = num_symbols;
  tokens.u = Mat::Zero(2 * d + num_symbols, prompt.k + 1);
  for (int n = 0; n < prompt.k; ++n) {
    tokens.u.col(n).head(2 * d) = prompt.y_seq[static_cast<std::size_t>(n)];
    tokens.u(2 * d + prompt.s_seq[static_cast<std::size_t>(n)], n) = 1.0;
  }
  tokens.u.col(prompt.k).head(2 * d) = prompt.y_query;
  return tokens;
}

namespace {

struct SatScores {
  Vec group_lse;       // logsumexp of y_q^T W y_n within each symbol group
  double context_lse;  // logsumexp over all context scores
  double all_lse;      // context_lse plus the query self term when enabled
};

SatScores compute_scores(const Prompt& prompt, const Mat& w, int num_symbols, const SatOptions& options) {
  if (prompt.k < 1) throw ConfigError("SAT requires at least one example");
  const Vec v = w.transpose() * prompt.y_query;

  Vec scores(prompt.k);
  for (int n = 0; n < prompt.k; ++n) scores(n) = v.dot(prompt.y_seq[static_cast<std::size_t>(n)]);

  const double neg_inf = -std::numeric_limits<double>::infinity();
  Vec group_max = Vec::Constant(num_symbols, neg_inf);
  for (int n = 0; n < prompt.k; ++n) {
    const int s = prompt.s_seq[static_cast<std::size_t>(n)];
    if (scores(n) > group_max(s)) group_max(s) = scores(n);
  }
  Vec group_acc = Vec::Zero(num_symbols);
  for (int n = 0; n < prompt.k; ++n) {
    const int s = prompt.s_seq[static_cast<std::size_t>(n)];
    group_acc(s) += std::exp(scores(n) - group_max(s));
  }

  SatScores out;
  out.group_lse.resize(num_symbols);
  for (int i = 0; i < num_symbols; ++i)
    out.group_lse(i) = group_acc(i) > 0.0 ? group_max(i) + std::log(group_acc(i)) : neg_inf;
  out.context_lse = log_sum_exp(out.group_lse);
  out.all_lse = options.include_query_self_term ? log_sum_exp(out.context_lse, v.dot(prompt.y_query)) : out.context_lse;
  return out;
}

}  // namespace

Vec sat_group_masses(const Prompt& prompt, const Mat& w, int num_symbols, SatOptions options) {
  const SatScores scores = compute_scores(prompt, w, num_symbols, options);
  return (scores.group_lse.array() - scores.all_lse).exp();
}

Posterior sat_posterior(const Prompt& prompt, const Mat& w, int num_symbols, SatOptions options) {
  const SatScores scores = compute_scores(prompt, w, num_symbols, options);
  // Posterior renormalization cancels any query self term in the denominator.
  return Posterior::from_log_weights(scores.group_lse);
}

Posterior sat_posterior_limit(const Vec& y_q, const Mat& h_lift, const Mat& w, const Constellation& constellation) {
  const Eigen::RowVector2d scores = y_q.transpose() * w * h_lift;
  Vec lw(constellation.size());
  for (int i = 0; i < constellation.size(); ++i)
    lw(i) = constellation.log_priors()(i) + scores * constellation.lifted(i);
  return Posterior::from_log_weights(lw);
}

double cross_entropy_loss(std::span<const Prompt> batch, const Mat& w, int num_symbols, SatOptions options) {
  if (batch.empty()) throw ConfigError("cross_entropy_loss: empty batch");
  double acc = 0.0;
  for (const Prompt& prompt : batch) {
    const SatScores scores = compute_scores(prompt, w, num_symbols, options);
    const double log_p = std::max(scores.group_lse(prompt.s_query_truth) - scores.context_lse, kLogFloor);
    acc -= log_p;
  }
  return acc / static_cast<double>(batch.size());
}

Mat loss_gradient(std::span<const Prompt> batch, const Mat& w, int num_symbols, SatOptions options) {
  if (batch.empty()) throw ConfigError("loss_gradient: empty batch");
  const Eigen::Index dim = w.rows();
  Mat grad = Mat::Zero(dim, dim);
  Vec combo(dim);
  for (const Prompt& prompt : batch) {
    const SatScores scores = compute_scores(prompt, w, num_symbols, options);
    const int s_true = prompt.s_query_truth;
    // Floored prompts contribute a constant loss and hence a zero gradient.
    if (scores.group_lse(s_true) - scores.context_lse < kLogFloor) continue;
    const Vec v = w.transpose() * prompt.y_query;
    combo.setZero();
    for (int n = 0; n < prompt.k; ++n) {
      const Vec& y_n = prompt.y_seq[static_cast<std::size_t>(n)];
      const double a_n = v.dot(y_n);
      double c = std::exp(a_n - scores.context_lse);  // softmax over the context
      if (prompt.s_seq[static_cast<std::size_t>(n)] == s_true)
        c -= std::exp(a_n - scores.group_lse(s_true));  // softmax within the true group
      combo += c * y_n;
    }
    grad += prompt.y_query * combo.transpose();
  }
  return grad / static_cast<double>(batch.size());
}

bool convexity_probe(const Vec& y_q, const Mat& h_lift, const Mat& w1, const Mat& w2, double lambda,
                     const Constellation& constellation) {
  const Mat blend = lambda * w1 + (1.0 - lambda) * w2;
  const Posterior p_blend = sat_posterior_limit(y_q, h_lift, blend, constellation);
  const Posterior p1 = sat_posterior_limit(y_q, h_lift, w1, constellation);
  const Posterior p2 = sat_posterior_limit(y_q, h_lift, w2, constellation);
  for (int i = 0; i < constellation.size(); ++i) {
    const double lhs = -p_blend.log_prob(i);
    const double rhs = -lambda * p1.log_prob(i) - (1.0 - lambda) * p2.log_prob(i);
    if (lhs > rhs + 1e-9) return false;
  }
  return true;
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
  std::string out = "epoch,train_ce,eval_ce\n";
  char line[96];
  for (const TraceRow& row : trace) {
    std::snprintf(line, sizeof(line), "%d,%.10g,%.10g\n", row.epoch, row.train_ce, row.eval_ce);
    out += line;
  }
  return out;
}

namespace {

json train_config_json(const TrainConfig& tc) {
  return json{{"context_len", tc.context_len},
              {"epochs", tc.epochs},
              {"batch_size", tc.batch_size},
              {"learning_rate", tc.learning_rate},
              {"init", tc.init == TrainConfig::Init::Zero ? "zero" : "scaled_identity"},
              {"eval_prompts", tc.eval_prompts},
              {"include_query_self_term", tc.sat.include_query_self_term}};
}

}  // namespace

std::string AttentionWeights::to_json(int num_symbols, const std::string& train_config_text, std::uint64_t seed) const {
  json j;
  j["d"] = static_cast<int>(w.rows()) / 2;
  j["S"] = num_symbols;
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(w.size()));
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
  j["w"] = flat;
  try {
    j["train_config"] = json::parse(train_config_text);
  } catch (const json::exception&) {
    j["train_config"] = train_config_text;
  }
  j["seed"] = seed;
  return j.dump(2);
}

AttentionWeights AttentionWeights::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed weights JSON: ") + e.what());
  }
  if (!j.contains("d") || !j.contains("w")) throw ConfigError("weights JSON must contain d and w");
  const int d = j["d"].get<int>();
  const auto flat = j["w"].get<std::vector<double>>();
  if (d < 1 || flat.size() != static_cast<std::size_t>(4 * d * d)) throw ConfigError("weights JSON has inconsistent shape");
  AttentionWeights weights;
  weights.w.resize(2 * d, 2 * d);
  for (Eigen::Index r = 0; r < 2 * d; ++r)
    for (Eigen::Index c = 0; c < 2 * d; ++c) weights.w(r, c) = flat[static_cast<std::size_t>(2 * d * r + c)];
  if (!weights.w.allFinite()) throw ConfigError("weights JSON contains non-finite entries");
  return weights;
}

std::string train_config_to_json(const TrainConfig& tc) { return train_config_json(tc).dump(); }

TrainResult train(const ScenarioConfig& config, const TrainConfig& tc, Rng& rng) {
  if (tc.context_len < 1 || tc.batch_size < 1 || tc.epochs < 0 || tc.eval_prompts < 1 || !(tc.learning_rate >= 0.0))
    throw ConfigError("train: config values must be positive");
  const Constellation constellation = make_constellation(config.constellation, config.normalize);
  const NoiseSpec noise = NoiseSpec::isotropic(config.sigma2(), config.d);
  const int num_symbols = constellation.size();
  const Eigen::Index dim = 2 * config.d;

  Mat w = Mat::Zero(dim, dim);
  if (tc.init == TrainConfig::Init::ScaledIdentity) w = Mat::Identity(dim, dim) / static_cast<double>(dim);

  Rng eval_rng = rng.substream(0xFFFFFFFF00000001ull);
  std::vector<Prompt> eval_set;
  eval_set.reserve(static_cast<std::size_t>(tc.eval_prompts));
  for (int i = 0; i < tc.eval_prompts; ++i)
    eval_set.push_back(sample_prompt(config, tc.context_len, constellation, noise, eval_rng));

  TrainResult result;
  result.trace.reserve(static_cast<std::size_t>(tc.epochs));
  double lr = tc.learning_rate;
  double prev_eval = std::numeric_limits<double>::infinity();
  std::vector<Prompt> batch;
  batch.reserve(static_cast<std::size_t>(tc.batch_size));
  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    Rng batch_rng = rng.substream(static_cast<std::uint64_t>(epoch));
    batch.clear();
    for (int b = 0; b < tc.batch_size; ++b)
      batch.push_back(sample_prompt(config, tc.context_len, constellation, noise, batch_rng));

    const double train_ce = cross_entropy_loss(batch, w, num_symbols, tc.sat);
    if (!std::isfinite(train_ce)) {
      std::ostringstream msg;
      msg << "train: loss is not finite (learning_rate=" << lr << ", step=" << epoch << ")";
      throw NumericalError(msg.str());
    }
    w -= lr * loss_gradient(batch, w, num_symbols, tc.sat);

    const double eval_ce = cross_entropy_loss(eval_set, w, num_symbols, tc.sat);
    if (!std::isfinite(eval_ce)) {
      std::ostringstream msg;
      msg << "train: held-out loss is not finite (learning_rate=" << lr << ", step=" << epoch << ")";
      throw NumericalError(msg.str());
    }
    if (eval_ce > prev_eval) lr *= 0.5;
    prev_eval = eval_ce;
    result.trace.push_back({epoch, train_ce, eval_ce});
  }
  result.w = w;
  return result;
}

}  // namespace ice
