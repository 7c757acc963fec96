#pragma once

#include <span>
#include <string>
#include <vector>

#include "ice/channel.hpp"
#include "ice/posterior.hpp"

namespace ice {

// Token columns u_n = [y_n; e_{s_n}] for the context and u_N = [y_q; 0] for
// the query, a (2d + S) x (k + 1) matrix.
struct TokenMatrix {
  Mat u;
  int d = 0;
  int s = 0;

  int context_len() const { return static_cast<int>(u.cols()) - 1; }
  Vec y_of(int n) const { return u.col(n).head(2 * d); }
  Vec label_of(int n) const { return u.col(n).tail(s); }
};

TokenMatrix make_token_matrix(const Prompt& prompt, int num_symbols);

// The single trained parameter W = W_Q^T W_K of the softmax-attention
// estimator (W_V is pinned to the identity on the label block).
struct AttentionWeights {
  Mat w;

  std::string to_json(int num_symbols, const std::string& train_config_json = "{}", std::uint64_t seed = 0) const;
  static AttentionWeights from_json(const std::string& text);
};

struct SatOptions {
  // With the query self term the attention denominator also contains
  // exp(y_q^T W y_q); the group masses then sum to less than one and the
  // posterior is renormalized before scoring, which restores the
  // self-term-free value exactly.
  bool include_query_self_term = false;
};

// Raw per-symbol attention masses sum_{n: s_n = i} attn_n (no renormalization).
Vec sat_group_masses(const Prompt& prompt, const Mat& w, int num_symbols, SatOptions options = {});

// Finite-N estimator p^N_i = sum_{n: s_n = i} softmax_n(y_q^T W y_n) over the
// context examples, in the log domain. Requires k >= 1.
Posterior sat_posterior(const Prompt& prompt, const Mat& w, int num_symbols, SatOptions options = {});

// Asymptotic estimator p_i proportional to rho_i exp(y_q^T W H x_i).
Posterior sat_posterior_limit(const Vec& y_q, const Mat& h_lift, const Mat& w, const Constellation& constellation);

// Mean of -log p^N_{s_q} over the batch; posterior mass is floored at 1e-300
// before the log.
double cross_entropy_loss(std::span<const Prompt> batch, const Mat& w, int num_symbols, SatOptions options = {});

// Exact gradient of cross_entropy_loss in W.
Mat loss_gradient(std::span<const Prompt> batch, const Mat& w, int num_symbols, SatOptions options = {});

// Checks -log p_i at the blend lambda W1 + (1-lambda) W2 against the chord,
// for every i, with 1e-9 slack; p is the asymptotic posterior.
bool convexity_probe(const Vec& y_q, const Mat& h_lift, const Mat& w1, const Mat& w2, double lambda,
                     const Constellation& constellation);

struct TrainConfig {
  int context_len = 700;
  int epochs = 1000;
  int batch_size = 128;
  double learning_rate = 0.2;
  enum class Init { Zero, ScaledIdentity } init = Init::Zero;
  int eval_prompts = 512;
  SatOptions sat;
};

struct TraceRow {
  int epoch = 0;
  double train_ce = 0.0;
  double eval_ce = 0.0;
};

struct TrainResult {
  Mat w;
  std::vector<TraceRow> trace;
};

std::string trace_to_csv(const std::vector<TraceRow>& trace);
std::string train_config_to_json(const TrainConfig& train_config);

// Plain gradient descent on fresh prompt batches, one batch per epoch, with
// the learning rate halved whenever the held-out cross-entropy increases.
// Deterministic given the rng seed.
TrainResult train(const ScenarioConfig& config, const TrainConfig& train_config, Rng& rng);

}  // namespace ice
