#pragma once

#include <utility>

#include "ice/errors.hpp"
#include "ice/numeric.hpp"
#include "ice/types.hpp"

namespace ice {

// Probability vector over symbol indices, kept in the log domain.
class Posterior {
 public:
  // Normalizes arbitrary log weights (entries may be -inf); the normalized
  // log probabilities are floored at log(1e-300) so every entry is finite.
  static Posterior from_log_weights(const Vec& log_weights) {
    const double lse = log_sum_exp(log_weights);
    if (!std::isfinite(lse)) throw NumericalError("Posterior: log weights do not normalize");
    return Posterior((log_weights.array() - lse).max(kLogFloor).matrix());
  }

  const Vec& log_probs() const { return log_probs_; }
  Vec probs() const { return log_probs_.array().exp(); }
  double log_prob(int i) const { return log_probs_(i); }
  double prob(int i) const { return std::exp(log_probs_(i)); }
  int size() const { return static_cast<int>(log_probs_.size()); }

  // Argmax with ties broken toward the lowest index.
  int map_index() const {
    int best = 0;
    for (int i = 1; i < size(); ++i)
      if (log_probs_(i) > log_probs_(best)) best = i;
    return best;
  }

 private:
  explicit Posterior(Vec log_probs) : log_probs_(std::move(log_probs)) {}
  Vec log_probs_;
};

}  // namespace ice
