#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ice/constellation.hpp"
#include "ice/lifting.hpp"
#include "ice/noise.hpp"
#include "ice/rng.hpp"
#include "ice/types.hpp"

namespace ice {

enum class ScenarioKind { Scenario1, Scenario2 };

struct ClarkeConstants {
  double f_carrier = 2.9e9;  // Hz
  double T_s = 1e-3;         // s
  double c = 3e8;            // m/s
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Scenario2;
  int d = 4;
  std::vector<double> latent_values = {5.0, 15.0, 30.0};  // Scenario1 uses {0, 1}
  std::string latent_prior = "uniform";
  double snr_db = 0.0;
  ClarkeConstants clarke_constants;
  std::uint64_t seed = 0;

  // Symbol-set and power conventions, see README.
  std::string constellation = "qpsk";
  bool normalize = false;
  bool half_power_scenario2 = false;

  double sigma2() const { return snr_db_to_sigma2(snr_db); }

  static ScenarioConfig scenario1_defaults();

  std::string to_json() const;
  static ScenarioConfig from_json(const std::string& text);
  static ScenarioConfig from_json_file(const std::string& path);
};

// Latent draw: theta together with the per-index channel vectors and lifts.
struct ChannelRealization {
  double theta = 0.0;
  bool time_invariant = true;
  std::vector<CVec> h_complex;       // a single entry when time-invariant
  std::optional<double> alpha;       // angle of arrival under the LoS model

  const CVec& h_at(int n) const { return time_invariant ? h_complex.front() : h_complex.at(static_cast<std::size_t>(n)); }
  Mat H_at(int n) const { return lift_complex_vector(h_at(n)); }
};

// One-ray LoS steering vector at quarter-wavelength antenna spacing:
// h^j = exp(-i pi (j-1) cos(alpha) / 2).
CVec los_channel(double alpha, int d);

// Clarke autocovariance R_theta(k) = J0(2 pi f_carrier T_s k theta / c).
double clarke_autocovariance(double theta, int lag, const ClarkeConstants& constants);

// Lower Cholesky factor of the Toeplitz matrix [R_theta(|i-j|)], with one
// 1e-10 jitter retry before failing.
Mat clarke_toeplitz_chol(double theta, int n_len, const ClarkeConstants& constants);

ChannelRealization draw_channel_scenario1(double theta, int d, Rng& rng);
ChannelRealization draw_channel_scenario2(double theta, int d, int n_len, const ClarkeConstants& constants, Rng& rng,
                                          bool half_power = false);
ChannelRealization draw_channel(const ScenarioConfig& config, double theta, int n_len, Rng& rng);

double draw_latent(const ScenarioConfig& config, Rng& rng);

// N in-context pairs plus the held-out query at index k.
struct Prompt {
  int k = 0;
  std::vector<Vec> y_seq;
  std::vector<int> s_seq;
  Vec y_query;
  int s_query_truth = 0;
  ChannelRealization realization;
};

Prompt sample_prompt(const ScenarioConfig& config, int k, const Constellation& constellation, const NoiseSpec& noise,
                     Rng& rng);

// Prompt with a fixed time-invariant channel; used by the SAT convergence
// checks where H is pinned.
Prompt sample_prompt_fixed_channel(const CVec& h, int k, const Constellation& constellation, const NoiseSpec& noise,
                                   Rng& rng);

// Context length k <= full.k: the first k examples with the query moved to
// index k (the pair at k becomes the query).
Prompt prefix_prompt(const Prompt& full, int k);

}  // namespace ice
