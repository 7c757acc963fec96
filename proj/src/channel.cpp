#include "ice/channel.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "ice/bessel.hpp"
#include "ice/errors.hpp"

namespace ice {

using nlohmann::json;

namespace {

std::string kind_name(ScenarioKind kind) {
  return kind == ScenarioKind::Scenario1 ? "Scenario1" : "Scenario2";
}

ScenarioKind kind_from_name(const std::string& name) {
  if (name == "Scenario1") return ScenarioKind::Scenario1;
  if (name == "Scenario2") return ScenarioKind::Scenario2;
  throw ConfigError("unknown scenario kind: " + name);
}

}  // namespace

ScenarioConfig ScenarioConfig::scenario1_defaults() {
  ScenarioConfig config;
  config.kind = ScenarioKind::Scenario1;
  config.latent_values = {0.0, 1.0};
  return config;
}

std::string ScenarioConfig::to_json() const {
  json j;
  j["kind"] = kind_name(kind);
  j["d"] = d;
  j["latent_values"] = latent_values;
  j["latent_prior"] = latent_prior;
  j["snr_db"] = snr_db;
  j["clarke_constants"] = {{"f_carrier", clarke_constants.f_carrier}, {"T_s", clarke_constants.T_s}, {"c", clarke_constants.c}};
  j["seed"] = seed;
  j["constellation"] = constellation;
  j["normalize"] = normalize;
  j["half_power_scenario2"] = half_power_scenario2;
  return j.dump(2);
}

ScenarioConfig ScenarioConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  ScenarioConfig config;
  try {
    if (j.contains("kind")) config.kind = kind_from_name(j["kind"].get<std::string>());
    if (config.kind == ScenarioKind::Scenario1 && !j.contains("latent_values")) config.latent_values = {0.0, 1.0};
    if (j.contains("d")) config.d = j["d"].get<int>();
    if (j.contains("latent_values")) config.latent_values = j["latent_values"].get<std::vector<double>>();
    if (j.contains("latent_prior")) config.latent_prior = j["latent_prior"].get<std::string>();
    if (j.contains("snr_db")) config.snr_db = j["snr_db"].get<double>();
    if (j.contains("clarke_constants")) {
      const auto& c = j["clarke_constants"];
      if (c.contains("f_carrier")) config.clarke_constants.f_carrier = c["f_carrier"].get<double>();
      if (c.contains("T_s")) config.clarke_constants.T_s = c["T_s"].get<double>();
      if (c.contains("c")) config.clarke_constants.c = c["c"].get<double>();
    }
    if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("constellation")) config.constellation = j["constellation"].get<std::string>();
    if (j.contains("normalize")) config.normalize = j["normalize"].get<bool>();
    if (j.contains("half_power_scenario2")) config.half_power_scenario2 = j["half_power_scenario2"].get<bool>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  if (config.d < 1) throw ConfigError("config: d must be >= 1");
  if (config.latent_prior != "uniform") throw ConfigError("config: only the uniform latent prior is supported");
  if (config.latent_values.empty()) throw ConfigError("config: latent_values must be non-empty");
  return config;
}

ScenarioConfig ScenarioConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

CVec los_channel(double alpha, int d) {
  CVec h(d);
  for (int j = 0; j < d; ++j) h(j) = std::polar(1.0, -std::numbers::pi * j * std::cos(alpha) / 2.0);
  return h;
}

double clarke_autocovariance(double theta, int lag, const ClarkeConstants& constants) {
  return bessel_j0(2.0 * std::numbers::pi * constants.f_carrier * constants.T_s * lag * theta / constants.c);
}

Mat clarke_toeplitz_chol(double theta, int n_len, const ClarkeConstants& constants) {
  Mat r(n_len, n_len);
  for (int i = 0; i < n_len; ++i)
    for (int j = 0; j <= i; ++j) r(i, j) = r(j, i) = clarke_autocovariance(theta, i - j, constants);
  Eigen::LLT<Mat> llt(r);
  if (llt.info() != Eigen::Success) {
    r += 1e-10 * Mat::Identity(n_len, n_len);
    llt.compute(r);
    if (llt.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "clarke_toeplitz_chol: Toeplitz matrix not positive definite after jitter (theta=" << theta
          << ", n_len=" << n_len << ")";
      throw NumericalError(msg.str());
    }
  }
  return llt.matrixL();
}

ChannelRealization draw_channel_scenario1(double theta, int d, Rng& rng) {
  if (d < 1) throw ConfigError("draw_channel_scenario1: d must be >= 1");
  ChannelRealization realization;
  realization.theta = theta;
  realization.time_invariant = true;
  if (theta == 0.0) {
    const double alpha = std::numbers::pi * rng.uniform();  // U((0, pi])
    realization.alpha = alpha;
    realization.h_complex.push_back(los_channel(alpha, d));
  } else if (theta == 1.0) {
    CVec h(d);
    const double s = std::sqrt(0.5);
    for (int j = 0; j < d; ++j) {
      const double re = s * rng.normal();
      const double im = s * rng.normal();
      h(j) = Complex(re, im);
    }
    realization.h_complex.push_back(h);
  } else {
    throw ConfigError("draw_channel_scenario1: theta must be 0 or 1");
  }
  return realization;
}

ChannelRealization draw_channel_scenario2(double theta, int d, int n_len, const ClarkeConstants& constants, Rng& rng,
                                          bool half_power) {
  if (!(theta > 0.0)) throw ConfigError("draw_channel_scenario2: theta must be positive");
  if (n_len < 1) throw ConfigError("draw_channel_scenario2: n_len must be >= 1");
  const Mat chol = clarke_toeplitz_chol(theta, n_len, constants);
  const double scale = half_power ? std::sqrt(0.5) : 1.0;

  // 2d independent unit-variance component processes: components 0..d-1 are
  // the real parts per antenna, d..2d-1 the imaginary parts.
  Mat components(n_len, 2 * d);
  for (int c = 0; c < 2 * d; ++c) components.col(c) = scale * (chol * rng.normal_vec(n_len));

  ChannelRealization realization;
  realization.theta = theta;
  realization.time_invariant = false;
  realization.h_complex.reserve(static_cast<std::size_t>(n_len));
  for (int n = 0; n < n_len; ++n) {
    CVec h(d);
    for (int j = 0; j < d; ++j) h(j) = Complex(components(n, j), components(n, d + j));
    realization.h_complex.push_back(std::move(h));
  }
  return realization;
}

ChannelRealization draw_channel(const ScenarioConfig& config, double theta, int n_len, Rng& rng) {
  if (config.kind == ScenarioKind::Scenario1) return draw_channel_scenario1(theta, config.d, rng);
  return draw_channel_scenario2(theta, config.d, n_len, config.clarke_constants, rng, config.half_power_scenario2);
}

double draw_latent(const ScenarioConfig& config, Rng& rng) {
  const auto m = config.latent_values.size();
  const Vec uniform = Vec::Constant(static_cast<Eigen::Index>(m), 1.0 / static_cast<double>(m));
  return config.latent_values[static_cast<std::size_t>(rng.categorical(uniform))];
}

namespace {

Prompt assemble_prompt(const ChannelRealization& realization, int k, const Constellation& constellation,
                       const NoiseSpec& noise, Rng& rng) {
  Prompt prompt;
  prompt.k = k;
  prompt.realization = realization;
  prompt.y_seq.reserve(static_cast<std::size_t>(k));
  prompt.s_seq.reserve(static_cast<std::size_t>(k));
  for (int n = 0; n <= k; ++n) {
    const int s = rng.categorical(constellation.priors());
    const Vec y = prompt.realization.H_at(n) * constellation.lifted(s) + noise.sample(rng);
    if (n < k) {
      prompt.s_seq.push_back(s);
      prompt.y_seq.push_back(y);
    } else {
      prompt.s_query_truth = s;
      prompt.y_query = y;
    }
  }
  return prompt;
}

}  // namespace

Prompt sample_prompt(const ScenarioConfig& config, int k, const Constellation& constellation, const NoiseSpec& noise,
                     Rng& rng) {
  if (k < 0) throw ConfigError("sample_prompt: k must be >= 0");
  const double theta = draw_latent(config, rng);
  const ChannelRealization realization = draw_channel(config, theta, k + 1, rng);
  return assemble_prompt(realization, k, constellation, noise, rng);
}

Prompt sample_prompt_fixed_channel(const CVec& h, int k, const Constellation& constellation, const NoiseSpec& noise,
                                   Rng& rng) {
  ChannelRealization realization;
  realization.time_invariant = true;
  realization.h_complex.push_back(h);
  return assemble_prompt(realization, k, constellation, noise, rng);
}

Prompt prefix_prompt(const Prompt& full, int k) {
  if (k < 0 || k > full.k) throw ConfigError("prefix_prompt: k out of range");
  if (k == full.k) return full;
  Prompt prompt;
  prompt.k = k;
  prompt.realization = full.realization;
  prompt.y_seq.assign(full.y_seq.begin(), full.y_seq.begin() + k);
  prompt.s_seq.assign(full.s_seq.begin(), full.s_seq.begin() + k);
  prompt.y_query = full.y_seq[static_cast<std::size_t>(k)];
  prompt.s_query_truth = full.s_seq[static_cast<std::size_t>(k)];
  return prompt;
}

}  // namespace ice
