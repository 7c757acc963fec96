#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ice/channel.hpp"
#include "ice/errors.hpp"
#include "oracles.hpp"

using namespace ice;

TEST_CASE("lift of a real unit scalar is the identity") {
  CVec h(1);
  h << Complex(1.0, 0.0);
  const Mat m = lift_complex_vector(h);
  CHECK(m(0, 0) == 1.0);
  CHECK(m(0, 1) == 0.0);
  CHECK(m(1, 0) == 0.0);
  CHECK(m(1, 1) == 1.0);
}

TEST_CASE("lift of i is the quarter rotation") {
  CVec h(1);
  h << Complex(0.0, 1.0);
  const Mat m = lift_complex_vector(h);
  CHECK(m(0, 0) == 0.0);
  CHECK(m(0, 1) == -1.0);
  CHECK(m(1, 0) == 1.0);
  CHECK(m(1, 1) == 0.0);
}

TEST_CASE("lift at d=2 expands blockwise") {
  CVec h(2);
  h << Complex(1.0, 2.0), Complex(3.0, -1.0);
  const Mat m = lift_complex_vector(h);
  Mat expected(4, 2);
  expected << 1, -2, 3, 1, 2, 1, -1, 3;
  CHECK((m - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("embedding the unit symbol gives the identity") {
  const Mat m = embed_symbol_matrix(Vec2(1.0, 0.0), 2);
  CHECK((m - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("embedding 1+i at d=1") {
  const Mat m = embed_symbol_matrix(Vec2(1.0, 1.0), 1);
  Mat expected(2, 2);
  expected << 1, -1, 1, 1;
  CHECK((m - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("embedding reproduces complex multiplication") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const CVec h = testing::random_cvec(rng, 3);
    const Complex x(rng.normal(), rng.normal());
    const CVec product = h * x;
    const Vec via_embed = embed_symbol_matrix(Vec2(x.real(), x.imag()), 3) * real_lift(h);
    CHECK((via_embed - real_lift(product)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("lift and embed are compatible") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 5);
    const CVec h = testing::random_cvec(rng, d);
    const Vec2 x(rng.normal(), rng.normal());
    const Vec a = lift_complex_vector(h) * x;
    const Vec b = embed_symbol_matrix(x, d) * real_lift(h);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("constellation invariants") {
  const Constellation qpsk = Constellation::qpsk();
  CHECK(qpsk.size() == 4);
  CHECK(std::abs(qpsk.priors().sum() - 1.0) < 1e-12);
  CHECK(qpsk.constant_modulus());
  for (int i = 0; i < 4; ++i) {
    CHECK(qpsk.lifted(i)(0) == qpsk.points()[static_cast<std::size_t>(i)].real());
    CHECK(qpsk.lifted(i)(1) == qpsk.points()[static_cast<std::size_t>(i)].imag());
    CHECK(qpsk.lifted(i).norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  }

  const Constellation unit = Constellation::qpsk(true);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(unit.lifted(i).norm() - 1.0) < 1e-15);

  const Constellation qam = Constellation::qam16();
  CHECK(qam.size() == 16);
  CHECK_FALSE(qam.constant_modulus());
  double power = 0.0;
  for (int i = 0; i < 16; ++i) power += qam.priors()(i) * qam.lifted(i).squaredNorm();
  CHECK(power == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(make_constellation("pam8", false), ConfigError);
}

TEST_CASE("noise spec shapes and inverses") {
  const NoiseSpec iso = NoiseSpec::isotropic(0.25, 3);
  CHECK(iso.sigma2() == 0.25);
  CHECK((iso.sigma_real() - 0.25 * Mat::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((iso.sigma_real() * iso.sigma_real_inv() - Mat::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((iso.sigma_tilde() - 0.5 * Mat::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(5);
  const NoiseSpec general = NoiseSpec::from_complex_cov(testing::random_spd(rng, 3));
  CHECK((general.sigma_real() * general.sigma_real_inv() - Mat::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(general.sigma2(), ConfigError);
  CHECK_THROWS_AS(NoiseSpec::isotropic(-1.0, 2), ConfigError);
}

TEST_CASE("LoS channel has unit modulus and broadside gives all ones") {
  Rng rng(7);
  const ChannelRealization realization = draw_channel_scenario1(0.0, 4, rng);
  REQUIRE(realization.alpha.has_value());
  for (int j = 0; j < 4; ++j) CHECK(std::abs(std::abs(realization.h_at(0)(j)) - 1.0) < 1e-14);

  const CVec broadside = los_channel(std::numbers::pi / 2.0, 4);
  for (int j = 0; j < 4; ++j) CHECK(std::abs(broadside(j) - Complex(1.0, 0.0)) < 1e-14);
}

TEST_CASE("Rayleigh components have variance one half") {
  Rng rng(8);
  const int trials = 100000;
  double mean = 0.0, mean_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    const ChannelRealization realization = draw_channel_scenario1(1.0, 2, rng);
    const double re = realization.h_at(0)(0).real();
    mean += re;
    mean_sq += re * re;
  }
  mean /= trials;
  mean_sq /= trials;
  const double variance = mean_sq - mean * mean;
  // var of a variance estimate of N(0, 1/2) is about 2 * 0.25 / n
  const double mc_sigma = std::sqrt(2.0 * 0.25 / trials);
  CHECK(std::abs(variance - 0.5) < 3.0 * mc_sigma);
}

TEST_CASE("unknown scenario-1 latent is rejected") {
  Rng rng(9);
  CHECK_THROWS_AS(draw_channel_scenario1(2.0, 2, rng), ConfigError);
}

TEST_CASE("Clarke autocovariance at lag zero is one") {
  const ClarkeConstants constants;
  CHECK(clarke_autocovariance(5.0, 0, constants) == 1.0);
  CHECK(clarke_autocovariance(30.0, 0, constants) == 1.0);
}

TEST_CASE("Clarke lag-1 value at theta=5 with default constants") {
  const ClarkeConstants constants;
  // J0(0.303687...) computed from the series oracle
  const double expected = testing::j0_series_30(2.0 * std::numbers::pi * 2.9e9 * 1e-3 * 5.0 / 3e8);
  CHECK(std::abs(expected - 0.9770760679794386) < 1e-12);
  CHECK(clarke_autocovariance(5.0, 1, constants) == doctest::Approx(0.97708).epsilon(1e-4));
  CHECK(std::abs(clarke_autocovariance(5.0, 1, constants) - expected) < 1e-13);
}

TEST_CASE("Clarke trajectories reproduce the lag-1 autocovariance") {
  const ClarkeConstants constants;
  Rng rng(10);
  const int trials = 100000;
  double acc = 0.0;
  for (int t = 0; t < trials; ++t) {
    const ChannelRealization r = draw_channel_scenario2(5.0, 1, 2, constants, rng);
    acc += r.h_complex[0](0).real() * r.h_complex[1](0).real();
  }
  acc /= trials;
  CHECK(std::abs(acc - clarke_autocovariance(5.0, 1, constants)) < 0.01);
}

TEST_CASE("Clarke components are independent across the 2d axes") {
  const ClarkeConstants constants;
  Rng rng(21);
  const int trials = 60000;
  Mat acc = Mat::Zero(4, 4);
  for (int t = 0; t < trials; ++t) {
    const ChannelRealization r = draw_channel_scenario2(15.0, 2, 1, constants, rng);
    const Vec lifted = real_lift(r.h_complex[0]);
    acc += lifted * lifted.transpose();
  }
  acc /= trials;
  const double bound = 3.0 / std::sqrt(static_cast<double>(trials));
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(acc(i, i) - 1.0) < 3.0 * std::sqrt(2.0 / trials));
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(std::abs(acc(i, j)) < bound);
  }
}

TEST_CASE("scenario-2 half-power flag rescales the process") {
  const ClarkeConstants constants;
  Rng a(33), b(33);
  const ChannelRealization full = draw_channel_scenario2(5.0, 2, 3, constants, a, false);
  const ChannelRealization half = draw_channel_scenario2(5.0, 2, 3, constants, b, true);
  for (int n = 0; n < 3; ++n)
    CHECK((full.h_complex[static_cast<std::size_t>(n)] * std::sqrt(0.5) - half.h_complex[static_cast<std::size_t>(n)])
              .cwiseAbs()
              .maxCoeff() < 1e-15);
}

TEST_CASE("scenario-2 guards") {
  const ClarkeConstants constants;
  Rng rng(3);
  CHECK_THROWS_AS(draw_channel_scenario2(-1.0, 2, 3, constants, rng), ConfigError);
  CHECK_THROWS_AS(draw_channel_scenario2(5.0, 2, 0, constants, rng), ConfigError);
}

TEST_CASE("zero-shot prompt has an empty context") {
  ScenarioConfig config;
  config.d = 2;
  const Constellation qpsk = Constellation::qpsk();
  const NoiseSpec noise = NoiseSpec::isotropic(config.sigma2(), config.d);
  Rng rng(17);
  const Prompt prompt = sample_prompt(config, 0, qpsk, noise, rng);
  CHECK(prompt.k == 0);
  CHECK(prompt.y_seq.empty());
  CHECK(prompt.s_seq.empty());
  CHECK(prompt.y_query.size() == 4);
}

TEST_CASE("vanishing noise keeps observations on the constellation image") {
  ScenarioConfig config = ScenarioConfig::scenario1_defaults();
  config.d = 2;
  config.latent_values = {0.0};
  const Constellation qpsk = Constellation::qpsk();
  const NoiseSpec noise = NoiseSpec::isotropic(1e-16, config.d);
  Rng rng(18);
  const Prompt prompt = sample_prompt(config, 6, qpsk, noise, rng);
  for (int n = 0; n < prompt.k; ++n) {
    const Vec clean = prompt.realization.H_at(n) * qpsk.lifted(prompt.s_seq[static_cast<std::size_t>(n)]);
    CHECK((prompt.y_seq[static_cast<std::size_t>(n)] - clean).norm() < 1e-6);
  }
}

TEST_CASE("prompts regenerate bit-identically from the seed") {
  ScenarioConfig config;
  config.d = 3;
  const Constellation qpsk = Constellation::qpsk();
  const NoiseSpec noise = NoiseSpec::isotropic(config.sigma2(), config.d);
  Rng a(99), b(99);
  const Prompt pa = sample_prompt(config, 7, qpsk, noise, a);
  const Prompt pb = sample_prompt(config, 7, qpsk, noise, b);
  CHECK(pa.realization.theta == pb.realization.theta);
  CHECK(pa.s_seq == pb.s_seq);
  CHECK(pa.s_query_truth == pb.s_query_truth);
  CHECK(pa.y_query == pb.y_query);
  for (int n = 0; n < 7; ++n) CHECK(pa.y_seq[static_cast<std::size_t>(n)] == pb.y_seq[static_cast<std::size_t>(n)]);
}

TEST_CASE("prefix view moves the pair at k to the query slot") {
  ScenarioConfig config;
  config.d = 2;
  const Constellation qpsk = Constellation::qpsk();
  const NoiseSpec noise = NoiseSpec::isotropic(config.sigma2(), config.d);
  Rng rng(55);
  const Prompt full = sample_prompt(config, 6, qpsk, noise, rng);
  const Prompt view = prefix_prompt(full, 4);
  CHECK(view.k == 4);
  CHECK(view.y_query == full.y_seq[4]);
  CHECK(view.s_query_truth == full.s_seq[4]);
  CHECK(view.s_seq == std::vector<int>(full.s_seq.begin(), full.s_seq.begin() + 4));
  const Prompt whole = prefix_prompt(full, 6);
  CHECK(whole.y_query == full.y_query);
  CHECK_THROWS_AS(prefix_prompt(full, 7), ConfigError);
}

TEST_CASE("scenario config JSON round trip and defaults") {
  ScenarioConfig config;
  CHECK(config.d == 4);
  CHECK(config.latent_values == std::vector<double>{5.0, 15.0, 30.0});
  CHECK(config.clarke_constants.f_carrier == 2.9e9);
  CHECK(config.clarke_constants.T_s == 1e-3);
  CHECK(config.clarke_constants.c == 3e8);

  config.kind = ScenarioKind::Scenario1;
  config.latent_values = {0.0, 1.0};
  config.snr_db = -5.0;
  config.seed = 1234567;
  config.normalize = true;
  const ScenarioConfig parsed = ScenarioConfig::from_json(config.to_json());
  CHECK(parsed.kind == ScenarioKind::Scenario1);
  CHECK(parsed.latent_values == config.latent_values);
  CHECK(parsed.snr_db == -5.0);
  CHECK(parsed.seed == 1234567);
  CHECK(parsed.normalize);
  CHECK(parsed.sigma2() == doctest::Approx(std::pow(10.0, 0.5)).epsilon(1e-15));

  CHECK_THROWS_AS(ScenarioConfig::from_json("{"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::from_json(R"({"kind":"Scenario3"})"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::from_json(R"({"latent_prior":"gaussian"})"), ConfigError);
}
