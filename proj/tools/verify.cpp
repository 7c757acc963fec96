#include "verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "ice/baselines.hpp"
#include "ice/bessel.hpp"
#include "ice/harness.hpp"
#include "ice/numeric.hpp"
#include "ice/oracle.hpp"
#include "ice/sat.hpp"

namespace ice {
namespace {

std::string fmt(const char* pattern, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), pattern, value);
  return buffer;
}

Mat random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  return m;
}

Mat random_spd(Rng& rng, Eigen::Index n) {
  const Mat a = random_matrix(rng, n, n, 1.0);
  return a * a.transpose() + 0.5 * Mat::Identity(n, n);
}

CVec random_cvec(Rng& rng, int d) {
  CVec h(d);
  for (int j = 0; j < d; ++j) h(j) = Complex(rng.normal(), rng.normal());
  return h;
}

double kl_divergence(const Posterior& p, const Posterior& q) {
  double kl = 0.0;
  for (int i = 0; i < p.size(); ++i) kl += p.prob(i) * (p.log_prob(i) - q.log_prob(i));
  return kl;
}

// --- independent reference routines -----------------------------------------

Posterior direct_bayes(const Vec& y, const Mat& h_lift, const Mat& sigma, const Constellation& c) {
  const Mat inv = sigma.inverse();
  Vec lw(c.size());
  for (int i = 0; i < c.size(); ++i) {
    const Vec r = y - h_lift * c.lifted(i);
    lw(i) = c.log_priors()(i) - 0.5 * r.dot(inv * r);
  }
  return Posterior::from_log_weights(lw);
}

double l0_reference(const StackedSystem& sys, int candidate, double sigma2, const Constellation& c, int nodes) {
  const int d = sys.d;
  std::vector<CVec> ys;
  std::vector<Complex> xs;
  for (int n = 0; n <= sys.k; ++n) {
    ys.push_back(complex_from_lift(sys.y_at(n)));
    xs.push_back(c.points()[static_cast<std::size_t>(n < sys.k ? sys.s_past[static_cast<std::size_t>(n)] : candidate)]);
  }
  const double log_norm = -static_cast<double>(sys.k + 1) * d * std::log(2.0 * std::numbers::pi * sigma2);
  const double step = std::numbers::pi / (nodes - 1);
  Vec lw(nodes);
  for (int j = 0; j < nodes; ++j) {
    const CVec h = los_channel(j * step, d);
    double q = 0.0;
    for (int n = 0; n <= sys.k; ++n) q += (ys[static_cast<std::size_t>(n)] - xs[static_cast<std::size_t>(n)] * h).squaredNorm();
    const double w = (j == 0 || j == nodes - 1) ? 0.5 * step : step;
    lw(j) = -std::log(std::numbers::pi) + log_norm - q / (2.0 * sigma2) + std::log(w);
  }
  return log_sum_exp(lw);
}

double l1_marginalization_reference(const StackedSystem& sys, int candidate, double sigma2, const Constellation& c) {
  // d = 1, k = 1: integrate the CN(0,1) channel over a [-8, 8]^2 grid.
  const int grid = 800;
  const double lo = -8.0, hi = 8.0;
  const double step = (hi - lo) / grid;
  std::vector<double> lw;
  lw.reserve(static_cast<std::size_t>(grid + 1) * (grid + 1));
  const Mat2 a0 = symbol_block(c.lifted(sys.s_past[0]));
  const Mat2 a1 = symbol_block(c.lifted(candidate));
  const Vec y0 = sys.y_at(0);
  const Vec y1 = sys.y_at(1);
  for (int i = 0; i <= grid; ++i) {
    const double hr = lo + i * step;
    const double wi = (i == 0 || i == grid) ? 0.5 : 1.0;
    for (int j = 0; j <= grid; ++j) {
      const double hi_ = lo + j * step;
      const double wj = (j == 0 || j == grid) ? 0.5 : 1.0;
      const Vec2 h(hr, hi_);
      // channel prior CN(0, 1): each real part N(0, 1/2)
      double lp = -std::log(std::numbers::pi) - (hr * hr + hi_ * hi_);
      lp += -std::log(2.0 * std::numbers::pi * sigma2) - (y0 - a0 * h).squaredNorm() / (2.0 * sigma2);
      lp += -std::log(2.0 * std::numbers::pi * sigma2) - (y1 - a1 * h).squaredNorm() / (2.0 * sigma2);
      lw.push_back(lp + std::log(wi * wj * step * step));
    }
  }
  return log_sum_exp(Eigen::Map<const Vec>(lw.data(), static_cast<Eigen::Index>(lw.size())));
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double ltheta_dense_reference(const StackedSystem& sys, int candidate, double theta, double sigma2,
                              const Constellation& c, const ClarkeConstants& constants) {
  const int d = sys.d;
  const int n_len = sys.k + 1;
  Mat x_full = Mat::Zero(2 * d * n_len, 2 * d * n_len);
  for (int n = 0; n < n_len; ++n) {
    const int s = n < sys.k ? sys.s_past[static_cast<std::size_t>(n)] : candidate;
    x_full.block(2 * d * n, 2 * d * n, 2 * d, 2 * d) = embed_symbol_matrix(c.lifted(s), d);
  }
  Mat r(n_len, n_len);
  for (int i = 0; i < n_len; ++i)
    for (int j = 0; j < n_len; ++j) r(i, j) = clarke_autocovariance(theta, std::abs(i - j), constants);
  const Mat cov = x_full * kron(r, Mat::Identity(2 * d, 2 * d)) * x_full.transpose() +
                  sigma2 * Mat::Identity(2 * d * n_len, 2 * d * n_len);
  const Mat inv = cov.inverse();
  const double logdet = std::log(cov.determinant());
  return -0.5 * (2.0 * d * n_len * std::log(2.0 * std::numbers::pi) + logdet + sys.y_full.dot(inv * sys.y_full));
}

Mat fd_gradient(const std::vector<Prompt>& batch, const Mat& w, int s) {
  Mat g(w.rows(), w.cols());
  const double step = 1e-5;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      Mat wp = w, wm = w;
      wp(i, j) += step;
      wm(i, j) -= step;
      g(i, j) = (cross_entropy_loss(batch, wp, s) - cross_entropy_loss(batch, wm, s)) / (2.0 * step);
    }
  }
  return g;
}

// -----------------------------------------------------------------------------

struct Report {
  int failures = 0;
  std::ostream& out;

  void check(const std::string& name, bool pass, const std::string& detail) {
    out << (pass ? "PASS " : "FAIL ") << name;
    if (!detail.empty()) out << "  (" << detail << ")";
    out << "\n";
    if (!pass) ++failures;
  }
};

}  // namespace

int run_verify(std::uint64_t seed, std::ostream& out) {
  Report report{0, out};
  Rng root(seed);

  {  // lift/embed compatibility
    Rng rng = root.substream(1);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const int d = 1 + static_cast<int>(rng.next_u64() % 5);
      const CVec h = random_cvec(rng, d);
      const Vec2 x(rng.normal(), rng.normal());
      worst = std::max(worst, (lift_complex_vector(h) * x - embed_symbol_matrix(x, d) * real_lift(h)).cwiseAbs().maxCoeff());
    }
    report.check("lift-embed-compatibility", worst < 1e-13, "max err " + fmt("%.3e", worst));
  }

  {  // Bessel J0 reference points
    const double j0_zero = std::abs(bessel_j0(2.404825557695773));
    const double j0_one = std::abs(bessel_j0(1.0) - 0.7651976865579666);
    const double j0_origin = std::abs(bessel_j0(0.0) - 1.0);
    const double seam = std::abs(bessel_j0(7.9999999) - bessel_j0(8.0000001));
    const bool pass = j0_zero < 1e-10 && j0_one < 1e-12 && j0_origin == 0.0 && seam < 1e-6;
    report.check("bessel-j0-reference", pass, "first zero " + fmt("%.3e", j0_zero));
  }

  {  // posterior normalization and floor
    Rng rng = root.substream(2);
    double worst = 0.0;
    bool finite = true;
    for (int trial = 0; trial < 100; ++trial) {
      Vec lw = random_matrix(rng, 6, 1, 50.0).col(0);
      if (trial % 3 == 0) lw(0) = -std::numeric_limits<double>::infinity();
      const Posterior p = Posterior::from_log_weights(lw);
      worst = std::max(worst, std::abs(p.probs().sum() - 1.0));
      finite = finite && p.log_probs().allFinite();
    }
    report.check("posterior-normalization", worst < 1e-12 && finite, "max |sum-1| " + fmt("%.3e", worst));
  }

  {  // true posterior vs direct Bayes density
    Rng rng = root.substream(3);
    const Constellation qpsk = Constellation::qpsk();
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const int d = 1 + static_cast<int>(rng.next_u64() % 3);
      const NoiseSpec noise = NoiseSpec::isotropic(1.0, d);
      const CVec h = random_cvec(rng, d);
      const Vec y = random_matrix(rng, 2 * d, 1, 1.5).col(0);
      const Posterior a = true_posterior(y, lift_complex_vector(h), noise, qpsk);
      const Posterior b = direct_bayes(y, lift_complex_vector(h), noise.sigma_real(), qpsk);
      worst = std::max(worst, (a.log_probs() - b.log_probs()).cwiseAbs().maxCoeff());
    }
    report.check("true-posterior-direct-bayes", worst < 1e-12, "max err " + fmt("%.3e", worst));
  }

  {  // binary antipodal specialization
    Rng rng = root.substream(4);
    const Constellation antipodal = Constellation::antipodal();
    double worst = 0.0;
    for (int trial = 0; trial < 2000; ++trial) {
      const int d = 1 + static_cast<int>(rng.next_u64() % 4);
      const NoiseSpec noise = NoiseSpec::from_complex_cov(random_spd(rng, d));
      const CVec h = random_cvec(rng, d);
      const Vec y = random_matrix(rng, 2 * d, 1, 1.0).col(0);
      const Posterior p = true_posterior(y, lift_complex_vector(h), noise, antipodal);
      const double diff = p.prob(0) - p.prob(1);
      const double tanh_value = binary_tanh_estimate(y, real_lift(h), noise.sigma_real());
      worst = std::max(worst, std::abs(diff - tanh_value));
    }
    report.check("binary-tanh-specialization", worst < 1e-12, "max err " + fmt("%.3e", worst));
  }

  {  // expressivity: KL(true || sat-limit at Sigma_z^-1) for QPSK
    Rng rng = root.substream(5);
    const Constellation qpsk = Constellation::qpsk();
    double worst = 0.0;
    for (int trial = 0; trial < 2000; ++trial) {
      const int d = 1 + static_cast<int>(rng.next_u64() % 4);
      const double sigma2 = std::exp(2.0 * rng.normal() * 0.5);
      const NoiseSpec noise = NoiseSpec::isotropic(sigma2, d);
      const CVec h = random_cvec(rng, d);
      const Vec y = random_matrix(rng, 2 * d, 1, 1.5).col(0);
      const Mat h_lift = lift_complex_vector(h);
      worst = std::max(worst, kl_divergence(true_posterior(y, h_lift, noise, qpsk),
                                            sat_posterior_limit(y, h_lift, noise.sigma_real_inv(), qpsk)));
    }
    report.check("expressivity-kl", worst < 1e-12, "max KL " + fmt("%.3e", worst));
  }

  {  // finite-N SAT approaches the limit on a fixed (H, y_q) instance
    Rng rng = root.substream(6);
    const Constellation qpsk = Constellation::qpsk(true);
    const int d = 2;
    const NoiseSpec noise = NoiseSpec::isotropic(1.0, d);
    CVec h(d);
    h << Complex(1.0, 0.5), Complex(-0.3, 0.8);
    const Mat h_lift = lift_complex_vector(h);
    const Vec y_q = h_lift * qpsk.lifted(0);
    const Posterior limit = sat_posterior_limit(y_q, h_lift, noise.sigma_real_inv(), qpsk);
    int good = 0;
    double worst = 0.0;
    for (int s = 0; s < 10; ++s) {
      Rng seed_rng = rng.substream(static_cast<std::uint64_t>(s));
      Prompt prompt = sample_prompt_fixed_channel(h, 50000, qpsk, noise, seed_rng);
      prompt.y_query = y_q;
      const Posterior finite = sat_posterior(prompt, noise.sigma_real_inv(), qpsk.size());
      const double err = (finite.probs() - limit.probs()).cwiseAbs().maxCoeff();
      worst = std::max(worst, err);
      if (err < 0.02) ++good;
    }
    report.check("sat-limit-convergence", good >= 9, "9/10 needed, got " + std::to_string(good) + ", worst " + fmt("%.3f", worst));
  }

  {  // pointwise convexity of the asymptotic per-sample loss
    Rng rng = root.substream(7);
    const Constellation qpsk = Constellation::qpsk();
    int pass = 0;
    const int total = 2000;
    for (int trial = 0; trial < total; ++trial) {
      const int d = 1 + static_cast<int>(rng.next_u64() % 3);
      const CVec h = random_cvec(rng, d);
      const Vec y = random_matrix(rng, 2 * d, 1, 1.0).col(0);
      const Mat w1 = random_matrix(rng, 2 * d, 2 * d, 0.7);
      const Mat w2 = random_matrix(rng, 2 * d, 2 * d, 0.7);
      if (convexity_probe(y, lift_complex_vector(h), w1, w2, rng.uniform(), qpsk)) ++pass;
    }
    report.check("convexity-probes", pass == total, std::to_string(pass) + "/" + std::to_string(total));
  }

  {  // analytic gradient vs central differences
    Rng rng = root.substream(8);
    const Constellation qpsk = Constellation::qpsk();
    const int d = 2;
    const NoiseSpec noise = NoiseSpec::isotropic(1.0, d);
    ScenarioConfig config = ScenarioConfig::scenario1_defaults();
    config.d = d;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Prompt> batch;
      for (int b = 0; b < 4; ++b) batch.push_back(sample_prompt(config, 12, qpsk, noise, rng));
      const Mat w = random_matrix(rng, 2 * d, 2 * d, 0.4);
      const Mat g = loss_gradient(batch, w, qpsk.size());
      const Mat fd = fd_gradient(batch, w, qpsk.size());
      const double rel = ((g - fd).cwiseAbs().array() / (fd.cwiseAbs().array() + g.cwiseAbs().array() + 1e-12)).maxCoeff();
      worst = std::max(worst, rel);
    }
    report.check("gradient-finite-differences", worst < 1e-6, "max rel err " + fmt("%.3e", worst));
  }

  {  // global minimizer of the asymptotic loss at Sigma_z^-1
    Rng rng = root.substream(9);
    const Constellation qpsk = Constellation::qpsk();
    const int d = 2;
    const NoiseSpec noise = NoiseSpec::isotropic(1.0, d);
    ScenarioConfig config = ScenarioConfig::scenario1_defaults();
    config.d = d;
    const int draws = 2000;
    std::vector<Vec> queries;
    std::vector<Mat> lifts;
    std::vector<int> truths;
    for (int t = 0; t < draws; ++t) {
      const Prompt prompt = sample_prompt(config, 0, qpsk, noise, rng);
      queries.push_back(prompt.y_query);
      lifts.push_back(prompt.realization.H_at(0));
      truths.push_back(prompt.s_query_truth);
    }
    const Mat w_star = noise.sigma_real_inv();
    bool all_pass = true;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 10; ++trial) {
      const Mat w = random_matrix(rng, 2 * d, 2 * d, 0.8);
      double mean = 0.0, mean_sq = 0.0;
      for (int t = 0; t < draws; ++t) {
        const double diff = -sat_posterior_limit(queries[t], lifts[t], w, qpsk).log_prob(truths[t]) +
                            sat_posterior_limit(queries[t], lifts[t], w_star, qpsk).log_prob(truths[t]);
        mean += diff;
        mean_sq += diff * diff;
      }
      mean /= draws;
      mean_sq /= draws;
      const double se = std::sqrt(std::max(mean_sq - mean * mean, 0.0) / draws);
      const double margin = mean + 3.0 * se;
      worst_margin = std::min(worst_margin, margin);
      all_pass = all_pass && margin >= 0.0;
    }
    report.check("global-minimizer", all_pass, "worst mean+3se " + fmt("%.3e", worst_margin));
  }

  {  // degenerate latent space: cu-post equals ca-post
    Rng rng = root.substream(10);
    ScenarioConfig config;
    config.d = 2;
    config.latent_values = {15.0};
    const Constellation qpsk = Constellation::qpsk();
    const NoiseSpec noise = NoiseSpec::isotropic(config.sigma2(), config.d);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const Prompt prompt = sample_prompt(config, 3, qpsk, noise, rng);
      const Posterior cu = cu_post(prompt, config, noise, qpsk);
      const Posterior ca = ca_post(prompt, 15.0, config, noise, qpsk);
      worst = std::max(worst, (cu.log_probs() - ca.log_probs()).cwiseAbs().maxCoeff());
    }
    report.check("cu-ca-degenerate-latent", worst < 1e-12, "max err " + fmt("%.3e", worst));
  }

  {  // Clarke trajectories reproduce J0 lags
    Rng rng = root.substream(11);
    const ClarkeConstants constants;
    const double theta = 5.0;
    const int n_len = 4;
    const int trials = 20000;
    Vec acc = Vec::Zero(n_len);
    for (int t = 0; t < trials; ++t) {
      const ChannelRealization realization = draw_channel_scenario2(theta, 1, n_len, constants, rng);
      const double first = realization.h_complex[0](0).real();
      for (int lag = 0; lag < n_len; ++lag) acc(lag) += first * realization.h_complex[static_cast<std::size_t>(lag)](0).real();
    }
    acc /= trials;
    double worst = 0.0;
    for (int lag = 0; lag < n_len; ++lag) worst = std::max(worst, std::abs(acc(lag) - clarke_autocovariance(theta, lag, constants)));
    report.check("clarke-lag-autocovariance", worst < 0.02, "max err " + fmt("%.3e", worst));
  }

  {  // Scenario 1 likelihoods vs references
    Rng rng = root.substream(12);
    ScenarioConfig config = ScenarioConfig::scenario1_defaults();
    config.d = 2;
    const Constellation qpsk = Constellation::qpsk();
    const NoiseSpec noise = NoiseSpec::isotropic(1.0, config.d);
    const Prompt prompt = sample_prompt(config, 2, qpsk, noise, rng);
    const StackedSystem sys = build_stacked_system(prompt, qpsk, ScenarioKind::Scenario1);
    double worst_l0 = 0.0;
    for (int i = 0; i < qpsk.size(); ++i) {
      const double approx = scenario1_l0(sys, i, noise, qpsk).value;
      const double reference = l0_reference(sys, i, 1.0, qpsk, 1 << 20);
      worst_l0 = std::max(worst_l0, std::abs(approx - reference));
    }
    report.check("l0-quadrature-reference", worst_l0 < 1e-6, "max err " + fmt("%.3e", worst_l0));

    ScenarioConfig config1 = ScenarioConfig::scenario1_defaults();
    config1.d = 1;
    const NoiseSpec noise1 = NoiseSpec::isotropic(1.0, 1);
    Rng rng1 = root.substream(13);
    const Prompt prompt1 = sample_prompt(config1, 1, qpsk, noise1, rng1);
    const StackedSystem sys1 = build_stacked_system(prompt1, qpsk, ScenarioKind::Scenario1);
    double worst_l1 = 0.0;
    for (int i = 0; i < qpsk.size(); ++i)
      worst_l1 = std::max(worst_l1, std::abs(scenario1_l1(sys1, i, noise1, qpsk) -
                                             l1_marginalization_reference(sys1, i, 1.0, qpsk)));
    report.check("l1-marginalization-reference", worst_l1 < 1e-5, "max err " + fmt("%.3e", worst_l1));
  }

  {  // Scenario 2 likelihood vs dense Kronecker assembly
    Rng rng = root.substream(14);
    ScenarioConfig config;
    config.d = 1;
    const Constellation qpsk = Constellation::qpsk();
    const NoiseSpec noise = NoiseSpec::isotropic(config.sigma2(), 1);
    const Prompt prompt = sample_prompt(config, 1, qpsk, noise, rng);
    const StackedSystem sys = build_stacked_system(prompt, qpsk, ScenarioKind::Scenario2);
    double worst = 0.0;
    for (int i = 0; i < qpsk.size(); ++i)
      worst = std::max(worst, std::abs(scenario2_ltheta(sys, i, 5.0, noise, qpsk, config.clarke_constants) -
                                       ltheta_dense_reference(sys, i, 5.0, 1.0, qpsk, config.clarke_constants)));
    report.check("ltheta-dense-assembly", worst < 1e-12, "max err " + fmt("%.3e", worst));
  }

  {  // channel estimators: surrogate recovery and degenerate cases
    Rng rng = root.substream(15);
    ScenarioConfig config;
    config.d = 2;
    config.latent_values = {5.0};
    const Constellation qpsk = Constellation::qpsk();
    const NoiseSpec tiny_noise = NoiseSpec::isotropic(1e-6, config.d);
    CVec h = random_cvec(rng, config.d);
    Prompt prompt;
    {
      Rng sub = rng.substream(1);
      prompt = sample_prompt_fixed_channel(h, 8, qpsk, tiny_noise, sub);
    }
    const StackedSystem sys = build_stacked_system(prompt, qpsk, ScenarioKind::Scenario2);
    const Mat ones = Mat::Ones(sys.k + 1, sys.k + 1);
    const double recovery = (h_linear_estimate(sys, ones, 1e-6).h - real_lift(h)).norm();

    const NoiseSpec noise = NoiseSpec::isotropic(1.0, config.d);
    Rng sub2 = rng.substream(2);
    const Prompt prompt2 = sample_prompt(config, 4, qpsk, noise, sub2);
    const StackedSystem sys2 = build_stacked_system(prompt2, qpsk, ScenarioKind::Scenario2);
    const double singleton = (h_mmse(sys2, {5.0}, noise, config.clarke_constants).h -
                              h_mmse_given_theta(sys2, 5.0, noise, config.clarke_constants).h)
                                 .norm();
    const NoiseSpec huge_noise = NoiseSpec::isotropic(1e12, config.d);
    const double prior_pull = h_lmmse(sys2, {5.0, 15.0}, huge_noise, config.clarke_constants).h.norm();
    const bool pass = recovery < 1e-2 && singleton < 1e-13 && prior_pull < 1e-6;
    report.check("channel-estimators", pass, "recovery " + fmt("%.3e", recovery));
  }

  {  // prompt regeneration determinism
    ScenarioConfig config;
    config.d = 2;
    const Constellation qpsk = Constellation::qpsk();
    const NoiseSpec noise = NoiseSpec::isotropic(config.sigma2(), config.d);
    Rng a(seed), b(seed);
    const Prompt pa = sample_prompt(config, 5, qpsk, noise, a);
    const Prompt pb = sample_prompt(config, 5, qpsk, noise, b);
    bool same = pa.s_query_truth == pb.s_query_truth && pa.y_query == pb.y_query && pa.s_seq == pb.s_seq;
    for (int n = 0; same && n < 5; ++n) same = pa.y_seq[static_cast<std::size_t>(n)] == pb.y_seq[static_cast<std::size_t>(n)];
    report.check("prompt-determinism", same, "");
  }

  {  // SAT at W = 0 returns the empirical label frequencies
    Rng rng = root.substream(16);
    ScenarioConfig config = ScenarioConfig::scenario1_defaults();
    config.d = 2;
    const Constellation qpsk = Constellation::qpsk();
    const NoiseSpec noise = NoiseSpec::isotropic(1.0, config.d);
    const Prompt prompt = sample_prompt(config, 40, qpsk, noise, rng);
    const Posterior p = sat_posterior(prompt, Mat::Zero(4, 4), qpsk.size());
    Vec freq = Vec::Zero(qpsk.size());
    for (int s : prompt.s_seq) freq(s) += 1.0 / prompt.k;
    const double err = (p.probs() - freq).cwiseAbs().maxCoeff();
    report.check("sat-zero-weight-frequencies", err < 1e-14, "max err " + fmt("%.3e", err));
  }

  {  // evaluate determinism across worker counts
    ScenarioConfig config;
    config.d = 2;
    config.seed = seed;
    EvalOptions options;
    options.k_max = 2;
    options.n_trials = 16;
    options.threads = 1;
    const auto csv1 = eval_results_to_csv(evaluate_curve(config, {"ca-post", "cu-post", "sat"}, options));
    options.threads = 3;
    const auto csv3 = eval_results_to_csv(evaluate_curve(config, {"ca-post", "cu-post", "sat"}, options));
    report.check("evaluate-thread-determinism", csv1 == csv3 && !csv1.empty(), "");
    const std::string header = "estimator,k,ce_mean,ce_ci90,acc_pct,trials";
    report.check("evaluate-csv-header", csv1.find(header) != std::string::npos, "");
  }

  out << "verify: " << (report.failures == 0 ? "all checks passed" : std::to_string(report.failures) + " check(s) failed")
      << "\n";
  return report.failures;
}

}  // namespace ice
