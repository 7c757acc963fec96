#include "ice/baselines.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "ice/errors.hpp"
#include "ice/numeric.hpp"

namespace ice {
namespace {

Eigen::LLT<Mat> robust_llt(Mat cov, const char* what) {
  Eigen::LLT<Mat> llt(cov);
  if (llt.info() == Eigen::Success) return llt;
  cov.diagonal().array() += 1e-10;
  llt.compute(cov);
  if (llt.info() == Eigen::Success) return llt;
  std::ostringstream msg;
  msg << what << ": covariance factorization failed after jitter (rows=" << cov.rows()
      << ", diag min=" << cov.diagonal().minCoeff() << ", diag max=" << cov.diagonal().maxCoeff() << ")";
  throw NumericalError(msg.str());
}

const Mat2& block_at(const StackedSystem& sys, const Mat2& a_candidate, int n) {
  return n < sys.k ? sys.a_past[static_cast<std::size_t>(n)] : a_candidate;
}

// Covariance of the stacked observation: block (n, m) is
// r(n, m) * (A_n A_m^T kron I_d), plus sigma^2 on the diagonal. Covers both
// scenarios: Scenario 1 uses r = 1/2 * ones (time-invariant channel of
// per-component power 1/2), Scenario 2 uses the Clarke Toeplitz correlations.
Mat stacked_covariance(const StackedSystem& sys, const Mat2& a_candidate, const Mat& r, double sigma2) {
  const int d = sys.d;
  const int n_len = sys.k + 1;
  Mat cov = Mat::Zero(2 * d * n_len, 2 * d * n_len);
  for (int n = 0; n < n_len; ++n) {
    for (int m = 0; m < n_len; ++m) {
      const Mat2 b = r(n, m) * (block_at(sys, a_candidate, n) * block_at(sys, a_candidate, m).transpose());
      for (int bi = 0; bi < 2; ++bi)
        for (int bj = 0; bj < 2; ++bj)
          cov.block(2 * d * n + bi * d, 2 * d * m + bj * d, d, d).diagonal().array() += b(bi, bj);
    }
  }
  cov.diagonal().array() += sigma2;
  return cov;
}

// Same block structure restricted to the k past observations.
Mat past_covariance(const StackedSystem& sys, const Mat& r, double sigma2) {
  const int d = sys.d;
  const int k = sys.k;
  Mat cov = Mat::Zero(2 * d * k, 2 * d * k);
  for (int n = 0; n < k; ++n) {
    for (int m = 0; m < k; ++m) {
      const Mat2 b = r(n, m) * (sys.a_past[static_cast<std::size_t>(n)] * sys.a_past[static_cast<std::size_t>(m)].transpose());
      for (int bi = 0; bi < 2; ++bi)
        for (int bj = 0; bj < 2; ++bj)
          cov.block(2 * d * n + bi * d, 2 * d * m + bj * d, d, d).diagonal().array() += b(bi, bj);
    }
  }
  cov.diagonal().array() += sigma2;
  return cov;
}

Mat clarke_corr_matrix(double theta, int n_len, const ClarkeConstants& constants) {
  Mat r(n_len, n_len);
  for (int i = 0; i < n_len; ++i)
    for (int j = 0; j <= i; ++j) r(i, j) = r(j, i) = clarke_autocovariance(theta, i - j, constants);
  return r;
}

Vec scenario_log_likelihoods(const StackedSystem& sys, double theta, const ScenarioConfig& config, const NoiseSpec& noise,
                             const Constellation& constellation) {
  Vec ll(constellation.size());
  for (int i = 0; i < constellation.size(); ++i) {
    if (config.kind == ScenarioKind::Scenario1) {
      if (theta == 0.0)
        ll(i) = scenario1_l0(sys, i, noise, constellation).value;
      else if (theta == 1.0)
        ll(i) = scenario1_l1(sys, i, noise, constellation);
      else
        throw ConfigError("Scenario 1 latent values must be 0 or 1");
    } else {
      ll(i) = scenario2_ltheta(sys, i, theta, noise, constellation, config.clarke_constants);
    }
  }
  return ll;
}

}  // namespace

StackedSystem build_stacked_system(const Prompt& prompt, const Constellation& constellation, ScenarioKind kind) {
  StackedSystem sys;
  sys.kind = kind;
  sys.d = static_cast<int>(prompt.y_query.size()) / 2;
  sys.k = prompt.k;
  sys.y_full.resize(2 * sys.d * (sys.k + 1));
  for (int n = 0; n < sys.k; ++n) {
    sys.y_full.segment(2 * sys.d * n, 2 * sys.d) = prompt.y_seq[static_cast<std::size_t>(n)];
    sys.s_past.push_back(prompt.s_seq[static_cast<std::size_t>(n)]);
    sys.a_past.push_back(symbol_block(constellation.lifted(prompt.s_seq[static_cast<std::size_t>(n)])));
  }
  sys.y_full.tail(2 * sys.d) = prompt.y_query;
  return sys;
}

double gaussian_logpdf(const Vec& v, const Mat& cov) {
  const Eigen::Index m = cov.rows();
  if (cov.cols() != m || v.size() != m) throw ConfigError("gaussian_logpdf: dimension mismatch");
  const auto llt = robust_llt(cov, "gaussian_logpdf");
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) log_det += std::log(llt.matrixLLT()(i, i));
  log_det *= 2.0;
  const Vec w = llt.matrixL().solve(v);
  return -0.5 * (static_cast<double>(m) * std::log(2.0 * std::numbers::pi) + log_det + w.squaredNorm());
}

LogLikelihood scenario1_l0(const StackedSystem& sys, int candidate, const NoiseSpec& noise,
                           const Constellation& constellation, int quad_nodes) {
  if (quad_nodes < 64) throw ConfigError("scenario1_l0: quad_nodes must be >= 64");
  const int d = sys.d;
  const int k = sys.k;
  const double sigma2 = noise.sigma2();

  std::vector<CVec> y_tilde;
  y_tilde.reserve(static_cast<std::size_t>(k) + 1);
  std::vector<Complex> x_tilde;
  x_tilde.reserve(static_cast<std::size_t>(k) + 1);
  for (int n = 0; n <= k; ++n) {
    y_tilde.push_back(complex_from_lift(sys.y_at(n)));
    const int s = n < k ? sys.s_past[static_cast<std::size_t>(n)] : candidate;
    x_tilde.push_back(constellation.points()[static_cast<std::size_t>(s)]);
  }

  const double log_norm = -static_cast<double>(k + 1) * d * std::log(2.0 * std::numbers::pi * sigma2);
  const auto log_integrand = [&](double alpha) {
    const CVec h = los_channel(alpha, d);
    double q = 0.0;
    for (int n = 0; n <= k; ++n) q += (y_tilde[static_cast<std::size_t>(n)] - x_tilde[static_cast<std::size_t>(n)] * h).squaredNorm();
    return -std::log(std::numbers::pi) + log_norm - q / (2.0 * sigma2);
  };

  // trapezoid on [0, pi], accumulated through logsumexp of node weights
  const auto estimate = [&](int nodes) {
    const int panels = nodes - 1;
    const double step = std::numbers::pi / panels;
    Vec lw(nodes);
    for (int j = 0; j < nodes; ++j) {
      const double weight = (j == 0 || j == panels) ? 0.5 * step : step;
      lw(j) = log_integrand(j * step) + std::log(weight);
    }
    return log_sum_exp(lw);
  };

  int nodes = quad_nodes;
  double prev = estimate(nodes);
  while (2 * nodes <= 65536) {
    nodes *= 2;
    const double current = estimate(nodes);
    const bool done = std::abs(current - prev) < 1e-6;
    prev = current;
    if (done) return {current, true};
  }
  return {prev, false};
}

double scenario1_l1(const StackedSystem& sys, int candidate, const NoiseSpec& noise, const Constellation& constellation) {
  const Mat r = Mat::Constant(sys.k + 1, sys.k + 1, 0.5);
  const Mat cov = stacked_covariance(sys, symbol_block(constellation.lifted(candidate)), r, noise.sigma2());
  return gaussian_logpdf(sys.y_full, cov);
}

double scenario2_ltheta(const StackedSystem& sys, int candidate, double theta, const NoiseSpec& noise,
                        const Constellation& constellation, const ClarkeConstants& constants) {
  const Mat r = clarke_corr_matrix(theta, sys.k + 1, constants);
  const Mat cov = stacked_covariance(sys, symbol_block(constellation.lifted(candidate)), r, noise.sigma2());
  return gaussian_logpdf(sys.y_full, cov);
}

LatentLikelihoods latent_likelihoods(const Prompt& prompt, const ScenarioConfig& config, const NoiseSpec& noise,
                                     const Constellation& constellation) {
  const StackedSystem sys = build_stacked_system(prompt, constellation, config.kind);
  LatentLikelihoods table;
  table.thetas = config.latent_values;
  table.latent_log_prior = -std::log(static_cast<double>(config.latent_values.size()));
  table.log_l.resize(constellation.size(), static_cast<Eigen::Index>(config.latent_values.size()));
  for (std::size_t t = 0; t < config.latent_values.size(); ++t)
    table.log_l.col(static_cast<Eigen::Index>(t)) =
        scenario_log_likelihoods(sys, config.latent_values[t], config, noise, constellation);
  if (!table.log_l.allFinite()) throw NumericalError("latent_likelihoods: non-finite log-likelihood entry");
  return table;
}

Posterior ca_post(const Prompt& prompt, double theta_true, const ScenarioConfig& config, const NoiseSpec& noise,
                  const Constellation& constellation) {
  bool known = false;
  for (double v : config.latent_values) known = known || v == theta_true;
  if (!known) throw ConfigError("ca_post: theta_true is not in latent_values");
  const StackedSystem sys = build_stacked_system(prompt, constellation, config.kind);
  const Vec ll = scenario_log_likelihoods(sys, theta_true, config, noise, constellation);
  return Posterior::from_log_weights(constellation.log_priors() + ll);
}

Posterior cu_post(const Prompt& prompt, const ScenarioConfig& config, const NoiseSpec& noise,
                  const Constellation& constellation) {
  const LatentLikelihoods table = latent_likelihoods(prompt, config, noise, constellation);
  Vec lw(constellation.size());
  for (int i = 0; i < constellation.size(); ++i)
    lw(i) = constellation.log_priors()(i) + table.latent_log_prior + log_sum_exp(table.log_l.row(i));
  return Posterior::from_log_weights(lw);
}

ChannelEstimate h_linear_estimate(const StackedSystem& sys, const Mat& r, double sigma2) {
  const int d = sys.d;
  const int k = sys.k;
  if (k == 0) return {Vec::Zero(2 * d), true};
  const Mat r_yy = past_covariance(sys, r, sigma2);
  Mat r_hy = Mat::Zero(2 * d, 2 * d * k);
  for (int m = 0; m < k; ++m) {
    const Mat2 b = r(k, m) * sys.a_past[static_cast<std::size_t>(m)].transpose();
    for (int bi = 0; bi < 2; ++bi)
      for (int bj = 0; bj < 2; ++bj) r_hy.block(bi * d, 2 * d * m + bj * d, d, d).diagonal().array() += b(bi, bj);
  }
  const auto llt = robust_llt(r_yy, "h_linear_estimate");
  return {r_hy * llt.solve(sys.y_past()), false};
}

ChannelEstimate h_mmse_given_theta(const StackedSystem& sys, double theta, const NoiseSpec& noise,
                                   const ClarkeConstants& constants) {
  return h_linear_estimate(sys, clarke_corr_matrix(theta, sys.k + 1, constants), noise.sigma2());
}

ChannelEstimate h_mmse(const StackedSystem& sys, const std::vector<double>& latent_values, const NoiseSpec& noise,
                       const ClarkeConstants& constants) {
  if (latent_values.empty()) throw ConfigError("h_mmse: latent_values must be non-empty");
  if (sys.k == 0) return {Vec::Zero(2 * sys.d), true};
  const double log_prior = -std::log(static_cast<double>(latent_values.size()));
  const Eigen::Index m = static_cast<Eigen::Index>(latent_values.size());
  Vec log_w(m);
  std::vector<Vec> estimates;
  estimates.reserve(latent_values.size());
  for (Eigen::Index t = 0; t < m; ++t) {
    const Mat r = clarke_corr_matrix(latent_values[static_cast<std::size_t>(t)], sys.k + 1, constants);
    log_w(t) = log_prior + gaussian_logpdf(sys.y_past(), past_covariance(sys, r, noise.sigma2()));
    estimates.push_back(h_linear_estimate(sys, r, noise.sigma2()).h);
  }
  const double lse = log_sum_exp(log_w);
  Vec h = Vec::Zero(2 * sys.d);
  for (Eigen::Index t = 0; t < m; ++t) h += std::exp(log_w(t) - lse) * estimates[static_cast<std::size_t>(t)];
  return {h, false};
}

ChannelEstimate h_lmmse(const StackedSystem& sys, const std::vector<double>& latent_values, const NoiseSpec& noise,
                        const ClarkeConstants& constants) {
  if (latent_values.empty()) throw ConfigError("h_lmmse: latent_values must be non-empty");
  if (sys.k == 0) return {Vec::Zero(2 * sys.d), true};
  Mat r = Mat::Zero(sys.k + 1, sys.k + 1);
  for (double theta : latent_values) r += clarke_corr_matrix(theta, sys.k + 1, constants);
  r /= static_cast<double>(latent_values.size());
  return h_linear_estimate(sys, r, noise.sigma2());
}

Posterior point_estimate_posterior(const Vec& y_q, const Vec& h_hat, const NoiseSpec& noise,
                                   const Constellation& constellation) {
  return true_posterior(y_q, lift_complex_vector(complex_from_lift(h_hat)), noise, constellation);
}

}  // namespace ice
