#pragma once

#include <vector>

#include "ice/channel.hpp"
#include "ice/oracle.hpp"

namespace ice {

// Stacked linear system y_full = X_full(i) h + z_full behind the posterior
// baselines. Scenario 1 stacks M^d(x_{s_n}) vertically over a constant
// h in R^{2d}; Scenario 2 puts them on the block diagonal over
// h_full in R^{2d(k+1)}. Both are time-major in blocks of 2d.
struct StackedSystem {
  ScenarioKind kind = ScenarioKind::Scenario1;
  int d = 0;
  int k = 0;
  Vec y_full;                 // 2d(k+1)
  std::vector<int> s_past;    // k symbol indices
  std::vector<Mat2> a_past;   // 2x2 symbol blocks of the past examples

  Vec y_past() const { return y_full.head(2 * d * k); }
  Vec y_at(int n) const { return y_full.segment(2 * d * n, 2 * d); }
};

StackedSystem build_stacked_system(const Prompt& prompt, const Constellation& constellation, ScenarioKind kind);

// log N(v; 0, cov) via Cholesky, with one 1e-10 jitter retry; no explicit
// inverse is formed.
double gaussian_logpdf(const Vec& v, const Mat& cov);

struct LogLikelihood {
  double value = 0.0;
  bool converged = true;  // quadrature met its tolerance before the node cap
};

// Scenario 1, theta = 0: log of the angle-of-arrival marginal likelihood
//   l0(i) = int_(0,pi] (1/pi) prod_n N(y_n; H_alpha x_n, sigma^2 I) dalpha,
// trapezoid quadrature with node doubling from quad_nodes up to 2^16 and a
// 1e-6 relative stopping rule, accumulated in the log domain.
LogLikelihood scenario1_l0(const StackedSystem& sys, int candidate, const NoiseSpec& noise,
                           const Constellation& constellation, int quad_nodes = 256);

// Scenario 1, theta = 1: log N(y_full; 0, 1/2 X_full(i) X_full(i)^T + sigma^2 I).
double scenario1_l1(const StackedSystem& sys, int candidate, const NoiseSpec& noise, const Constellation& constellation);

// Scenario 2: log N(y_full; 0, X_full(i) (R_theta kron I_2d) X_full(i)^T + sigma^2 I).
double scenario2_ltheta(const StackedSystem& sys, int candidate, double theta, const NoiseSpec& noise,
                        const Constellation& constellation, const ClarkeConstants& constants);

// Per-latent log-likelihood table log l_theta(i) for every candidate symbol,
// plus the (uniform) latent log prior.
struct LatentLikelihoods {
  std::vector<double> thetas;
  Mat log_l;                      // S x |Theta|
  double latent_log_prior = 0.0;  // log f(theta), uniform over thetas
};

LatentLikelihoods latent_likelihoods(const Prompt& prompt, const ScenarioConfig& config, const NoiseSpec& noise,
                                     const Constellation& constellation);

// Context-aware posterior: log p_i = log rho_i + log l_theta(i), normalized.
Posterior ca_post(const Prompt& prompt, double theta_true, const ScenarioConfig& config, const NoiseSpec& noise,
                  const Constellation& constellation);

// Context-unaware posterior: the latent is marginalized under its prior,
// log p_i = log rho_i + logsumexp_theta(log f(theta) + log l_theta(i)).
Posterior cu_post(const Prompt& prompt, const ScenarioConfig& config, const NoiseSpec& noise,
                  const Constellation& constellation);

struct ChannelEstimate {
  Vec h;                   // real 2d-vector [Re; Im]
  bool from_prior = false; // k = 0: prior mean, the estimate carries no data
};

// Linear estimate of the channel at index k from y_past given the (k+1)x(k+1)
// latent correlation matrix r (r(n,m) = E[h_n h_m] per real component):
//   h_hat = R_hy R_yy^-1 y_past,
//   R_hy = (r[k, 0:k-1] kron I_2d) X_past^T,
//   R_yy = X_past (r[0:k-1, 0:k-1] kron I_2d) X_past^T + sigma^2 I.
ChannelEstimate h_linear_estimate(const StackedSystem& sys, const Mat& r, double sigma2);

// The same estimate with r built from Clarke's model at the given theta.
ChannelEstimate h_mmse_given_theta(const StackedSystem& sys, double theta, const NoiseSpec& noise,
                                   const ClarkeConstants& constants);

// Posterior-over-theta mixture of the per-theta estimates, weights
// proportional to f(theta) N(y_past; 0, R_yy(theta)).
ChannelEstimate h_mmse(const StackedSystem& sys, const std::vector<double>& latent_values, const NoiseSpec& noise,
                       const ClarkeConstants& constants);

// LMMSE with the latent-averaged correlation (1/|Theta|) sum_theta R_theta.
ChannelEstimate h_lmmse(const StackedSystem& sys, const std::vector<double>& latent_values, const NoiseSpec& noise,
                        const ClarkeConstants& constants);

// true_posterior on the lift of h_hat (first d entries Re, last d entries Im).
Posterior point_estimate_posterior(const Vec& y_q, const Vec& h_hat, const NoiseSpec& noise,
                                   const Constellation& constellation);

}  // namespace ice
