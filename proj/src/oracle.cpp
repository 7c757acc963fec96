#include "ice/oracle.hpp"

#include <cmath>

#include "ice/errors.hpp"
#include "ice/lifting.hpp"

namespace ice {

Posterior true_posterior(const Vec& y_q, const Mat& h_lift, const NoiseSpec& noise, const Constellation& constellation) {
  const Mat t = noise.sigma_real_inv() * h_lift;       // 2d x 2
  const Eigen::RowVector2d linear = y_q.transpose() * t;
  const Mat2 quad = h_lift.transpose() * t;            // H^T Sigma_z^-1 H
  Vec lw(constellation.size());
  for (int i = 0; i < constellation.size(); ++i) {
    const Vec2& x = constellation.lifted(i);
    lw(i) = constellation.log_priors()(i) + linear * x - 0.5 * x.dot(quad * x);
  }
  return Posterior::from_log_weights(lw);
}

Vec2 mmse_symbol(const Vec& y_q, const Mat& h_lift, const NoiseSpec& noise, const Constellation& constellation) {
  const Posterior posterior = true_posterior(y_q, h_lift, noise, constellation);
  Vec2 estimate = Vec2::Zero();
  for (int i = 0; i < constellation.size(); ++i) estimate += posterior.prob(i) * constellation.lifted(i);
  return estimate;
}

double instantaneous_snr(const CVec& h, const NoiseSpec& noise) {
  const Vec h_i = h.real();
  const Vec h_q = h.imag();
  return h_i.dot(noise.sigma_tilde_inv() * h_i) + h_q.dot(noise.sigma_tilde_inv() * h_q);
}

double binary_tanh_estimate(const Vec& y, const Vec& h, const Mat& sigma_eps) {
  Eigen::LLT<Mat> llt(sigma_eps);
  if (llt.info() != Eigen::Success) throw NumericalError("binary_tanh_estimate: Sigma_eps is not positive definite");
  return std::tanh(y.dot(llt.solve(h)));
}

}  // namespace ice
