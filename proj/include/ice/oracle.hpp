#pragma once

#include "ice/constellation.hpp"
#include "ice/noise.hpp"
#include "ice/posterior.hpp"
#include "ice/types.hpp"

namespace ice {

// Exact symbol posterior given the realized channel lift H:
//   log p_i = log rho_i + y^T Sigma_z^-1 H x_i - (1/2) x_i^T H^T Sigma_z^-1 H x_i,
// normalized in the log domain. The quadratic term is kept so that
// non-constant-modulus sets (16-QAM) are handled.
Posterior true_posterior(const Vec& y_q, const Mat& h_lift, const NoiseSpec& noise, const Constellation& constellation);

// Conditional-mean symbol estimate sum_i x_i p_i.
Vec2 mmse_symbol(const Vec& y_q, const Mat& h_lift, const NoiseSpec& noise, const Constellation& constellation);

// gamma = h_I^T Sigma_tilde^-1 h_I + h_Q^T Sigma_tilde^-1 h_Q, which equals
// the diagonal of (1/2) H^T Sigma_z^-1 H.
double instantaneous_snr(const CVec& h, const NoiseSpec& noise);

// tanh(y^T Sigma_eps^-1 h): the conditional mean of x in {-1, +1} given
// y = h x + eps. Cross-check target for the antipodal specialization of
// true_posterior.
double binary_tanh_estimate(const Vec& y, const Vec& h, const Mat& sigma_eps);

}  // namespace ice
