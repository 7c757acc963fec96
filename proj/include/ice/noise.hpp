#pragma once

#include "ice/rng.hpp"
#include "ice/types.hpp"

namespace ice {

// Complex noise CN(0, Sigma_tilde) with Sigma_tilde = 2 sigma^2 I_d by
// default; the real lift is Sigma_z = (1/2) diag(Sigma_tilde, Sigma_tilde),
// which reduces to sigma^2 I_{2d} in the isotropic case.
class NoiseSpec {
 public:
  static NoiseSpec isotropic(double sigma2, int d);
  static NoiseSpec from_complex_cov(const Mat& sigma_tilde);

  int d() const { return d_; }
  bool isotropic_form() const { return isotropic_; }
  double sigma2() const;  // per-real-component variance; requires the isotropic form

  const Mat& sigma_tilde() const { return sigma_tilde_; }
  const Mat& sigma_tilde_inv() const { return sigma_tilde_inv_; }
  const Mat& sigma_real() const { return sigma_real_; }
  const Mat& sigma_real_inv() const { return sigma_real_inv_; }

  // One draw from N(0, Sigma_z).
  Vec sample(Rng& rng) const;

 private:
  NoiseSpec() = default;

  int d_ = 0;
  bool isotropic_ = false;
  double sigma2_ = 0.0;
  Mat sigma_tilde_, sigma_tilde_inv_;
  Mat sigma_real_, sigma_real_inv_;
  Mat chol_;  // lower factor of Sigma_z, used for sampling
};

// SNR(linear) = 1 / sigma^2.
inline double snr_db_to_sigma2(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

}  // namespace ice
