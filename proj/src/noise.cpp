#include "ice/noise.hpp"

#include <cmath>

#include "ice/errors.hpp"

namespace ice {

NoiseSpec NoiseSpec::isotropic(double sigma2, int d) {
  if (!(sigma2 > 0.0) || d < 1) throw ConfigError("NoiseSpec: sigma2 must be positive and d >= 1");
  NoiseSpec n;
  n.d_ = d;
  n.isotropic_ = true;
  n.sigma2_ = sigma2;
  n.sigma_tilde_ = 2.0 * sigma2 * Mat::Identity(d, d);
  n.sigma_tilde_inv_ = Mat::Identity(d, d) / (2.0 * sigma2);
  n.sigma_real_ = sigma2 * Mat::Identity(2 * d, 2 * d);
  n.sigma_real_inv_ = Mat::Identity(2 * d, 2 * d) / sigma2;
  n.chol_ = std::sqrt(sigma2) * Mat::Identity(2 * d, 2 * d);
  return n;
}

NoiseSpec NoiseSpec::from_complex_cov(const Mat& sigma_tilde) {
  const Eigen::Index d = sigma_tilde.rows();
  if (d < 1 || sigma_tilde.cols() != d) throw ConfigError("NoiseSpec: sigma_tilde must be square");
  NoiseSpec n;
  n.d_ = static_cast<int>(d);
  n.isotropic_ = false;
  n.sigma_tilde_ = 0.5 * (sigma_tilde + sigma_tilde.transpose());
  n.sigma_real_ = Mat::Zero(2 * d, 2 * d);
  n.sigma_real_.topLeftCorner(d, d) = 0.5 * n.sigma_tilde_;
  n.sigma_real_.bottomRightCorner(d, d) = 0.5 * n.sigma_tilde_;
  Eigen::LLT<Mat> llt(n.sigma_real_);
  if (llt.info() != Eigen::Success) throw NumericalError("NoiseSpec: Sigma_z is not positive definite");
  n.chol_ = llt.matrixL();
  n.sigma_real_inv_ = llt.solve(Mat::Identity(2 * d, 2 * d));
  Eigen::LLT<Mat> llt_tilde(n.sigma_tilde_);
  if (llt_tilde.info() != Eigen::Success) throw NumericalError("NoiseSpec: Sigma_tilde is not positive definite");
  n.sigma_tilde_inv_ = llt_tilde.solve(Mat::Identity(d, d));
  return n;
}

double NoiseSpec::sigma2() const {
  if (!isotropic_) throw ConfigError("NoiseSpec: sigma2 is only defined for the isotropic form");
  return sigma2_;
}

Vec NoiseSpec::sample(Rng& rng) const {
  const Vec g = rng.normal_vec(2 * d_);
  if (isotropic_) return std::sqrt(sigma2_) * g;
  return chol_ * g;
}

}  // namespace ice
