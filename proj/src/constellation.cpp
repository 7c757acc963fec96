#include "ice/constellation.hpp"

#include <cmath>

#include "ice/errors.hpp"

namespace ice {
namespace {

std::vector<Complex> scaled(std::vector<Complex> points, double factor) {
  for (auto& p : points) p *= factor;
  return points;
}

double average_power(const std::vector<Complex>& points, const Vec& priors) {
  double p = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) p += priors(static_cast<Eigen::Index>(i)) * std::norm(points[i]);
  return p;
}

}  // namespace

Constellation::Constellation(std::vector<Complex> points, Vec priors) : points_(std::move(points)), priors_(std::move(priors)) {
  if (points_.empty() || priors_.size() != static_cast<Eigen::Index>(points_.size()))
    throw ConfigError("constellation: points and priors must be non-empty and of equal size");
  if (priors_.minCoeff() < 0.0 || std::abs(priors_.sum() - 1.0) > 1e-12)
    throw ConfigError("constellation: priors must be non-negative and sum to 1");
  lifted_.reserve(points_.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& p : points_) {
    lifted_.emplace_back(p.real(), p.imag());
    lo = std::min(lo, std::abs(p));
    hi = std::max(hi, std::abs(p));
  }
  constant_modulus_ = (hi - lo) < 1e-12;
  log_priors_ = priors_.array().max(1e-300).log();
}

Constellation Constellation::qpsk(bool normalize) {
  std::vector<Complex> points = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  if (normalize) points = scaled(std::move(points), 1.0 / std::sqrt(2.0));
  return Constellation(std::move(points), Vec::Constant(4, 0.25));
}

Constellation Constellation::qam16() {
  // 4x4 grid {-3,-1,1,3}^2 rescaled to unit average power.
  std::vector<Complex> points;
  for (double re : {-3.0, -1.0, 1.0, 3.0})
    for (double im : {-3.0, -1.0, 1.0, 3.0}) points.emplace_back(re, im);
  const Vec priors = Vec::Constant(16, 1.0 / 16.0);
  const double power = average_power(points, priors);
  return Constellation(scaled(std::move(points), 1.0 / std::sqrt(power)), priors);
}

Constellation Constellation::antipodal() {
  return Constellation({{1, 0}, {-1, 0}}, Vec::Constant(2, 0.5));
}

Constellation make_constellation(const std::string& name, bool normalize) {
  if (name == "qpsk") return Constellation::qpsk(normalize);
  if (name == "qam16") return Constellation::qam16();
  throw ConfigError("unknown constellation: " + name);
}

}  // namespace ice
