#pragma once

#include <cmath>
#include <limits>

#include "ice/types.hpp"

namespace ice {

inline constexpr double kLogFloor = -690.77552789821368;  // log(1e-300)

// log(sum_i exp(v_i)) with a max shift; tolerates -inf entries.
template <typename Derived>
double log_sum_exp(const Eigen::DenseBase<Derived>& v) {
  const double m = v.derived().maxCoeff();
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::exp(v.derived()(i) - m);
  return m + std::log(acc);
}

inline double log_sum_exp(double a, double b) {
  const double m = a > b ? a : b;
  if (!std::isfinite(m)) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace ice
