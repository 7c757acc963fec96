#pragma once

#include <string>
#include <vector>

#include "ice/types.hpp"

namespace ice {

// Finite signal set with a prior, stored both as complex points and as their
// real 2-vector lifts.
class Constellation {
 public:
  Constellation(std::vector<Complex> points, Vec priors);

  static Constellation qpsk(bool normalize = false);
  static Constellation qam16();
  static Constellation antipodal();  // real {+1, -1}

  int size() const { return static_cast<int>(points_.size()); }
  const std::vector<Complex>& points() const { return points_; }
  const std::vector<Vec2>& lifted() const { return lifted_; }
  const Vec2& lifted(int i) const { return lifted_[static_cast<std::size_t>(i)]; }
  const Vec& priors() const { return priors_; }
  const Vec& log_priors() const { return log_priors_; }
  bool constant_modulus() const { return constant_modulus_; }

 private:
  std::vector<Complex> points_;
  std::vector<Vec2> lifted_;
  Vec priors_;
  Vec log_priors_;
  bool constant_modulus_ = false;
};

// name in {"qpsk", "qam16"}; normalize rescales to unit average power (for
// QPSK this divides by sqrt(2), placing the points on the unit circle).
Constellation make_constellation(const std::string& name, bool normalize);

}  // namespace ice
