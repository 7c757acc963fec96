#include "ice/bessel.hpp"

#include <cmath>
#include <numbers>

namespace ice {
namespace {

// Ascending series sum_k (-x^2/4)^k / (k!)^2. Intermediate terms stay below
// ~120 for |x| < 8, so cancellation costs at most a few ulps there.
double j0_series(double x) {
  const double q = -0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

// J0(x) = (1/pi) int_0^pi cos(x sin t) dt. The n-panel trapezoid rule on this
// integrand equals J0(x) + 2 sum_{m>=1} J_{2mn}(x) exactly (the quadrature
// aliases the Bessel cosine series), and J_128(50) < 1e-30, so n = 64 already
// gives machine precision on |x| <= 50.
double j0_quadrature(double x) {
  constexpr int n = 64;
  const double h = std::numbers::pi / n;
  double acc = 0.5 * (1.0 + std::cos(x * std::sin(std::numbers::pi)));
  for (int j = 1; j < n; ++j) acc += std::cos(x * std::sin(j * h));
  return acc / n;
}

}  // namespace

double bessel_j0(double x) {
  x = std::abs(x);
  return x < 8.0 ? j0_series(x) : j0_quadrature(x);
}

}  // namespace ice
