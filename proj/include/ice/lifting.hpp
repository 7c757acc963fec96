#pragma once

#include "ice/types.hpp"

namespace ice {

// Real lift [Re h; Im h], antenna-major within each half.
inline Vec real_lift(const CVec& h) {
  const Eigen::Index d = h.size();
  Vec v(2 * d);
  v.head(d) = h.real();
  v.tail(d) = h.imag();
  return v;
}

inline CVec complex_from_lift(const Vec& v) {
  const Eigen::Index d = v.size() / 2;
  CVec h(d);
  h.real() = v.head(d);
  h.imag() = v.tail(d);
  return h;
}

// H = [[Re h, -Im h], [Im h, Re h]] in R^{2d x 2}; H * [Re x, Im x]^T is the
// real lift of h * x.
inline Mat lift_complex_vector(const CVec& h) {
  const Eigen::Index d = h.size();
  Mat m(2 * d, 2);
  m.col(0).head(d) = h.real();
  m.col(0).tail(d) = h.imag();
  m.col(1).head(d) = -h.imag();
  m.col(1).tail(d) = h.real();
  return m;
}

// 2x2 complex-multiplication block [[x_I, -x_Q], [x_Q, x_I]] of a lifted symbol.
inline Mat2 symbol_block(const Vec2& x) {
  Mat2 a;
  a << x(0), -x(1), x(1), x(0);
  return a;
}

// M^d(x) = symbol_block(x) kron I_d; satisfies M^d(x) * [Re h; Im h] =
// lift_complex_vector(h) * x for every complex h.
inline Mat embed_symbol_matrix(const Vec2& x, Eigen::Index d) {
  Mat m = Mat::Zero(2 * d, 2 * d);
  m.topLeftCorner(d, d).diagonal().setConstant(x(0));
  m.topRightCorner(d, d).diagonal().setConstant(-x(1));
  m.bottomLeftCorner(d, d).diagonal().setConstant(x(1));
  m.bottomRightCorner(d, d).diagonal().setConstant(x(0));
  return m;
}

}  // namespace ice
