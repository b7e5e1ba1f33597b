#ifndef PROJFLOW_MAT3_HPP
#define PROJFLOW_MAT3_HPP

#include <cmath>

#include "projflow/vec3.hpp"

namespace projflow {

/// Row-major 3x3 real matrix. Inverse is by adjugate; no pivoting is needed
/// at this size because callers guard determinants themselves.
struct Mat3 {
  double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};

  constexpr Mat3() = default;
  Mat3(double a, double b, double c, double d, double e, double f, double g, double h, double i) {
    m[0][0] = a;
    m[0][1] = b;
    m[0][2] = c;
    m[1][0] = d;
    m[1][1] = e;
    m[1][2] = f;
    m[2][0] = g;
    m[2][1] = h;
    m[2][2] = i;
  }

  static Mat3 identity() { return {1, 0, 0, 0, 1, 0, 0, 0, 1}; }

  static Mat3 from_cols(const Vec3& a, const Vec3& b, const Vec3& c) {
    return {a.x, b.x, c.x, a.y, b.y, c.y, a.z, b.z, c.z};
  }

  static Mat3 diag(double a, double b, double c) { return {a, 0, 0, 0, b, 0, 0, 0, c}; }

  Vec3 col(int j) const { return {m[0][j], m[1][j], m[2][j]}; }
  Vec3 row(int i) const { return {m[i][0], m[i][1], m[i][2]}; }

  Vec3 operator*(const Vec3& v) const {
    return {dot(row(0), v), dot(row(1), v), dot(row(2), v)};
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j] + m[i][2] * o.m[2][j];
    return r;
  }

  Mat3 operator+(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
    return r;
  }

  Mat3 operator*(double s) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] * s;
    return r;
  }

  Mat3 operator/(double s) const { return *this * (1.0 / s); }

  Mat3 transpose() const {
    return {m[0][0], m[1][0], m[2][0], m[0][1], m[1][1], m[2][1], m[0][2], m[1][2], m[2][2]};
  }

  double det() const { return det3(col(0), col(1), col(2)); }

  double frobenius() const {
    double s = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += m[i][j] * m[i][j];
    return std::sqrt(s);
  }

  double trace() const { return m[0][0] + m[1][1] + m[2][2]; }

  /// Adjugate (transposed cofactor matrix): adj(M) * M = det(M) * I.
  Mat3 adjugate() const {
    Vec3 c0 = col(0), c1 = col(1), c2 = col(2);
    Vec3 r0 = cross(c1, c2), r1 = cross(c2, c0), r2 = cross(c0, c1);
    return {r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z};
  }

  Mat3 inverse() const { return adjugate() / det(); }
};

}  // namespace projflow

#endif
