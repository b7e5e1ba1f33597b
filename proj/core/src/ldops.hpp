#ifndef PROJFLOW_LDOPS_HPP
#define PROJFLOW_LDOPS_HPP

#include "projflow/vec3.hpp"

// Extended-precision kernels for the invariant evaluations and the
// reconstruction algebra. Pairings of unit representatives cancel badly on
// clustered configurations; carrying the inner arithmetic in long double
// keeps coordinate round trips inside the advertised 1e-8.

namespace projflow::detail {

struct LV {
  long double x = 0, y = 0, z = 0;
};

inline LV lv(const Vec3& v) { return {v.x, v.y, v.z}; }

inline Vec3 lround3(const LV& v) {
  return Vec3(static_cast<double>(v.x), static_cast<double>(v.y), static_cast<double>(v.z));
}

inline LV operator+(const LV& a, const LV& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline LV operator-(const LV& a, const LV& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline LV operator*(const LV& a, long double s) { return {a.x * s, a.y * s, a.z * s}; }

inline long double ldot(const LV& a, const LV& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline LV lcross(const LV& a, const LV& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Pairing of two double representatives, accumulated in long double.
inline long double lpair(const Vec3& a, const Vec3& b) { return ldot(lv(a), lv(b)); }

}  // namespace projflow::detail

#endif
