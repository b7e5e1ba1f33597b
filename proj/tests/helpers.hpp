#ifndef PROJFLOW_TEST_HELPERS_HPP
#define PROJFLOW_TEST_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <random>

#include "projflow/flag_tuple.hpp"
#include "projflow/projective.hpp"
#include "projflow/surface.hpp"

namespace pf_test {

using projflow::Flag;
using projflow::Mat3;
using projflow::ProjLine;
using projflow::ProjMap;
using projflow::ProjPoint;
using projflow::Vec3;

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(0x9e3779b97f4a7c15ULL);
  return gen;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline ProjPoint random_point() {
  for (;;) {
    Vec3 v(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
    if (projflow::norm(v) > 0.1) return ProjPoint(v);
  }
}

inline ProjLine random_line() {
  for (;;) {
    Vec3 v(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
    if (projflow::norm(v) > 0.1) return ProjLine(v);
  }
}

inline ProjMap random_map() {
  for (;;) {
    Mat3 m(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1), uniform(-1, 1), uniform(-1, 1),
           uniform(-1, 1), uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
    if (std::fabs(m.det()) > 0.05) return ProjMap(m);
  }
}

/// Flag tangent to the unit conic x^2 + y^2 = z^2 at chart angle `a`.
inline Flag conic_flag(double a) {
  ProjPoint p(std::cos(a), std::sin(a), 1.0);
  ProjLine l(std::cos(a), std::sin(a), -1.0);
  return Flag(p, l);
}

inline projflow::FlagTuple conic_tuple(int n, double start = 0.3) {
  std::vector<Flag> flags;
  flags.reserve((size_t)n);
  for (int i = 0; i < n; ++i) flags.push_back(conic_flag(start + 2 * M_PI * i / n));
  return projflow::validate_tuple(flags);
}

/// Sign-insensitive distance between canonical representatives.
inline double rep_dist(const Vec3& a, const Vec3& b) {
  return std::min(projflow::norm(a - b), projflow::norm(a + b));
}

inline double flag_dist(const Flag& a, const Flag& b) {
  return std::max(rep_dist(a.point.rep(), b.point.rep()), rep_dist(a.line.rep(), b.line.rep()));
}

inline projflow::FGCoords random_coords(const projflow::Triangulation& tri, double lo = -2,
                                        double hi = 2) {
  projflow::FGCoords c;
  for (auto [i, j] : tri.internal_edges()) {
    c.sigma[{i, j}] = uniform(lo, hi);
    c.sigma[{j, i}] = uniform(lo, hi);
  }
  for (const auto& t : tri.triangles()) c.tau[t] = uniform(lo, hi);
  return c;
}

inline projflow::FlagTuple random_tuple(int n, double lo = -2, double hi = 2) {
  return projflow::reconstruct(random_coords(projflow::Triangulation::fan(n), lo, hi),
                               projflow::Triangulation::fan(n));
}

inline void bd_axpy(projflow::BDCoords& c, const projflow::BDCoords& d, double w) {
  for (size_t i = 0; i < c.q_sigma.size(); ++i)
    for (int j = 0; j < 3; ++j) {
      c.q_sigma[i][j].x += w * d.q_sigma[i][j].x;
      c.q_sigma[i][j].y += w * d.q_sigma[i][j].y;
    }
  for (size_t k = 0; k < c.p_sigma.size(); ++k) {
    c.p_sigma[k].x += w * d.p_sigma[k].x;
    c.p_sigma[k].y += w * d.p_sigma[k].y;
  }
  for (size_t i = 0; i < c.tau.size(); ++i) {
    c.tau[i][0] += w * d.tau[i][0];
    c.tau[i][1] += w * d.tau[i][1];
  }
}

inline double bd_dist(const projflow::BDCoords& a, const projflow::BDCoords& b) {
  double m = 0;
  for (size_t i = 0; i < a.q_sigma.size(); ++i)
    for (int j = 0; j < 3; ++j) {
      m = std::max(m, std::fabs(a.q_sigma[i][j].x - b.q_sigma[i][j].x));
      m = std::max(m, std::fabs(a.q_sigma[i][j].y - b.q_sigma[i][j].y));
    }
  for (size_t k = 0; k < a.p_sigma.size(); ++k) {
    m = std::max(m, std::fabs(a.p_sigma[k].x - b.p_sigma[k].x));
    m = std::max(m, std::fabs(a.p_sigma[k].y - b.p_sigma[k].y));
  }
  for (size_t i = 0; i < a.tau.size(); ++i) {
    m = std::max(m, std::fabs(a.tau[i][0] - b.tau[i][0]));
    m = std::max(m, std::fabs(a.tau[i][1] - b.tau[i][1]));
  }
  return m;
}

/// Random point on the closed leaf relation variety near the hyperbolic one.
inline projflow::BDCoords random_bd(const projflow::SurfaceComplex& s, double amp = 0.1) {
  projflow::BDCoords c = projflow::fuchsian_like(s);
  for (const auto& dir : projflow::bd_tangent_basis(s)) bd_axpy(c, dir, uniform(-amp, amp));
  return c;
}

}  // namespace pf_test

#endif
