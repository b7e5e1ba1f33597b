#include "projflow/projective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <utility>

namespace projflow {

Tolerances& tol() {
  static Tolerances t = [] {
    Tolerances init;
    if (const char* env = std::getenv("PROJFLOW_TOL")) {
      char* end = nullptr;
      double v = std::strtod(env, &end);
      if (end != env && v > 0) init.eq = v;
    }
    return init;
  }();
  return t;
}

namespace detail {

Vec3 canonical_rep(Vec3 v, const char* what) {
  double n = norm(v);
  if (!(n > 0) || !std::isfinite(n))
    throw DegenerateInput(std::string("zero or non-finite homogeneous ") + what);
  v = v / n;
  // Sign rule: last entry of non-negligible magnitude is made positive.
  for (int i = 2; i >= 0; --i) {
    if (std::fabs(v[i]) > 1e-13) {
      if (v[i] < 0) v = -v;
      break;
    }
  }
  return v;
}

bool proj_equal(const Vec3& a, const Vec3& b) {
  return std::fabs(1.0 - std::fabs(dot(a, b))) < tol().eq;
}

}  // namespace detail

bool ProjLine::contains(const ProjPoint& p) const { return std::fabs(eval(p)) < tol().eq; }

Flag::Flag(const ProjPoint& p, const ProjLine& l) : point(p), line(l) {
  if (!line.contains(point)) throw DegenerateInput("flag point does not lie on flag line");
}

ProjLine join(const ProjPoint& p, const ProjPoint& q) {
  Vec3 c = cross(p.rep(), q.rep());
  // Unit representatives, so |c| is the sine of the angle between them.
  if (norm(c) <= tol().sing) throw DegenerateInput("join of equal points");
  return ProjLine(c);
}

ProjPoint meet(const ProjLine& l, const ProjLine& m) {
  Vec3 c = cross(l.rep(), m.rep());
  if (norm(c) <= tol().sing) throw DegenerateInput("meet of equal lines");
  return ProjPoint(c);
}

bool transverse(const Flag& a, const Flag& b) {
  return std::fabs(a.line.eval(b.point)) >= tol().eq && std::fabs(b.line.eval(a.point)) >= tol().eq;
}

ProjMap::ProjMap(const Mat3& raw) : m_(raw) {
  double f = m_.frobenius();
  if (!(f > 0) || !std::isfinite(f)) throw DegenerateInput("zero or non-finite matrix");
  m_ = m_ / f;
  [&] {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (std::fabs(m_.m[i][j]) > 1e-13) {
          if (m_.m[i][j] < 0) m_ = m_ * -1.0;
          return;
        }
  }();
  if (std::fabs(m_.det()) <= tol().sing) throw DegenerateInput("singular matrix");
}

bool ProjMap::operator==(const ProjMap& o) const {
  double dminus = 0, dplus = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double a = m_.m[i][j], b = o.m_.m[i][j];
      dminus += (a - b) * (a - b);
      dplus += (a + b) * (a + b);
    }
  return std::min(dminus, dplus) < tol().eq * tol().eq * 100.0;
}

namespace {

// Frame matrix of a generic quadruple: maps e1, e2, e3, (1,1,1) to the four
// points. Genericity of every triple in the quadruple is the caller's check.
Mat3 point_frame(const std::array<ProjPoint, 4>& q) {
  Mat3 B = Mat3::from_cols(q[0].rep(), q[1].rep(), q[2].rep());
  Vec3 c = B.inverse() * q[3].rep();
  return Mat3::from_cols(q[0].rep() * c.x, q[1].rep() * c.y, q[2].rep() * c.z);
}

void check_generic(const std::array<ProjPoint, 4>& q, const char* which) {
  static const int tri[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  for (const auto& t : tri) {
    double d = det3(q[t[0]].rep(), q[t[1]].rep(), q[t[2]].rep());
    if (std::fabs(d) <= tol().sing)
      throw NotGeneric(std::string(which) + " quadruple has a collinear triple");
  }
}

}  // namespace

ProjMap map_from_points(const std::array<ProjPoint, 4>& src, const std::array<ProjPoint, 4>& dst) {
  check_generic(src, "source");
  check_generic(dst, "destination");
  return ProjMap(point_frame(dst) * point_frame(src).inverse());
}

namespace {

// Adapted basis of a transverse flag pair: both flag points plus the
// intersection of the two flag lines. Maps fixing both flags are exactly the
// diagonal maps in this basis.
Mat3 flag_basis(const Flag& a, const Flag& b, const char* which) {
  if (!transverse(a, b))
    throw NotTransverse(std::string(which) + " flag pair is not transverse");
  ProjPoint q = meet(a.line, b.line);
  return Mat3::from_cols(a.point.rep(), b.point.rep(), q.rep());
}

Vec3 flag_coords(const Mat3& basis, const ProjPoint& c, const char* which) {
  Vec3 s = basis.inverse() * c.rep();
  const char* bad = nullptr;
  if (std::fabs(s.x) <= tol().sing) bad = "lies on the second flag line";
  if (std::fabs(s.y) <= tol().sing) bad = "lies on the first flag line";
  if (std::fabs(s.z) <= tol().sing) bad = "lies on the line joining the flag points";
  if (bad) throw DegeneratePoint(std::string(which) + " point " + bad);
  return s;
}

}  // namespace

ProjMap map_from_flag_data(const Flag& srcA, const Flag& srcB, const ProjPoint& srcC,
                           const Flag& dstA, const Flag& dstB, const ProjPoint& dstC) {
  Mat3 Bs = flag_basis(srcA, srcB, "source");
  Mat3 Bd = flag_basis(dstA, dstB, "destination");
  Vec3 s = flag_coords(Bs, srcC, "source");
  Vec3 t = flag_coords(Bd, dstC, "destination");
  return ProjMap(Bd * Mat3::diag(t.x / s.x, t.y / s.y, t.z / s.z) * Bs.inverse());
}

namespace {

// Null vector of a (numerically) rank-2 matrix by Gaussian elimination with
// full pivoting; the free coordinate after two steps spans the kernel.
Vec3 null_space(const Mat3& N) {
  double a[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[i][j] = N.m[i][j];
  int cp[3] = {0, 1, 2};
  for (int step = 0; step < 2; ++step) {
    int pr = step, pc = step;
    double best = -1;
    for (int i = step; i < 3; ++i)
      for (int j = step; j < 3; ++j)
        if (std::fabs(a[i][j]) > best) {
          best = std::fabs(a[i][j]);
          pr = i;
          pc = j;
        }
    for (int j = 0; j < 3; ++j) std::swap(a[step][j], a[pr][j]);
    for (int i = 0; i < 3; ++i) std::swap(a[i][step], a[i][pc]);
    std::swap(cp[step], cp[pc]);
    if (best <= 0) break;
    for (int i = step + 1; i < 3; ++i) {
      double f = a[i][step] / a[step][step];
      for (int j = step; j < 3; ++j) a[i][j] -= f * a[step][j];
    }
  }
  double x2 = 1.0;
  double x1 = std::fabs(a[1][1]) > 1e-300 ? -a[1][2] * x2 / a[1][1] : 0.0;
  double x0 = std::fabs(a[0][0]) > 1e-300 ? -(a[0][1] * x1 + a[0][2] * x2) / a[0][0] : 0.0;
  Vec3 x;
  x[cp[0]] = x0;
  x[cp[1]] = x1;
  x[cp[2]] = x2;
  return x;
}

}  // namespace

EigenFlags eigen_flags(const ProjMap& g) {
  Mat3 M = g.mat();
  double d = M.det();
  if (d < 0) {
    M = M * -1.0;
    d = -d;
  }
  M = M / std::cbrt(d);

  // Characteristic polynomial p(l) = l^3 - tr l^2 + c1 l - 1 (det scaled to 1).
  double trc = M.trace();
  double c1 = M.adjugate().trace();
  auto p = [&](double l) { return ((l - trc) * l + c1) * l - 1.0; };
  auto dp = [&](double l) { return (3.0 * l - 2.0 * trc) * l + c1; };

  // Depressed cubic x^3 + px + q with l = x + tr/3.
  double pp = c1 - trc * trc / 3.0;
  double qq = -2.0 * trc * trc * trc / 27.0 + trc * c1 / 3.0 - 1.0;
  double disc = -4.0 * pp * pp * pp - 27.0 * qq * qq;
  if (!(pp < 0) || !(disc > 0)) throw NotLoxodromic("spectrum not three distinct real values");

  double rad = std::sqrt(-pp / 3.0);
  double arg = std::clamp(3.0 * qq / (2.0 * pp * rad), -1.0, 1.0);
  double theta = std::acos(arg);
  double lam[3];
  for (int k = 0; k < 3; ++k) {
    double l = 2.0 * rad * std::cos(theta / 3.0 - 2.0 * M_PI * k / 3.0) + trc / 3.0;
    for (int it = 0; it < 2; ++it) l -= p(l) / dp(l);
    lam[k] = l;
  }
  std::sort(lam, lam + 3, std::greater<>());

  if (!(lam[2] > 0)) throw NotLoxodromic("no positive-spectrum representative");
  if (lam[0] / lam[1] < 1.0 + tol().gap || lam[1] / lam[2] < 1.0 + tol().gap)
    throw NotLoxodromic("eigenvalue gap below threshold");

  ProjPoint v1(null_space(M + Mat3::identity() * -lam[0]));
  ProjPoint v2(null_space(M + Mat3::identity() * -lam[1]));
  ProjPoint v3(null_space(M + Mat3::identity() * -lam[2]));

  return EigenFlags{{std::log(lam[0] / lam[1]), std::log(lam[1] / lam[2])},
                    v1,
                    v2,
                    v3,
                    join(v1, v2),
                    join(v2, v3)};
}

}  // namespace projflow
