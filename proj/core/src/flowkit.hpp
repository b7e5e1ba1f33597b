#ifndef PROJFLOW_SRC_FLOWKIT_HPP
#define PROJFLOW_SRC_FLOWKIT_HPP

#include <cmath>

#include "ldops.hpp"
#include "projflow/projective.hpp"
#include "projflow/scalars.hpp"

namespace projflow {
namespace detail {

inline double softplus(double x) {
  if (x > 36) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

// Drop the rounding error of an analytically incident point onto the line.
inline ProjPoint snap_to_line(const Vec3& p, const ProjLine& l) {
  return ProjPoint(p - l.rep() * dot(l.rep(), p));
}

// Diagonal flow in a projective frame, applied factor by factor. The
// conjugated product matrix is badly scaled whenever the frame is close to
// clustered even though the map itself is tame, so it is never formed;
// carrying the factors in long double keeps flow/coordinate round trips well
// inside the advertised tolerances.
struct FrameFlow {
  LV col[3];
  LV row[3];  // adjugate rows: row[i] scaled by the determinant
  long double d[3] = {1, 1, 1};

  static FrameFlow from_cols(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    FrameFlow f;
    f.col[0] = lv(c0);
    f.col[1] = lv(c1);
    f.col[2] = lv(c2);
    f.row[0] = lcross(f.col[1], f.col[2]);
    f.row[1] = lcross(f.col[2], f.col[0]);
    f.row[2] = lcross(f.col[0], f.col[1]);
    long double det = ldot(f.col[0], f.row[0]);
    if (std::fabs(static_cast<double>(det)) <= tol().sing)
      throw DegenerateInput("flow frame is degenerate");
    return f;
  }

  FrameFlow with_diag(double a, double b, double c) const {
    FrameFlow f = *this;
    f.d[0] = a;
    f.d[1] = b;
    f.d[2] = c;
    return f;
  }

  Vec3 point(const Vec3& p) const {
    LV q = lv(p);
    LV out = col[0] * (d[0] * ldot(row[0], q)) + col[1] * (d[1] * ldot(row[1], q)) +
             col[2] * (d[2] * ldot(row[2], q));
    return lround3(out);
  }

  // Lines move by the inverse transpose, so the diagonal inverts.
  Vec3 line(const Vec3& l) const {
    LV q = lv(l);
    LV out = row[0] * (ldot(col[0], q) / d[0]) + row[1] * (ldot(col[1], q) / d[1]) +
             row[2] * (ldot(col[2], q) / d[2]);
    return lround3(out);
  }

  Flag operator()(const Flag& f) const {
    return Flag(ProjPoint(point(f.point.rep())), ProjLine(line(f.line.rep())));
  }
};

}  // namespace detail
}  // namespace projflow

#endif
