#include "projflow/invariants.hpp"

#include <algorithm>
#include <cmath>

#include "ldops.hpp"

namespace projflow {

namespace {

double cr_core(const ProjLine& l1, const ProjPoint& p2, const ProjPoint& p3, const ProjLine& l4) {
  long double den1 = detail::lpair(l1.rep(), p2.rep());
  long double den4 = detail::lpair(l4.rep(), p3.rep());
  if (fabsl(den1) <= tol().sing || fabsl(den4) <= tol().sing)
    throw DegenerateInput("cross ratio denominator pairing vanishes");
  return static_cast<double>(detail::lpair(l1.rep(), p3.rep()) *
                             detail::lpair(l4.rep(), p2.rep()) / (den1 * den4));
}

// Evaluation point for a middle argument of the pencil at center q.
ProjPoint cr_eval_point(const CrossArg& a, const ProjPoint& center) {
  if (std::holds_alternative<ProjPoint>(a)) {
    const ProjPoint& p = std::get<ProjPoint>(a);
    if (norm(cross(p.rep(), center.rep())) <= tol().sing)
      throw DegenerateInput("cross ratio middle point equals the pencil center");
    return p;
  }
  const ProjLine& l = std::get<ProjLine>(a);
  if (std::fabs(l.eval(center)) >= tol().eq)
    throw NotConcurrent("cross ratio middle line misses the pencil center");
  // l x center lies on l and is never the center itself.
  return ProjPoint(detail::lround3(detail::lcross(detail::lv(l.rep()), detail::lv(center.rep()))));
}

}  // namespace

double cross_ratio(const ProjLine& l1, const CrossArg& a2, const CrossArg& a3,
                   const ProjLine& l4) {
  if (norm(cross(l1.rep(), l4.rep())) <= tol().sing)
    throw DegenerateInput("cross ratio outer lines coincide");
  ProjPoint center = meet(l1, l4);
  return cr_core(l1, cr_eval_point(a2, center), cr_eval_point(a3, center), l4);
}

double cross_ratio_collinear(const ProjPoint& p1, const ProjPoint& p2, const ProjPoint& p3,
                             const ProjPoint& p4) {
  const ProjPoint* pts[4] = {&p1, &p2, &p3, &p4};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (norm(cross(pts[i]->rep(), pts[j]->rep())) <= tol().sing)
        throw DegenerateInput("collinear cross ratio of coincident points");
  ProjLine chord = join(p1, p2);
  if (!chord.contains(p3) || !chord.contains(p4))
    throw NotCollinear("cross ratio points are not collinear");
  // The chord covector read as a point is never on the chord.
  ProjPoint aux(chord.rep());
  return cr_core(join(aux, p1), p2, p3, join(aux, p4));
}

double triple_ratio(const Flag& f1, const Flag& f2, const Flag& f3) {
  const Flag* f[3] = {&f1, &f2, &f3};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (!transverse(*f[i], *f[j])) throw NotTransverse("triple ratio flags", i, j);
  auto pair = [](const Flag& a, const Flag& b) {
    return detail::lpair(a.line.rep(), b.point.rep());
  };
  return static_cast<double>(pair(f1, f2) * pair(f2, f3) * pair(f3, f1) /
                             (pair(f1, f3) * pair(f3, f2) * pair(f2, f1)));
}

TriangleFrame triangle_frame(const Flag& f1, const Flag& f2, const Flag& f3) {
  double T = triple_ratio(f1, f2, f3);
  if (T <= tol().pos) throw NotPositive("triangle frame needs a positive triple");

  const Flag* f[3] = {&f1, &f2, &f3};
  std::array<ProjPoint, 3> q = {ProjPoint(1, 0, 0), ProjPoint(1, 0, 0), ProjPoint(1, 0, 0)};
  std::array<ProjLine, 3> m = {ProjLine(1, 0, 0), ProjLine(1, 0, 0), ProjLine(1, 0, 0)};
  std::array<ProjLine, 3> w = m;
  std::array<ProjPoint, 3> tp = q, rp = q, u = q;

  for (int k = 0; k < 3; ++k) {
    int i = (k + 1) % 3, j = (k + 2) % 3;
    q[k] = meet(f[i]->line, f[j]->line);
    m[k] = join(f[i]->point, f[j]->point);
  }
  for (int k = 0; k < 3; ++k) {
    w[k] = join(f[k]->point, q[k]);
    tp[k] = meet(f[k]->line, m[k]);
    rp[k] = meet(w[k], m[k]);
  }
  for (int k = 0; k < 3; ++k) {
    int i = (k + 1) % 3, j = (k + 2) % 3;
    u[k] = meet(w[i], w[j]);
  }
  return TriangleFrame{q, m, w, tp, rp, u};
}

namespace {

std::array<double, 2> chart_coords(const ProjPoint& p) {
  const Vec3& v = p.rep();
  if (std::fabs(v.z) < 1e-9) throw PointOutsideDomain("point at infinity in the z = 1 chart");
  return {v.x / v.z, v.y / v.z};
}

double cross2(const std::array<double, 2>& o, const std::array<double, 2>& a,
              const std::array<double, 2>& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

ConvexPolygonDomain::ConvexPolygonDomain(std::vector<ProjPoint> vertices)
    : verts_(std::move(vertices)) {
  if (verts_.size() < 3) throw NonConvexInput("polygon needs at least three vertices");
  chart_.reserve(verts_.size());
  for (const auto& v : verts_) {
    if (std::fabs(v.rep().z) < 1e-9) throw NonConvexInput("polygon vertex at infinity");
    chart_.push_back(chart_coords(v));
  }
  const size_t n = chart_.size();
  int sign = 0;
  for (size_t i = 0; i < n; ++i) {
    double c = cross2(chart_[i], chart_[(i + 1) % n], chart_[(i + 2) % n]);
    int s = c > 0 ? 1 : (c < 0 ? -1 : 0);
    if (s == 0) throw NonConvexInput("collinear consecutive polygon vertices");
    if (sign == 0) sign = s;
    if (s != sign) throw NonConvexInput("polygon vertices not in convex position");
  }
  if (sign < 0) {  // store counterclockwise
    std::reverse(verts_.begin(), verts_.end());
    std::reverse(chart_.begin(), chart_.end());
  }
}

bool ConvexPolygonDomain::contains(const ProjPoint& p) const {
  std::array<double, 2> c;
  try {
    c = chart_coords(p);
  } catch (const PointOutsideDomain&) {
    return false;
  }
  const size_t n = chart_.size();
  for (size_t i = 0; i < n; ++i)
    if (cross2(chart_[i], chart_[(i + 1) % n], c) <= 1e-12) return false;
  return true;
}

double hilbert_distance(const ConvexPolygonDomain& dom, const ProjPoint& p, const ProjPoint& q) {
  if (!dom.contains(p) || !dom.contains(q))
    throw PointOutsideDomain("Hilbert distance needs interior points");
  if (p == q) return 0.0;

  std::array<double, 2> a = chart_coords(p), b = chart_coords(q);
  double dx = b[0] - a[0], dy = b[1] - a[1];

  // Chord parameters t with hit = p + t (q - p); boundary hits collected over
  // all edges and deduplicated (a chord through a vertex meets two edges).
  std::vector<double> hits;
  const auto& ch = dom.chart_vertices();
  const size_t n = ch.size();
  for (size_t i = 0; i < n; ++i) {
    const auto& v0 = ch[i];
    const auto& v1 = ch[(i + 1) % n];
    double ex = v1[0] - v0[0], ey = v1[1] - v0[1];
    double det = dx * (-ey) - dy * (-ex);
    if (std::fabs(det) < 1e-15) continue;  // chord parallel to edge
    double rx = v0[0] - a[0], ry = v0[1] - a[1];
    double t = (rx * (-ey) + ry * ex) / det;
    double s = (dx * ry - dy * rx) / det;
    if (s < -1e-12 || s > 1.0 + 1e-12) continue;
    hits.push_back(t);
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end(),
                         [](double x, double y) { return std::fabs(x - y) < 1e-9; }),
             hits.end());
  if (hits.size() != 2) throw NonConvexInput("chord does not meet the boundary exactly twice");

  double ta = hits[0], tb = hits[1];  // ta < 0 < 1 < tb for interior p, q
  if (!(ta < 0.0 && tb > 1.0)) throw NonConvexInput("boundary hits do not bracket the points");
  // Affine cross ratio of (ta, 0, 1, tb) on the chord.
  double cr = (1.0 - ta) * tb / ((0.0 - ta) * (tb - 1.0));
  return std::log(cr);
}

}  // namespace projflow
