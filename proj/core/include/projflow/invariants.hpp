#ifndef PROJFLOW_INVARIANTS_HPP
#define PROJFLOW_INVARIANTS_HPP

#include <array>
#include <variant>
#include <vector>

#include "projflow/projective.hpp"

namespace projflow {

/// Middle argument of the cross ratio: either a line of the pencil or a
/// point that is converted through the pencil at meet(l1, l4).
using CrossArg = std::variant<ProjPoint, ProjLine>;

/// Cross ratio C(l1, a2, a3, l4) = l1(p3) l4(p2) / (l1(p2) l4(p3)), where
/// p2, p3 are evaluation points of the middle arguments. Line middles must
/// pass through the pencil center meet(l1, l4); point middles must differ
/// from it.
double cross_ratio(const ProjLine& l1, const CrossArg& a2, const CrossArg& a3,
                   const ProjLine& l4);

/// Cross ratio of four pairwise distinct collinear points, reduced through a
/// pencil at an auxiliary point off their common line. Equals the affine
/// formula (x3-x1)(x4-x2) / ((x2-x1)(x4-x3)) in any chart of the line.
double cross_ratio_collinear(const ProjPoint& p1, const ProjPoint& p2, const ProjPoint& p3,
                             const ProjPoint& p4);

/// Triple ratio T(F1,F2,F3) = l1(p2) l2(p3) l3(p1) / (l1(p3) l3(p2) l2(p1)).
double triple_ratio(const Flag& f1, const Flag& f2, const Flag& f3);

/// Derived points and lines of a positive flag triple, indices mod 3 with
/// (i, j) = (k+1, k+2):
///   q_k = meet(l_i, l_j)   m_k = join(p_i, p_j)   w_k = join(p_k, q_k)
///   t_k = meet(l_k, m_k)   r_k = meet(w_k, m_k)   u_k = meet(w_i, w_j)
/// For each i, the points p_i, u_{i-1}, u_{i+1}, q_i are collinear on w_i and
/// their cross ratio equals T(F1,F3,F2).
struct TriangleFrame {
  std::array<ProjPoint, 3> q;
  std::array<ProjLine, 3> m;
  std::array<ProjLine, 3> w;
  std::array<ProjPoint, 3> tpts;
  std::array<ProjPoint, 3> rpts;
  std::array<ProjPoint, 3> u;
};

TriangleFrame triangle_frame(const Flag& f1, const Flag& f2, const Flag& f3);

/// Properly convex polygon, all vertices finite in the z = 1 affine chart.
/// Vertices are stored in counterclockwise chart order.
class ConvexPolygonDomain {
 public:
  explicit ConvexPolygonDomain(std::vector<ProjPoint> vertices);

  const std::vector<ProjPoint>& vertices() const { return verts_; }
  const std::vector<std::array<double, 2>>& chart_vertices() const { return chart_; }

  bool contains(const ProjPoint& p) const;

 private:
  std::vector<ProjPoint> verts_;
  std::vector<std::array<double, 2>> chart_;

  friend double hilbert_distance(const ConvexPolygonDomain&, const ProjPoint&, const ProjPoint&);
};

/// Hilbert metric d(p,q) = log C(a,p,q,b) with a, p, q, b in order along the
/// chord through p and q, a and b on the boundary.
double hilbert_distance(const ConvexPolygonDomain& dom, const ProjPoint& p, const ProjPoint& q);

}  // namespace projflow

#endif
