#ifndef PROJFLOW_PROJECTIVE_HPP
#define PROJFLOW_PROJECTIVE_HPP

#include <array>

#include "projflow/mat3.hpp"
#include "projflow/scalars.hpp"
#include "projflow/vec3.hpp"

namespace projflow {

namespace detail {
/// Canonicalize a homogeneous triple: unit norm, last nonzero entry positive.
/// Throws DegenerateInput on the zero vector.
Vec3 canonical_rep(Vec3 v, const char* what);
bool proj_equal(const Vec3& a, const Vec3& b);
}  // namespace detail

/// Point of RP^2. Stores the canonical representative (unit norm, last
/// nonzero entry positive), so equality is a plain tolerance check.
class ProjPoint {
 public:
  explicit ProjPoint(const Vec3& raw) : v_(detail::canonical_rep(raw, "point")) {}
  ProjPoint(double x, double y, double z) : ProjPoint(Vec3{x, y, z}) {}

  const Vec3& rep() const { return v_; }

  bool operator==(const ProjPoint& o) const { return detail::proj_equal(v_, o.v_); }
  bool operator!=(const ProjPoint& o) const { return !(*this == o); }

 private:
  Vec3 v_;
};

/// Line of RP^2 as a projective covector. Same canonicalization as ProjPoint.
class ProjLine {
 public:
  explicit ProjLine(const Vec3& raw) : v_(detail::canonical_rep(raw, "line")) {}
  ProjLine(double x, double y, double z) : ProjLine(Vec3{x, y, z}) {}

  const Vec3& rep() const { return v_; }

  /// Pairing of canonical representatives; zero iff incident. Not itself a
  /// projective invariant (representatives carry a sign choice), but ratios
  /// of pairings are.
  double eval(const ProjPoint& p) const { return dot(v_, p.rep()); }

  bool contains(const ProjPoint& p) const;

  bool operator==(const ProjLine& o) const { return detail::proj_equal(v_, o.v_); }
  bool operator!=(const ProjLine& o) const { return !(*this == o); }

 private:
  Vec3 v_;
};

/// Incident (point, line) pair: l(p) = 0.
struct Flag {
  ProjPoint point;
  ProjLine line;

  Flag(const ProjPoint& p, const ProjLine& l);
};

/// Line through two distinct points.
ProjPoint meet(const ProjLine& l, const ProjLine& m);
/// Intersection point of two distinct lines.
ProjLine join(const ProjPoint& p, const ProjPoint& q);

/// Two flags are transverse when neither point lies on the other's line.
bool transverse(const Flag& a, const Flag& b);

/// Projective transformation. The stored matrix has unit Frobenius norm and
/// its first nonzero entry positive; |det| stays above the genericity floor.
class ProjMap {
 public:
  explicit ProjMap(const Mat3& raw);

  static ProjMap identity() { return ProjMap(Mat3::identity()); }

  const Mat3& mat() const { return m_; }

  ProjPoint operator()(const ProjPoint& p) const { return ProjPoint(m_ * p.rep()); }
  /// Lines transform by the inverse transpose; the adjugate transpose is the
  /// same map projectively and needs no division.
  ProjLine operator()(const ProjLine& l) const {
    return ProjLine(m_.adjugate().transpose() * l.rep());
  }
  Flag operator()(const Flag& f) const { return Flag((*this)(f.point), (*this)(f.line)); }

  ProjMap operator*(const ProjMap& o) const { return ProjMap(m_ * o.m_); }
  ProjMap inverse() const { return ProjMap(m_.adjugate()); }

  bool operator==(const ProjMap& o) const;
  bool operator!=(const ProjMap& o) const { return !(*this == o); }

 private:
  Mat3 m_;
};

/// Unique map sending one generic point quadruple to another. Generic means
/// no three of the four points are collinear.
ProjMap map_from_points(const std::array<ProjPoint, 4>& src, const std::array<ProjPoint, 4>& dst);

/// Unique map sending flag A to flag A', flag B to B' and point C to C'.
/// The two flags must be transverse and C must avoid both flag lines and the
/// line joining the two flag points (else the map is not unique).
ProjMap map_from_flag_data(const Flag& srcA, const Flag& srcB, const ProjPoint& srcC,
                           const Flag& dstA, const Flag& dstB, const ProjPoint& dstC);

/// Eigen data of a loxodromic projective class: after scaling a positive
/// determinant representative to det 1, eigenvalues satisfy l1 > l2 > l3 > 0
/// with relative gaps above tol().gap.
struct EigenFlags {
  std::array<double, 2> logratios;  ///< (log(l1/l2), log(l2/l3))
  ProjPoint attracting_point;
  ProjPoint neutral_point;
  ProjPoint repelling_point;
  ProjLine attracting_line;  ///< span of the top two eigenvectors
  ProjLine repelling_line;   ///< span of the bottom two eigenvectors

  Flag attracting_flag() const { return Flag(attracting_point, attracting_line); }
  Flag repelling_flag() const { return Flag(repelling_point, repelling_line); }
};

EigenFlags eigen_flags(const ProjMap& g);

}  // namespace projflow

#endif
