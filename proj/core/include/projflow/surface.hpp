#pragma once

#include <array>
#include <string>
#include <vector>

namespace projflow {

// One boundary slot of a pair of pants: slot j in {0, 1, 2} carries the j-th
// peripheral generator of that pants. The three generators multiply to the
// identity in the order third * second * first, so any two of them generate
// the pants group freely.
struct PantsSide {
  int pants = 0;
  int boundary = 0;
  friend bool operator==(const PantsSide&, const PantsSide&) = default;
};

// Pants decomposition of a closed oriented surface of genus g >= 2: 2g - 2
// pants glued along 3g - 3 curves. Each pants carries the two-triangle ideal
// triangulation whose spiralling edge class j runs from the repelling fixed
// point of generator j to that of generator j + 1; the pants curves are the
// closed leaves, never sides of a triangle. A curve's first side fixes its
// orientation: the curve is represented by that side's peripheral generator,
// and that side's edges spiral into the generator's repelling fixed point
// while the opposite side's edges spiral into the attracting one.
class SurfaceComplex {
 public:
  int genus() const { return g_; }
  int num_pants() const { return 2 * g_ - 2; }
  int num_curves() const { return 3 * g_ - 3; }
  int num_spiral_edges() const { return 6 * g_ - 6; }
  int num_triangles() const { return 4 * g_ - 4; }

  const std::vector<std::array<PantsSide, 2>>& curves() const { return curves_; }
  int curve_at(PantsSide s) const;
  PantsSide across(PantsSide s) const;
  // True when s is the orienting side of its curve.
  bool orients(PantsSide s) const;

  // 1-based display names used by files and reports.
  std::string curve_id(int k) const;
  std::string edge_id(int pants, int j) const;
  std::string triangle_id(int pants, bool prime) const;

 private:
  SurfaceComplex() = default;
  int g_ = 2;
  std::vector<std::array<PantsSide, 2>> curves_;
  std::vector<std::array<int, 3>> side_curve_;

  friend SurfaceComplex build_surface(int g, const std::vector<std::array<PantsSide, 2>>& curves);
};

// Canonical gluing: pants in a ring through slots 2 -> 0, plus slot-1 rungs
// between pants 2k and 2k + 1. For g = 2 this is the theta graph.
SurfaceComplex build_surface(int g);
SurfaceComplex build_surface(int g, const std::vector<std::array<PantsSide, 2>>& curves);

// Oriented sigma pair of one edge class: x is based at the edge's backward
// endpoint (for a closed curve, the repelling fixed point of the orienting
// generator), y at the forward one.
struct SigmaPair {
  double x = 0;
  double y = 0;
};

// Shear and triangle coordinates of a convex projective structure:
// q_sigma[i][j] belongs to spiralling class j of pants i, p_sigma[k] to
// curve k, tau[i] to the base triangle of pants i and its neighbour across
// the edge joining the repelling points of generators 0 and 2. Total length
// 22g - 22.
struct BDCoords {
  std::vector<std::array<SigmaPair, 3>> q_sigma;
  std::vector<SigmaPair> p_sigma;
  std::vector<std::array<double, 2>> tau;
};

BDCoords zero_bd(const SurfaceComplex& s);

// Coordinates of a hyperbolized structure: every sigma equal to 1, every tau
// zero. Satisfies the closed leaf relations with both margins equal to 2.
BDCoords fuchsian_like(const SurfaceComplex& s);

// Closed leaf relation checks for one curve. residual[0] is the defect of
// the equality based at the repelling end of the orienting generator,
// residual[1] of the one based at the attracting end. The margins are the
// two common values of those equalities, log(l1/l2) and log(l2/l3) of the
// holonomy eigenvalues |l1| > |l2| > |l3|; the inequalities require both to
// be positive.
struct CurveCheck {
  double residual[2] = {0, 0};
  double margin[2] = {0, 0};
};

struct BDReport {
  std::vector<CurveCheck> curves;
  double max_residual = 0;
  double min_margin = 0;
  bool accepted = false;
};

// Residuals and margins of every closed leaf relation; accepted iff all
// residuals are below eps_closed and all margins strictly positive.
BDReport validate_bd(const SurfaceComplex& s, const BDCoords& c);

struct BDDimension {
  int params = 0;
  int rank = 0;
  int dim = 0;
};

// Coordinate count 22g - 22, numeric rank of the assembled relation system,
// and the difference, computed on the canonical gluing.
BDDimension bd_dimension(int g);

// Basis of the solution directions of the (affine) closed leaf equalities;
// size 16g - 16. Adding any combination to a valid coordinate vector
// preserves the equalities, and small combinations keep the margins.
std::vector<BDCoords> bd_tangent_basis(const SurfaceComplex& s);

// The two common values of the closed leaf equalities for curve k: the log
// eigenvalue gaps (log(l1/l2), log(l2/l3)) of the orienting generator's
// holonomy. Meaningful on coordinates passing validate_bd.
std::array<double, 2> boundary_log_eigen(const SurfaceComplex& s, const BDCoords& c, int curve);

// Surface-level flow selector. Shear and bulge target a closed curve and act
// on its sigma pair by (-t, -t) and (+t, -t); eruption targets a pants and
// moves the tau pair by (+t, -t) while re-deriving the boundary curves'
// sigma pairs from truncated developments; internal bulging targets a pants
// with every affected value taken from truncated developments. The string
// form is 1-based: "shear:c2", "bulge:c1", "eruption:P1", "internal_bulge:P2".
struct SurfaceFlowSpec {
  enum class Kind { shear, bulge, eruption, internal_bulge };
  Kind kind = Kind::shear;
  int index = 0;

  static SurfaceFlowSpec parse(const std::string& text);
  std::string format() const;
};

// Flowed coordinates. Closed-curve shear and bulge are exact shifts; pants
// eruption and internal bulging evaluate stage limits of the equivariant
// development and raise ConvergenceFailure if the stages are not Cauchy
// within eps_converge at the maximal depth.
BDCoords flow_coords(const SurfaceComplex& s, const BDCoords& c, const SurfaceFlowSpec& flow,
                     double t);

}  // namespace projflow
