#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "projflow/projective.hpp"
#include "projflow/surface.hpp"

namespace projflow {

// Exact position on the circle [0, 1): num / 2^exp in lowest terms. Vertex
// positions of a developed lift live here so that sector membership during
// flows is decided by integer arithmetic, never by a float comparison.
class Dyadic {
 public:
  Dyadic() = default;
  static Dyadic make(std::int64_t num, int exp);

  std::int64_t num() const { return num_; }
  int exp() const { return exp_; }
  double to_double() const;

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.num_ == b.num_ && a.exp_ == b.exp_;
  }
  friend bool operator<(const Dyadic& a, const Dyadic& b);

 private:
  std::int64_t num_ = 0;
  int exp_ = 0;
};

// Midpoint of the counterclockwise arc from a to b.
Dyadic cyclic_midpoint(const Dyadic& a, const Dyadic& b);
// Strict membership of x in the open counterclockwise arc from a to b.
bool cyclically_between(const Dyadic& a, const Dyadic& x, const Dyadic& b);

// Word in the peripheral generators of one pair of pants. Letters +-1, +-2,
// +-3 name the three generators and their inverses, 1-based to match curve
// ids; the leftmost letter is the leftmost factor of the product.
using Word = std::vector<int>;

// Eliminate the middle generator through the relation and cancel freely.
// The result uses letters +-1 and +-3 only.
Word reduce_word(Word w);

struct DevVertex {
  int block;   // 0 for the base lift, 1 + slot for the neighbour across slot
  int role;    // generator whose repelling orbit the vertex lies in
  Dyadic pos;  // circle position realizing the boundary cyclic order
  Flag flag;
};

struct DevTriangle {
  int block;
  bool prime;  // false for translates of the base triangle, true for its mirror
  Word word;   // reduced word moving the base triangle of this type here
  int ring;    // dual-tree distance from the block's seed pair
  int side;    // subtree of the seed edge: 0 under the base triangle, 1 under its mirror
  std::array<int, 3> verts;  // verts[k] lies in generator k's repelling orbit
  std::array<int, 3> nbr;    // triangle across the class-k edge, -1 if absent
};

// Oriented spiralling edge. The class-k edge of a triangle runs from
// verts[k] (backward endpoint x) to verts[(k + 1) % 3] (forward endpoint y),
// matching the x/y ends of SigmaPair.
struct DevEdge {
  int block;
  int cls;
  int x, y;
  int tri;  // triangle whose enumeration step contributed the edge
};

// Flags of the universal-cover triangulation over one pants lift and its
// three neighbour lifts, each developed to dual-tree radius K and glued
// across the boundary closed edges.
class Development {
 public:
  const SurfaceComplex& surface() const { return surface_; }
  const BDCoords& coords() const { return coords_; }
  int base_pants() const { return base_; }
  int depth() const { return K_; }
  int word_cap() const { return L_; }

  const std::vector<DevVertex>& vertices() const { return verts_; }
  const std::vector<DevTriangle>& triangles() const { return tris_; }
  // Edges in enumeration order: triangles by ring, base-triangle subtree
  // first within a ring, each triangle contributing its unseen edges by
  // class. Internal bulging factors follow this order within a block.
  const std::vector<DevEdge>& edges() const { return edges_; }

  int num_blocks() const { return static_cast<int>(block_pants_.size()); }
  int block_pants(int b) const { return block_pants_[b]; }
  int block_first_triangle(int b) const { return block_first_tri_[b]; }

  // Index of the (prime, word) triangle of a block, -1 when not developed.
  int find_triangle(int block, bool prime, const Word& word) const;

  // Combinatorial data of the closed edge at one boundary slot of the base
  // pants: x is the seed vertex whose spiral edges wind into the slot's
  // repelling point, z the first wing beside it, w the next wing, gz and gw
  // their translates one period up the boundary generator, zp the first wing
  // on the neighbour block's side. gw is -1 below radius 3.
  struct Chain {
    int x = -1, z = -1, w = -1, gz = -1, gw = -1, zp = -1;
    Word slot_word;
  };
  const Chain& chain(int slot) const;

  // Holonomy of the slot's peripheral generator read off the current flags.
  ProjMap truncated_boundary_holonomy(int slot) const;

 private:
  friend struct DevAccess;

  SurfaceComplex surface_ = build_surface(2);
  BDCoords coords_;
  int base_ = 0, K_ = 0, L_ = 0;
  std::vector<DevVertex> verts_;
  std::vector<DevTriangle> tris_;
  std::vector<DevEdge> edges_;
  std::vector<int> block_pants_;
  std::vector<int> block_first_tri_;
  std::map<std::tuple<int, int, Word>, int> tri_lookup_;
  std::array<Chain, 3> chains_{};
};

// Develop the lift of pants `pants` and its three neighbours to radius K,
// with holonomy lookups capped at reduced word length L. The coordinates
// must pass validate_bd.
Development develop(const SurfaceComplex& s, const BDCoords& c, int pants, int K, int L);

// Holonomy of a word in the base pants' peripheral generators, computed by
// matching the base triangle to its translate. Throws OutOfDepth when the
// reduced word exceeds the cap or its translate was not developed.
ProjMap holonomy(const Development& d, const Word& word);

// Enumeration order of the elementary factors of a truncated equivariant
// flow. ring_reversed reverses the order inside each ring's two subtree
// groups; both orders exhaust the same sets and must agree in the limit.
enum class FactorOrder { standard, ring_reversed };

// Apply the first j elementary factors of the equivariant eruption or
// internal bulging flow of the selected pants, then renormalize so the base
// triangle's pinned flag data returns to its input position.
Development truncated_equivariant_flow(const Development& d, const SurfaceFlowSpec& flow,
                                       double t, int j, FactorOrder order = FactorOrder::standard);

// Sigma pair of the closed edge at a boundary slot of the base pants, read
// off the current flags. The attracting flag of the truncated boundary
// holonomy stands in for the far endpoint of the closed edge.
SigmaPair closed_edge_sigma_estimate(const Development& d, int slot);

// Limit of the products u r u r^-1 r^2 u r^-2 ... r^k u r^-k for loxodromic
// r with eigenvalues 0 < alpha < beta < gamma and unipotent u fixing the
// repelling flag of r.
ProjMap unipotent_limit(const ProjMap& r, const ProjMap& u);

// Stage-by-stage sigma estimates at one boundary slot under a truncated
// equivariant flow, with the closed-form prediction assembled from a single
// period of factors.
struct ConvergenceReport {
  // Unflowed estimate first, then the estimate after each completed period
  // of the slot's spiral fan. Estimates between periods carry a transient
  // half-period twist, so periods are the meaningful sampling points.
  std::vector<SigmaPair> stages;
  SigmaPair limit{};             // last stage
  SigmaPair prediction{};        // unipotent-limit prediction
  bool cauchy = false;           // last two stages within eps_converge
  bool unipotent_ok = false;     // one-period factor numerically unipotent
  bool agrees = false;           // cauchy, unipotent, and limit near prediction
  bool oracle_available = true;  // reserved for curves without a two-sided chain
};

ConvergenceReport converge_report(const SurfaceComplex& s, const BDCoords& c,
                                  const SurfaceFlowSpec& flow, double t, int slot, int K, int L,
                                  bool substitute_shear = false,
                                  FactorOrder order = FactorOrder::standard);

// Vertex of the universal-cover triangulation: word * (repelling point of
// generator `slot` of pants `pants`), read in the base block when via < 0
// and in the neighbour block across base boundary slot `via` otherwise.
struct VertexDescriptor {
  int pants = 0;
  int slot = 0;
  Word word{};
  int via = -1;
};

// Ordered truncation of the family of triangulation edges separating x0 from
// y0, grouped into spiral fans collapsed to min / closed / max and the
// finite runs between consecutive fans.
struct TransverseEdgeSet {
  struct Entry {
    VertexDescriptor a, b;
    double pos_a = 0, pos_b = 0;  // circle positions, a in the arc (x0, y0)
    bool closed = false;          // the edge itself is a closed leaf
    int fan = 0;                  // 1-based fan index, 0 for a between-run edge
    char part = 's';              // 'a' min, 'b' closed, 'c' max of a fan, 's' otherwise
  };
  std::vector<Entry> edges;
  int fans = 0;
  // Triangles spanned by consecutive edges; each pair shares a vertex.
  std::vector<std::array<VertexDescriptor, 3>> triangles;
};

TransverseEdgeSet transverse_edge_set(const SurfaceComplex& s, const VertexDescriptor& x0,
                                      const VertexDescriptor& y0, int L);

}  // namespace projflow
