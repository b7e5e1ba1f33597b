#pragma once

#include <array>
#include <map>
#include <utility>
#include <vector>

#include "projflow/projective.hpp"

namespace projflow {

// Cyclically ordered positive flag tuple. Constructed only through
// validate_tuple, so every instance is pairwise transverse and every
// ascending cyclic triple has positive triple ratio.
class FlagTuple {
 public:
  int size() const { return static_cast<int>(flags_.size()); }
  const std::vector<Flag>& flags() const { return flags_; }

  // Cyclic 0-based access.
  const Flag& operator[](int i) const {
    int n = size();
    return flags_[((i % n) + n) % n];
  }

 private:
  explicit FlagTuple(std::vector<Flag> flags) : flags_(std::move(flags)) {}
  std::vector<Flag> flags_;

  friend FlagTuple validate_tuple(const std::vector<Flag>& flags);
};

FlagTuple validate_tuple(const std::vector<Flag>& flags);

// The two nested polygons of a positive tuple: inner vertex i is p_i, outer
// vertex i is meet(l_i, l_{i+1}). chart is a covector strictly positive on
// both polygons; dividing representatives by it gives an affine chart in
// which both are convex and nested.
struct PolygonPair {
  std::vector<ProjPoint> inner;
  std::vector<ProjPoint> outer;
  ProjLine chart;
};

PolygonPair nested_polygons(const FlagTuple& t);

// Triangulation of the labelled n-gon by pairwise non-crossing internal
// edges. Vertices are 0-based; edges are stored with i < j and triangles
// in ascending index order.
class Triangulation {
 public:
  static Triangulation fan(int n);
  static Triangulation from_edges(int n, std::vector<std::pair<int, int>> internal_edges);

  int n() const { return n_; }
  const std::vector<std::pair<int, int>>& internal_edges() const { return edges_; }
  const std::vector<std::array<int, 3>>& triangles() const { return tris_; }

  bool has_internal_edge(int i, int j) const;

  // Third vertices {k, k'} of the two triangles adjacent to internal edge
  // (i, j), with i < k < j < k' < i in the cyclic order.
  std::array<int, 2> wings(int i, int j) const;

 private:
  Triangulation() = default;
  void finish();

  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::array<int, 3>> tris_;
};

// sigma carries both orientations of every internal edge, tau one value per
// triangle (vertices ascending).
struct FGCoords {
  std::map<std::pair<int, int>, double> sigma;
  std::map<std::array<int, 3>, double> tau;
};

FGCoords fg_coords(const FlagTuple& t, const Triangulation& tri);

// Inverse of fg_coords up to ProjMap. The representative is pinned by
// placing the first triangle of tri in standard position.
FlagTuple reconstruct(const FGCoords& c, const Triangulation& tri);

}  // namespace projflow
