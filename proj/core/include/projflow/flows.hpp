#pragma once

#include <array>
#include <string>
#include <vector>

#include "projflow/flag_tuple.hpp"

namespace projflow {

// One elementary flow application. Anchors are 0-based tuple indices; the
// string form used by the CLI is 1-based, e.g. "eruption:1,4,7@0.5" and
// "shear:1,3@-2".
struct FlowSpec {
  enum class Kind { eruption, shear, bulge };
  Kind kind = Kind::eruption;
  std::array<int, 3> anchors = {0, 0, -1};  // anchors[2] is -1 for shear/bulge
  double time = 0;

  static FlowSpec parse(const std::string& text);
  std::string format() const;
};

// Eruption flow on the anchor triple (i, j, k), which must be ascending in
// the cyclic order of the tuple. The anchor triple ratio scales by e^s; in
// any triangulation containing the anchor triangle, tau of that triangle
// shifts by s and every other coordinate is unchanged.
FlagTuple eruption(const FlagTuple& t, const std::array<int, 3>& anchors, double s);

// Shearing flow on the anchor pair: both oriented sigma values of the edge
// shift by -s.
FlagTuple shear(const FlagTuple& t, const std::array<int, 2>& anchors, double s);

// Bulging flow on the anchor pair: the oriented sigma values shift by
// (+s, -s).
FlagTuple bulge(const FlagTuple& t, const std::array<int, 2>& anchors, double s);

FlagTuple apply(const FlagTuple& t, const FlowSpec& spec);
FlagTuple apply(const FlagTuple& t, const std::vector<FlowSpec>& schedule);

// Deterministic schedule turning coordinates c1 into c2: one eruption per
// triangle (time = tau delta), then per internal edge one shear and one
// bulge solving (-s+b, -s-b) = sigma pair delta. Zero-time entries are kept.
std::vector<FlowSpec> solve_transition(const FGCoords& c1, const FGCoords& c2,
                                       const Triangulation& tri);

}  // namespace projflow
