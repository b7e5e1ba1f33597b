#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "projflow/scalars.hpp"
#include "projflow/surface.hpp"

using namespace projflow;
using namespace pf_test;

TEST_CASE("surface counts") {
  for (int g : {2, 3, 5}) {
    SurfaceComplex s = build_surface(g);
    CHECK(s.genus() == g);
    CHECK(s.num_pants() == 2 * g - 2);
    CHECK(s.num_curves() == 3 * g - 3);
    CHECK(s.num_spiral_edges() == 6 * g - 6);
    CHECK(s.num_triangles() == 4 * g - 4);
    BDCoords c = zero_bd(s);
    int len = 6 * static_cast<int>(c.q_sigma.size()) + 2 * static_cast<int>(c.p_sigma.size()) +
              2 * static_cast<int>(c.tau.size());
    CHECK(len == 22 * g - 22);
  }
}

TEST_CASE("surface navigation") {
  SurfaceComplex s = build_surface(2);
  for (int i = 0; i < s.num_pants(); ++i) {
    for (int j = 0; j < 3; ++j) {
      PantsSide sd{i, j};
      int k = s.curve_at(sd);
      CHECK(k >= 0);
      CHECK(k < s.num_curves());
      PantsSide other = s.across(sd);
      CHECK(s.across(other) == sd);
      CHECK(s.curve_at(other) == k);
      CHECK(s.orients(sd) != s.orients(other));
    }
  }
  CHECK(s.curve_id(0) == "c1");
  CHECK(s.edge_id(1, 2) == "e2.3");
  CHECK(s.triangle_id(0, false) == "T1");
  CHECK(s.triangle_id(0, true) == "T1'");
}

TEST_CASE("invalid gluings") {
  CHECK_THROWS_AS(build_surface(1), InvalidGluing);
  CHECK_THROWS_AS(build_surface(2, {}), InvalidGluing);

  std::vector<std::array<PantsSide, 2>> reused = {
      {PantsSide{0, 0}, PantsSide{1, 0}},
      {PantsSide{0, 1}, PantsSide{1, 1}},
      {PantsSide{0, 2}, PantsSide{1, 1}},
  };
  CHECK_THROWS_AS(build_surface(2, reused), InvalidGluing);

  std::vector<std::array<PantsSide, 2>> out_of_range = {
      {PantsSide{0, 0}, PantsSide{1, 0}},
      {PantsSide{0, 1}, PantsSide{1, 1}},
      {PantsSide{0, 2}, PantsSide{2, 2}},
  };
  CHECK_THROWS_AS(build_surface(2, out_of_range), InvalidGluing);

  std::vector<std::array<PantsSide, 2>> disconnected;
  for (int base : {0, 2})
    for (int j = 0; j < 3; ++j)
      disconnected.push_back({PantsSide{base, j}, PantsSide{base + 1, j}});
  CHECK_THROWS_AS(build_surface(3, disconnected), InvalidGluing);

  // Two one-holed tori glued along their boundary: self-gluings are fine as
  // long as the two sides are distinct slots.
  std::vector<std::array<PantsSide, 2>> torus_pair = {
      {PantsSide{0, 0}, PantsSide{0, 1}},
      {PantsSide{0, 2}, PantsSide{1, 0}},
      {PantsSide{1, 1}, PantsSide{1, 2}},
  };
  SurfaceComplex s = build_surface(2, torus_pair);
  CHECK(s.across(PantsSide{0, 0}) == PantsSide{0, 1});
  CHECK(s.curve_at(PantsSide{1, 2}) == 2);
}

TEST_CASE("closed leaf relations") {
  SurfaceComplex s = build_surface(2);

  BDReport zero_rep = validate_bd(s, zero_bd(s));
  CHECK(!zero_rep.accepted);
  CHECK(zero_rep.max_residual == 0.0);
  CHECK(zero_rep.min_margin == 0.0);

  BDCoords fuch = fuchsian_like(s);
  BDReport fuch_rep = validate_bd(s, fuch);
  CHECK(fuch_rep.accepted);
  CHECK(fuch_rep.max_residual == 0.0);
  CHECK(fuch_rep.min_margin == 2.0);
  REQUIRE(fuch_rep.curves.size() == 3);
  for (const auto& ck : fuch_rep.curves) {
    CHECK(ck.margin[0] == 2.0);
    CHECK(ck.margin[1] == 2.0);
  }

  // A tau perturbation enters exactly one equality per boundary of its
  // pants, so three residuals move, each by the perturbation itself.
  BDCoords pert = fuch;
  pert.tau[0][0] += 0.1;
  BDReport pert_rep = validate_bd(s, pert);
  CHECK(!pert_rep.accepted);
  int moved = 0;
  for (const auto& ck : pert_rep.curves) {
    for (double r : ck.residual) {
      if (std::fabs(r) > 1e-12) {
        ++moved;
        CHECK(std::fabs(r) == doctest::Approx(0.1).epsilon(1e-12));
      }
    }
  }
  CHECK(moved == 3);

  BDCoords violated = fuch;
  violated.q_sigma[0][0].x += 1e-6;
  CHECK(!validate_bd(s, violated).accepted);

  BDCoords wrong = fuch;
  wrong.p_sigma.pop_back();
  CHECK_THROWS_AS(validate_bd(s, wrong), LengthMismatch);
}

TEST_CASE("dimension counts") {
  for (int g : {2, 3, 4}) {
    BDDimension d = bd_dimension(g);
    CHECK(d.params == 22 * g - 22);
    CHECK(d.rank == 6 * g - 6);
    CHECK(d.dim == 16 * g - 16);
  }
  CHECK(static_cast<int>(bd_tangent_basis(build_surface(2)).size()) == 16);
  CHECK(static_cast<int>(bd_tangent_basis(build_surface(3)).size()) == 32);
}

TEST_CASE("tangent basis spans the relation variety") {
  SurfaceComplex s = build_surface(2);
  auto basis = bd_tangent_basis(s);
  for (int it = 0; it < 25; ++it) {
    BDCoords c = fuchsian_like(s);
    for (const auto& dir : basis) bd_axpy(c, dir, uniform(-0.1, 0.1));
    BDReport rep = validate_bd(s, c);
    CHECK(rep.max_residual < 1e-12);
    CHECK(rep.min_margin > 0);
    CHECK(rep.accepted);
  }
}

TEST_CASE("boundary log eigen") {
  SurfaceComplex s = build_surface(2);
  BDCoords fuch = fuchsian_like(s);
  for (int k = 0; k < s.num_curves(); ++k) {
    auto le = boundary_log_eigen(s, fuch, k);
    CHECK(le[0] == 2.0);
    CHECK(le[1] == 2.0);
  }
  CHECK_THROWS_AS(boundary_log_eigen(s, fuch, 3), InvalidAnchors);

  // On the relation variety the values coincide with the validation margins.
  BDCoords c = random_bd(s);
  BDReport rep = validate_bd(s, c);
  REQUIRE(rep.accepted);
  for (int k = 0; k < s.num_curves(); ++k) {
    auto le = boundary_log_eigen(s, c, k);
    CHECK(le[0] == rep.curves[k].margin[0]);
    CHECK(le[1] == rep.curves[k].margin[1]);
  }
}

TEST_CASE("surface flow specs") {
  SurfaceFlowSpec sp = SurfaceFlowSpec::parse("shear:c2");
  CHECK(sp.kind == SurfaceFlowSpec::Kind::shear);
  CHECK(sp.index == 1);
  CHECK(sp.format() == "shear:c2");
  CHECK(SurfaceFlowSpec::parse("eruption:P1").format() == "eruption:P1");
  CHECK(SurfaceFlowSpec::parse("internal_bulge:P2").format() == "internal_bulge:P2");
  CHECK(SurfaceFlowSpec::parse("bulge:c12").index == 11);

  CHECK_THROWS_AS(SurfaceFlowSpec::parse("twist:c1"), DegenerateInput);
  CHECK_THROWS_AS(SurfaceFlowSpec::parse("shear"), DegenerateInput);
  CHECK_THROWS_AS(SurfaceFlowSpec::parse("shear:P1"), InvalidAnchors);
  CHECK_THROWS_AS(SurfaceFlowSpec::parse("eruption:c1"), InvalidAnchors);
  CHECK_THROWS_AS(SurfaceFlowSpec::parse("shear:c0"), InvalidAnchors);
  CHECK_THROWS_AS(SurfaceFlowSpec::parse("shear:cx"), InvalidAnchors);
  CHECK_THROWS_AS(SurfaceFlowSpec::parse("shear:c1x"), InvalidAnchors);
}
