#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "projflow/projective.hpp"

using namespace projflow;
using namespace pf_test;

TEST_CASE("canonical representatives") {
  ProjPoint p(2, 0, -4);
  CHECK(p.rep().z > 0);
  CHECK(norm(p.rep()) == doctest::Approx(1.0).epsilon(1e-14));

  // Re-canonicalization is idempotent.
  ProjPoint q(p.rep());
  CHECK(std::fabs(q.rep().x - p.rep().x) < 1e-15);
  CHECK(std::fabs(q.rep().y - p.rep().y) < 1e-15);
  CHECK(std::fabs(q.rep().z - p.rep().z) < 1e-15);

  // Last nonzero entry positive even when it is not the z slot.
  ProjPoint r(3, -5, 0);
  CHECK(r.rep().y > 0);

  CHECK(ProjPoint(1, 2, 3) == ProjPoint(-2, -4, -6));
  CHECK(ProjPoint(1, 2, 3) != ProjPoint(1, 2, 3.001));
  CHECK_THROWS_AS(ProjPoint(0, 0, 0), DegenerateInput);
}

TEST_CASE("join and meet") {
  CHECK(join(ProjPoint(1, 0, 0), ProjPoint(0, 1, 0)) == ProjLine(0, 0, 1));
  CHECK(join(ProjPoint(1, 0, 1), ProjPoint(-1, 0, 1)) == ProjLine(0, 1, 0));
  CHECK_THROWS_AS(join(ProjPoint(1, 2, 3), ProjPoint(-1, -2, -3)), DegenerateInput);

  CHECK(meet(ProjLine(1, 0, 0), ProjLine(0, 1, 0)) == ProjPoint(0, 0, 1));
  CHECK(meet(ProjLine(1, 0, -1), ProjLine(0, 1, -1)) == ProjPoint(1, 1, 1));
  CHECK_THROWS_AS(meet(ProjLine(1, 1, 1), ProjLine(2, 2, 2)), DegenerateInput);

  // Containment of both inputs.
  for (int it = 0; it < 100; ++it) {
    ProjPoint p = random_point(), q = random_point();
    if (p == q) continue;
    ProjLine l = join(p, q);
    CHECK(std::fabs(l.eval(p)) < 1e-12);
    CHECK(std::fabs(l.eval(q)) < 1e-12);
  }

  // Duality: meet(join(p,q), join(p,r)) = p for generic triples.
  for (int it = 0; it < 100; ++it) {
    ProjPoint p = random_point(), q = random_point(), r = random_point();
    if (std::fabs(det3(p.rep(), q.rep(), r.rep())) < 1e-3) continue;
    CHECK(meet(join(p, q), join(p, r)) == p);
  }
}

TEST_CASE("flags") {
  CHECK_NOTHROW(Flag(ProjPoint(1, 0, 0), ProjLine(0, 1, 0)));
  CHECK_THROWS_AS(Flag(ProjPoint(1, 1, 1), ProjLine(1, 0, 0)), DegenerateInput);

  Flag a(ProjPoint(1, 0, 0), ProjLine(0, 1, 0));
  Flag b(ProjPoint(0, 1, 0), ProjLine(1, 0, 0));
  Flag c(ProjPoint(1, 0, 0), ProjLine(0, 0, 1));
  CHECK(transverse(a, b));
  CHECK_FALSE(transverse(a, c));  // shared point lies on both lines
}

TEST_CASE("projective maps act on points, lines, flags") {
  ProjMap g = random_map();
  for (int it = 0; it < 50; ++it) {
    ProjPoint p = random_point(), q = random_point();
    if (p == q) continue;
    // Incidence is preserved: g(join(p,q)) = join(g(p), g(q)).
    CHECK(g(join(p, q)) == join(g(p), g(q)));
  }
  ProjMap id = ProjMap::identity();
  CHECK(g * g.inverse() == id);
  CHECK_THROWS_AS(ProjMap(Mat3(1, 2, 3, 2, 4, 6, 0, 0, 1)), DegenerateInput);
}

TEST_CASE("map_from_points") {
  std::array<ProjPoint, 4> basis = {ProjPoint(1, 0, 0), ProjPoint(0, 1, 0), ProjPoint(0, 0, 1),
                                    ProjPoint(1, 1, 1)};
  CHECK(map_from_points(basis, basis) == ProjMap::identity());

  std::array<ProjPoint, 4> dst = {ProjPoint(1, 0, 0), ProjPoint(0, 1, 0), ProjPoint(0, 0, 1),
                                  ProjPoint(1, 2, 3)};
  CHECK(map_from_points(basis, dst) == ProjMap(Mat3::diag(1, 2, 3)));

  std::array<ProjPoint, 4> bad = {ProjPoint(1, 0, 0), ProjPoint(0, 1, 0), ProjPoint(1, 1, 0),
                                  ProjPoint(1, 1, 1)};
  CHECK_THROWS_AS(map_from_points(bad, basis), NotGeneric);
  CHECK_THROWS_AS(map_from_points(basis, bad), NotGeneric);

  // Round trip composes to the identity; the map hits all four targets.
  for (int it = 0; it < 50; ++it) {
    std::array<ProjPoint, 4> s = {random_point(), random_point(), random_point(), random_point()};
    std::array<ProjPoint, 4> d = {random_point(), random_point(), random_point(), random_point()};
    try {
      ProjMap m = map_from_points(s, d);
      for (int i = 0; i < 4; ++i) CHECK(m(s[i]) == d[i]);
      CHECK(m * map_from_points(d, s) == ProjMap::identity());
    } catch (const NotGeneric&) {
      continue;  // rejected quadruples are fine for random input
    }
  }
}

TEST_CASE("map_from_flag_data") {
  Flag a(ProjPoint(1, 0, 0), ProjLine(0, 1, 0));
  Flag b(ProjPoint(0, 1, 0), ProjLine(1, 0, 0));
  ProjPoint c(1, 1, 1);

  CHECK(map_from_flag_data(a, b, c, a, b, c) == ProjMap::identity());
  CHECK(map_from_flag_data(a, b, c, a, b, ProjPoint(1, 2, 4)) == ProjMap(Mat3::diag(1, 2, 4)));

  // Source point on a flag line is rejected.
  CHECK_THROWS_AS(map_from_flag_data(a, b, ProjPoint(1, 0, 1), a, b, c), DegeneratePoint);
  // Point on the line joining the flag points is also non-unique.
  CHECK_THROWS_AS(map_from_flag_data(a, b, ProjPoint(1, 1, 0), a, b, c), DegeneratePoint);
  // Non-transverse flag pair.
  Flag a2(ProjPoint(1, 0, 0), ProjLine(0, 0, 1));
  CHECK_THROWS_AS(map_from_flag_data(a, a2, c, a, b, c), NotTransverse);

  // Generic: the map hits all six targets.
  for (int it = 0; it < 50; ++it) {
    ProjMap g = random_map();
    Flag ga = g(a), gb = g(b);
    ProjPoint gc = g(c);
    ProjMap m = map_from_flag_data(a, b, c, ga, gb, gc);
    CHECK(m(a.point) == ga.point);
    CHECK(m(a.line) == ga.line);
    CHECK(m(b.point) == gb.point);
    CHECK(m(b.line) == gb.line);
    CHECK(m(c) == gc);
    CHECK(m == g);
  }
}

TEST_CASE("eigen_flags on diagonal and conjugated maps") {
  EigenFlags e = eigen_flags(ProjMap(Mat3::diag(4, 2, 1)));
  CHECK(e.logratios[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(e.logratios[1] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(e.attracting_point == ProjPoint(1, 0, 0));
  CHECK(e.neutral_point == ProjPoint(0, 1, 0));
  CHECK(e.repelling_point == ProjPoint(0, 0, 1));
  CHECK(e.attracting_line == ProjLine(0, 0, 1));
  CHECK(e.repelling_line == ProjLine(1, 0, 0));

  // Attracting/repelling points lie on their lines by construction.
  CHECK(e.attracting_line.contains(e.attracting_point));
  CHECK(e.repelling_line.contains(e.repelling_point));

  Mat3 rot(std::cos(1.0), -std::sin(1.0), 0, std::sin(1.0), std::cos(1.0), 0, 0, 0, 1);
  CHECK_THROWS_AS(eigen_flags(ProjMap(rot)), NotLoxodromic);

  for (int it = 0; it < 50; ++it) {
    ProjMap g = random_map();
    ProjMap conj = g * ProjMap(Mat3::diag(9, 3, 1)) * g.inverse();
    EigenFlags ec = eigen_flags(conj);
    CHECK(ec.logratios[0] == doctest::Approx(std::log(3.0)).epsilon(1e-9));
    CHECK(ec.logratios[1] == doctest::Approx(std::log(3.0)).epsilon(1e-9));
    // Conjugation equivariance.
    CHECK(ec.attracting_point == g(ProjPoint(1, 0, 0)));
    CHECK(ec.neutral_point == g(ProjPoint(0, 1, 0)));
    CHECK(ec.repelling_point == g(ProjPoint(0, 0, 1)));
    CHECK(ec.attracting_line == g(ProjLine(0, 0, 1)));
    CHECK(ec.repelling_line == g(ProjLine(1, 0, 0)));
  }

  // Negative-spectrum classes admit no positive representative.
  CHECK_THROWS_AS(eigen_flags(ProjMap(Mat3::diag(-4, 2, -1))), NotLoxodromic);
}
