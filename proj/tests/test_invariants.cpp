#include "doctest.h"

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "projflow/invariants.hpp"

using namespace projflow;
using namespace pf_test;

namespace {

// Four random distinct lines through a common random center.
struct Pencil {
  ProjPoint center;
  std::array<ProjLine, 4> l;
};

Pencil random_pencil() {
  for (;;) {
    ProjPoint c = random_point();
    std::array<ProjLine, 4> l = {join(c, random_point()), join(c, random_point()),
                                 join(c, random_point()), join(c, random_point())};
    bool distinct = true;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (l[i] == l[j]) distinct = false;
    if (distinct) return {c, l};
  }
}

double cr_lines(const std::array<ProjLine, 4>& l) {
  return cross_ratio(l[0], CrossArg(l[1]), CrossArg(l[2]), l[3]);
}

// Positive flag triple from a perturbed conic triple.
std::array<Flag, 3> random_positive_triple() {
  for (;;) {
    // Keep every cyclic gap below pi so all three tangent meets stay in the
    // z = 1 chart on the near side of the conic.
    double a0 = uniform(0, 2);
    double a1 = a0 + uniform(1.7, 2.75);
    double a2 = a1 + uniform(1.7, 2.75);
    if (2 * M_PI - (a2 - a0) < 0.5 || 2 * M_PI - (a2 - a0) > 2.75) continue;
    std::array<Flag, 3> f = {conic_flag(a0), conic_flag(a1), conic_flag(a2)};
    for (int k = 0; k < 3; ++k) {
      double ang = (k == 0 ? a0 : (k == 1 ? a1 : a2));
      Vec3 tangent_dir(-std::sin(ang), std::cos(ang), 0);
      ProjPoint p(f[k].point.rep() + tangent_dir * uniform(-0.15, 0.15));
      f[k] = Flag(p, f[k].line);
    }
    try {
      if (triple_ratio(f[0], f[1], f[2]) > 0.05) return f;
    } catch (const NotTransverse&) {
    }
  }
}

}  // namespace

TEST_CASE("cross ratio pencil example and symmetries") {
  ProjLine l1(0, 1, 0), l2(1, 0, 0), l3(1, -1, 0), l4(1, -2, 0);
  double c = cross_ratio(l1, CrossArg(l2), CrossArg(l3), l4);
  CHECK(c == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cross_ratio(l1, CrossArg(l3), CrossArg(l2), l4) == doctest::Approx(0.5).epsilon(1e-12));

  // Non-concurrent middle line.
  CHECK_THROWS_AS(cross_ratio(l1, CrossArg(ProjLine(1, 0, 1)), CrossArg(l3), l4), NotConcurrent);
  // Middle point at the pencil center.
  CHECK_THROWS_AS(cross_ratio(l1, CrossArg(ProjPoint(0, 0, 1)), CrossArg(l3), l4),
                  DegenerateInput);

  for (int it = 0; it < 100; ++it) {
    Pencil p = random_pencil();
    double v;
    try {
      v = cr_lines(p.l);
    } catch (const DegenerateInput&) {
      continue;  // repeated line drawn through the center
    }
    double swap_mid = cr_lines({p.l[0], p.l[2], p.l[1], p.l[3]});
    double swap_first = cr_lines({p.l[1], p.l[0], p.l[2], p.l[3]});
    double reversed = cr_lines({p.l[3], p.l[2], p.l[1], p.l[0]});
    CHECK(swap_mid == doctest::Approx(1.0 / v).epsilon(1e-9));
    CHECK(swap_first == doctest::Approx(1.0 - v).epsilon(1e-9));
    CHECK(reversed == doctest::Approx(v).epsilon(1e-9));

    ProjMap g = random_map();
    double mapped = cr_lines({g(p.l[0]), g(p.l[1]), g(p.l[2]), g(p.l[3])});
    CHECK(mapped == doctest::Approx(v).epsilon(1e-9));

    // Point middles through the pencil agree with their lines.
    ProjPoint p2(cross(p.l[1].rep(), p.center.rep()));
    ProjPoint p3(cross(p.l[2].rep(), p.center.rep()));
    CHECK(cross_ratio(p.l[0], CrossArg(p2), CrossArg(p3), p.l[3]) ==
          doctest::Approx(v).epsilon(1e-9));
  }
}

TEST_CASE("collinear cross ratio") {
  auto on_axis = [](double x) { return ProjPoint(x, 0, 1); };
  CHECK(cross_ratio_collinear(on_axis(0), on_axis(1), on_axis(2), on_axis(3)) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK(cross_ratio_collinear(on_axis(-1), on_axis(0), on_axis(0.5), on_axis(1)) ==
        doctest::Approx(3.0).epsilon(1e-12));

  CHECK_THROWS_AS(cross_ratio_collinear(on_axis(0), on_axis(1), ProjPoint(1, 1, 1), on_axis(3)),
                  NotCollinear);
  CHECK_THROWS_AS(cross_ratio_collinear(on_axis(0), on_axis(0), on_axis(2), on_axis(3)),
                  DegenerateInput);

  // Pencil reduction is independent of the auxiliary center.
  for (int it = 0; it < 20; ++it) {
    double x[4] = {uniform(-2, 2), uniform(-2, 2), uniform(-2, 2), uniform(-2, 2)};
    std::sort(x, x + 4);
    if (x[1] - x[0] < 0.1 || x[2] - x[1] < 0.1 || x[3] - x[2] < 0.1) continue;
    double direct = cross_ratio_collinear(on_axis(x[0]), on_axis(x[1]), on_axis(x[2]),
                                          on_axis(x[3]));
    ProjPoint q = random_point();
    if (std::fabs(q.rep().y) < 0.1) continue;  // keep q off the axis
    double via_pencil = cross_ratio(join(q, on_axis(x[0])), CrossArg(on_axis(x[1])),
                                    CrossArg(on_axis(x[2])), join(q, on_axis(x[3])));
    CHECK(via_pencil == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("triple ratio") {
  Flag f1(ProjPoint(0, 1, 1), ProjLine(1, 0, 0));
  Flag f2(ProjPoint(1, 0, 2), ProjLine(0, 1, 0));
  Flag f3(ProjPoint(3, 1, 0), ProjLine(0, 0, 1));
  CHECK(triple_ratio(f1, f3, f2) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(triple_ratio(f1, f2, f3) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

  for (int it = 0; it < 100; ++it) {
    ProjMap g = random_map();
    CHECK(triple_ratio(g(f1), g(f2), g(f3)) == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
  }

  for (int it = 0; it < 100; ++it) {
    auto f = random_positive_triple();
    double t = triple_ratio(f[0], f[1], f[2]);
    CHECK(t * triple_ratio(f[0], f[2], f[1]) == doctest::Approx(1.0).epsilon(1e-9));
    // Cyclic invariance.
    CHECK(triple_ratio(f[1], f[2], f[0]) == doctest::Approx(t).epsilon(1e-9));
  }

  // Conic tangent flags: T = 1.
  for (int it = 0; it < 50; ++it) {
    double a = uniform(0, 2), b = a + uniform(0.4, 2.0), c = b + uniform(0.4, 2.0);
    if (c - a > 6.0) continue;
    CHECK(triple_ratio(conic_flag(a), conic_flag(b), conic_flag(c)) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }

  Flag dup(ProjPoint(0, 1, 1), ProjLine(1, 0, 0));
  CHECK_THROWS_AS(triple_ratio(f1, dup, f3), NotTransverse);
}

TEST_CASE("triangle frame") {
  // Symmetric conic triple: the inner triangle degenerates to a point.
  double ang[3] = {M_PI / 2, M_PI / 2 + 2 * M_PI / 3, M_PI / 2 + 4 * M_PI / 3};
  auto fr = triangle_frame(conic_flag(ang[0]), conic_flag(ang[1]), conic_flag(ang[2]));
  CHECK(fr.u[0] == fr.u[1]);
  CHECK(fr.u[1] == fr.u[2]);

  // The worked T = 6 triple: all three frame cross ratios equal T(F1,F3,F2).
  Flag f1(ProjPoint(0, 1, 1), ProjLine(1, 0, 0));
  Flag f2(ProjPoint(1, 0, 2), ProjLine(0, 1, 0));
  Flag f3(ProjPoint(3, 1, 0), ProjLine(0, 0, 1));
  auto fr6 = triangle_frame(f1, f2, f3);
  for (int i = 0; i < 3; ++i) {
    int im1 = (i + 2) % 3, ip1 = (i + 1) % 3;
    const ProjPoint& pi = (i == 0 ? f1 : (i == 1 ? f2 : f3)).point;
    double c = cross_ratio_collinear(pi, fr6.u[im1], fr6.u[ip1], fr6.q[i]);
    CHECK(c == doctest::Approx(6.0).epsilon(1e-9));
  }

  // Frame identity on random positive triples.
  for (int it = 0; it < 50; ++it) {
    auto f = random_positive_triple();
    double t_rev = triple_ratio(f[0], f[2], f[1]);
    auto frame = triangle_frame(f[0], f[1], f[2]);
    for (int i = 0; i < 3; ++i) {
      int im1 = (i + 2) % 3, ip1 = (i + 1) % 3;
      double c = cross_ratio_collinear(f[i].point, frame.u[im1], frame.u[ip1], frame.q[i]);
      CHECK(c == doctest::Approx(t_rev).epsilon(1e-9));
    }
  }

  // A non-positive triple: negate one flag point along its line (T = -1/6).
  Flag neg(ProjPoint(-3, 1, 0), ProjLine(0, 0, 1));
  CHECK(triple_ratio(f1, f2, neg) < 0);
  CHECK_THROWS_AS(triangle_frame(f1, f2, neg), NotPositive);
}

TEST_CASE("hilbert distance") {
  ConvexPolygonDomain square({ProjPoint(-1, -1, 1), ProjPoint(1, -1, 1), ProjPoint(1, 1, 1),
                              ProjPoint(-1, 1, 1)});
  CHECK(hilbert_distance(square, ProjPoint(0, 0, 1), ProjPoint(0.5, 0, 1)) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(hilbert_distance(square, ProjPoint(0.3, -0.2, 1), ProjPoint(0.3, -0.2, 1)) == 0.0);
  CHECK_THROWS_AS(hilbert_distance(square, ProjPoint(2, 0, 1), ProjPoint(0, 0, 1)),
                  PointOutsideDomain);

  CHECK_THROWS_AS(ConvexPolygonDomain({ProjPoint(0, 0, 1), ProjPoint(1, 0, 1), ProjPoint(2, 0, 1),
                                       ProjPoint(0, 1, 1)}),
                  NonConvexInput);
  CHECK_THROWS_AS(ConvexPolygonDomain({ProjPoint(0, 0, 1), ProjPoint(1, 0, 1), ProjPoint(1, 1, 1),
                                       ProjPoint(0.9, 0.2, 1)}),
                  NonConvexInput);

  // Metric axioms on random convex polygons.
  for (int it = 0; it < 50; ++it) {
    double cx = uniform(-0.3, 0.3), cy = uniform(-0.3, 0.3);
    double ax = uniform(0.5, 1.5), by = uniform(0.5, 1.5);
    int m = 3 + (int)(uniform(0, 6.999));
    std::vector<double> angs;
    for (int i = 0; i < m; ++i) angs.push_back(uniform(0, 2 * M_PI));
    std::sort(angs.begin(), angs.end());
    bool ok = true;
    for (int i = 1; i < m; ++i)
      if (angs[i] - angs[i - 1] < 0.15) ok = false;
    if (!ok || 2 * M_PI - (angs.back() - angs.front()) < 0.15) continue;
    std::vector<ProjPoint> vs;
    for (double a : angs) vs.emplace_back(cx + ax * std::cos(a), cy + by * std::sin(a), 1.0);
    ConvexPolygonDomain dom(vs);

    auto interior = [&] {
      double w[3] = {uniform(0.1, 1), uniform(0.1, 1), uniform(0.1, 1)};
      double s = w[0] + w[1] + w[2];
      int i0 = (int)uniform(0, m - 0.001), i1 = (i0 + 1) % m, i2 = (i0 + 2) % m;
      auto c0 = dom.chart_vertices()[i0], c1 = dom.chart_vertices()[i1],
           c2 = dom.chart_vertices()[i2];
      return ProjPoint((w[0] * c0[0] + w[1] * c1[0] + w[2] * c2[0]) / s,
                       (w[0] * c0[1] + w[1] * c1[1] + w[2] * c2[1]) / s, 1.0);
    };
    ProjPoint p = interior(), q = interior(), r = interior();
    double dpq = hilbert_distance(dom, p, q);
    double dqp = hilbert_distance(dom, q, p);
    double dpr = hilbert_distance(dom, p, r);
    double dqr = hilbert_distance(dom, q, r);
    CHECK(dpq >= 0.0);
    CHECK(std::fabs(dpq - dqp) < 1e-10);
    CHECK(dpr <= dpq + dqr + 1e-10);
  }

  // Inner triangle of a positive triple is Hilbert-equilateral in the outer
  // triangle, with side length |log T(F1,F3,F2)|.
  for (int it = 0; it < 50; ++it) {
    auto f = random_positive_triple();
    double target = std::fabs(std::log(triple_ratio(f[0], f[2], f[1])));
    if (target < 1e-6) continue;  // degenerate inner triangle
    auto frame = triangle_frame(f[0], f[1], f[2]);
    ConvexPolygonDomain tri({frame.q[0], frame.q[1], frame.q[2]});
    for (int i = 0; i < 3; ++i) {
      int im1 = (i + 2) % 3, ip1 = (i + 1) % 3;
      double d = hilbert_distance(tri, frame.u[im1], frame.u[ip1]);
      CHECK(d == doctest::Approx(target).epsilon(1e-9));
    }
  }
}
