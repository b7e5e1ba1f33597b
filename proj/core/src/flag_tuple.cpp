#include "projflow/flag_tuple.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <string>

#include "ldops.hpp"
#include "projflow/invariants.hpp"
#include "projflow/scalars.hpp"

namespace projflow {

namespace {

// True if walking counterclockwise from a one meets x strictly before b.
bool cyclically_between(int a, int x, int b, int n) {
  return ((x - a) % n + n) % n < ((b - a) % n + n) % n;
}

}  // namespace

FlagTuple validate_tuple(const std::vector<Flag>& flags) {
  int n = static_cast<int>(flags.size());
  if (n < 3) throw DegenerateInput("flag tuple needs at least 3 flags");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!transverse(flags[i], flags[j]))
        throw NotTransverse("flags are not transverse", i, j);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        if (triple_ratio(flags[i], flags[j], flags[k]) <= tol().pos)
          throw NotPositive("triple ratio is not positive", i, j, k);
  return FlagTuple(flags);
}

PolygonPair nested_polygons(const FlagTuple& t) {
  int n = t.size();
  // Reference interior point: the inner-triangle vertex of the first triple.
  ProjPoint m = triangle_frame(t[0], t[1], t[2]).u[0];

  Vec3 omega(0, 0, 0);
  for (int i = 0; i < n; ++i) {
    Vec3 l = t[i].line.rep();
    omega = omega + l * (dot(l, m.rep()) >= 0 ? 1.0 : -1.0);
  }
  ProjLine chart(omega);

  PolygonPair pair{{}, {}, chart};
  for (int i = 0; i < n; ++i) {
    pair.inner.push_back(t[i].point);
    pair.outer.push_back(meet(t[i].line, t[i + 1].line));
  }
  for (const ProjPoint& v : pair.outer)
    if (std::fabs(chart.eval(v)) <= tol().sing)
      throw ChartFailure("outer vertex escapes the nesting chart");
  return pair;
}

Triangulation Triangulation::fan(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int j = 2; j <= n - 2; ++j) edges.emplace_back(0, j);
  return from_edges(n, std::move(edges));
}

Triangulation Triangulation::from_edges(int n, std::vector<std::pair<int, int>> internal_edges) {
  if (n < 3) throw IncompatibleTriangulation("polygon needs at least 3 vertices");
  Triangulation tri;
  tri.n_ = n;
  for (auto& [i, j] : internal_edges) {
    if (i > j) std::swap(i, j);
    if (i < 0 || j >= n || i == j)
      throw IncompatibleTriangulation("edge index out of range");
    if (j - i < 2 || (i == 0 && j == n - 1))
      throw IncompatibleTriangulation("polygon side listed as internal edge");
  }
  std::sort(internal_edges.begin(), internal_edges.end());
  if (std::adjacent_find(internal_edges.begin(), internal_edges.end()) != internal_edges.end())
    throw IncompatibleTriangulation("duplicate internal edge");
  if (static_cast<int>(internal_edges.size()) != n - 3)
    throw IncompatibleTriangulation("a triangulation of the n-gon has n-3 internal edges");
  for (size_t a = 0; a < internal_edges.size(); ++a)
    for (size_t b = a + 1; b < internal_edges.size(); ++b) {
      auto [p, q] = internal_edges[a];
      auto [r, s] = internal_edges[b];
      if ((p < r && r < q && q < s) || (r < p && p < s && s < q))
        throw IncompatibleTriangulation("internal edges cross");
    }
  tri.edges_ = std::move(internal_edges);
  tri.finish();
  return tri;
}

bool Triangulation::has_internal_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(i, j));
}

void Triangulation::finish() {
  auto spans = [&](int i, int j) {
    return (j - i + n_) % n_ == 1 || (i - j + n_) % n_ == 1 || has_internal_edge(i, j);
  };
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      for (int k = j + 1; k < n_; ++k)
        if (spans(i, j) && spans(j, k) && spans(i, k)) tris_.push_back({i, j, k});
  if (static_cast<int>(tris_.size()) != n_ - 2)
    throw IncompatibleTriangulation("edges do not triangulate the polygon");
}

std::array<int, 2> Triangulation::wings(int i, int j) const {
  if (!has_internal_edge(i, j))
    throw IncompatibleTriangulation("(" + std::to_string(i) + "," + std::to_string(j) +
                                    ") is not an internal edge");
  std::array<int, 2> out = {-1, -1};
  for (const auto& tr : tris_) {
    int third = -1;
    int hit = 0;
    for (int v : tr) {
      if (v == i || v == j)
        ++hit;
      else
        third = v;
    }
    if (hit == 2) {
      if (cyclically_between(i, third, j, n_))
        out[0] = third;
      else
        out[1] = third;
    }
  }
  if (out[0] < 0 || out[1] < 0)
    throw IncompatibleTriangulation("internal edge lacks two adjacent triangles");
  return out;
}

FGCoords fg_coords(const FlagTuple& t, const Triangulation& tri) {
  if (tri.n() != t.size())
    throw IncompatibleTriangulation("triangulation size does not match tuple size");
  FGCoords c;
  for (auto [i, j] : tri.internal_edges()) {
    auto [k, kp] = tri.wings(i, j);
    ProjLine edge_line = join(t[i].point, t[j].point);
    double cij =
        cross_ratio(t[i].line, CrossArg(t[k].point), CrossArg(t[kp].point), edge_line);
    double cji =
        cross_ratio(t[j].line, CrossArg(t[kp].point), CrossArg(t[k].point), edge_line);
    if (cij >= 0 || cji >= 0)
      throw DegenerateInput("edge cross ratio is not negative on a positive tuple");
    c.sigma[{i, j}] = std::log(-cij);
    c.sigma[{j, i}] = std::log(-cji);
  }
  for (const auto& tr : tri.triangles())
    c.tau[tr] = std::log(triple_ratio(t[tr[0]], t[tr[1]], t[tr[2]]));
  return c;
}

FlagTuple reconstruct(const FGCoords& c, const Triangulation& tri) {
  int n = tri.n();
  for (auto [i, j] : tri.internal_edges())
    if (!c.sigma.count({i, j}) || !c.sigma.count({j, i}))
      throw IncompatibleTriangulation("missing sigma pair for an internal edge");
  for (const auto& tr : tri.triangles())
    if (!c.tau.count(tr)) throw IncompatibleTriangulation("missing tau for a triangle");

  std::vector<std::optional<Flag>> fl(n);

  const auto& tris = tri.triangles();
  const auto& seed = tris.front();
  double scale = std::exp(-c.tau.at(seed) / 2);
  fl[seed[0]] = Flag(ProjPoint(0, 1, 1), ProjLine(1, 0, 0));
  fl[seed[1]] = Flag(ProjPoint(1, 0, scale), ProjLine(0, 1, 0));
  fl[seed[2]] = Flag(ProjPoint(scale, 1, 0), ProjLine(0, 0, 1));

  // Walk the dual tree, attaching the one unknown vertex of each neighbour.
  std::vector<bool> done(tris.size(), false);
  std::deque<size_t> queue = {0};
  done[0] = true;
  while (!queue.empty()) {
    size_t cur = queue.front();
    queue.pop_front();
    for (size_t other = 0; other < tris.size(); ++other) {
      if (done[other]) continue;
      int shared[2], count = 0;
      for (int a : tris[cur])
        for (int b : tris[other])
          if (a == b && count < 2) shared[count++] = a;
      if (count != 2) continue;

      int a = shared[0], b = shared[1];
      int apex = tris[cur][0] + tris[cur][1] + tris[cur][2] - a - b;
      int fresh = tris[other][0] + tris[other][1] + tris[other][2] - a - b;

      // sigma_{i,j} sees the known apex on the i < k < j side.
      int i = a, j = b;
      if (!cyclically_between(i, apex, j, n)) std::swap(i, j);

      using detail::lcross;
      using detail::ldot;
      using detail::lv;
      using detail::LV;
      const LV pi = lv(fl[i]->point.rep()), pj = lv(fl[j]->point.rep());
      const LV pk = lv(fl[apex]->point.rep());
      const LV li = lv(fl[i]->line.rep()), lj = lv(fl[j]->line.rep());

      long double cij = -expl(static_cast<long double>(c.sigma.at({i, j})));
      long double cji = -expl(static_cast<long double>(c.sigma.at({j, i})));
      LV x1 = pj + pk * (ldot(li, pj) / ((cij - 1) * ldot(li, pk)));
      LV x2 = pi + pk * (cji * ldot(lj, pi) / ((1 - cji) * ldot(lj, pk)));
      LV pn = lcross(lcross(pi, x1), lcross(pj, x2));
      ProjPoint p_new(detail::lround3(pn));

      // Line through p_new from the new triangle's tau, with the unknown
      // vertex rotated into the last slot of the ascending cyclic triple.
      std::array<int, 3> rot = tris[other];
      while (rot[2] != fresh) rot = {rot[1], rot[2], rot[0]};
      const LV pa = lv(fl[rot[0]]->point.rep()), pb = lv(fl[rot[1]]->point.rep());
      const LV la = lv(fl[rot[0]]->line.rep()), lb = lv(fl[rot[1]]->line.rep());
      long double alpha =
          expl(static_cast<long double>(c.tau.at(tris[other]))) * ldot(la, pn) * ldot(lb, pa);
      long double beta = ldot(la, pb) * ldot(lb, pn);
      LV u = lcross(pn, pa);
      LV v = lcross(pn, pb);
      long double s = (beta * ldot(u, pa) - alpha * ldot(u, pb)) /
                      (alpha * ldot(v, pb) - beta * ldot(v, pa));
      fl[fresh] = Flag(p_new, ProjLine(detail::lround3(u + v * s)));

      done[other] = true;
      queue.push_back(other);
    }
  }

  std::vector<Flag> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(*fl[i]);
  return validate_tuple(out);
}

}  // namespace projflow
