#include "projflow/surface.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "projflow/scalars.hpp"

namespace projflow {

namespace {

// Column layout of the flattened coordinate vector: eight pants-local values
// (the sigma pairs of the three spiralling classes, then the tau pair),
// followed by the closed sigma pairs.
struct Layout {
  int n_pants = 0;
  int n_curves = 0;
  int cols() const { return 8 * n_pants + 2 * n_curves; }
  int qx(int i, int j) const { return 8 * i + 2 * j; }
  int qy(int i, int j) const { return 8 * i + 2 * j + 1; }
  int tau(int i, int half) const { return 8 * i + 6 + half; }
  int px(int k) const { return 8 * n_pants + 2 * k; }
  int py(int k) const { return 8 * n_pants + 2 * k + 1; }
};

Layout layout_of(const SurfaceComplex& s) { return {s.num_pants(), s.num_curves()}; }

// Spiralling sigma sum of one curve side based at the curve end: class
// `boundary` meets the curve at its backward endpoint, class `boundary - 1`
// at its forward one.
double near_sum(const BDCoords& c, PantsSide sd) {
  return c.q_sigma[sd.pants][sd.boundary].x + c.q_sigma[sd.pants][(sd.boundary + 2) % 3].y;
}

double far_sum(const BDCoords& c, PantsSide sd) {
  return c.q_sigma[sd.pants][sd.boundary].y + c.q_sigma[sd.pants][(sd.boundary + 2) % 3].x;
}

double tau_sum(const BDCoords& c, int pants) { return c.tau[pants][0] + c.tau[pants][1]; }

void stamp_near(std::vector<double>& row, const Layout& L, PantsSide sd, double w) {
  row[L.qx(sd.pants, sd.boundary)] += w;
  row[L.qy(sd.pants, (sd.boundary + 2) % 3)] += w;
}

void stamp_far(std::vector<double>& row, const Layout& L, PantsSide sd, double w) {
  row[L.qy(sd.pants, sd.boundary)] += w;
  row[L.qx(sd.pants, (sd.boundary + 2) % 3)] += w;
}

// Two relation rows per curve: the near sum on the repelling side equals the
// far sum plus the tau sum on the attracting side, and the same with the two
// ends swapped.
std::vector<std::vector<double>> relation_rows(const SurfaceComplex& s) {
  Layout L = layout_of(s);
  std::vector<std::vector<double>> rows;
  rows.reserve(2 * s.curves().size());
  for (const auto& cur : s.curves()) {
    PantsSide a = cur[0], b = cur[1];
    std::vector<double> r1(L.cols(), 0.0), r2(L.cols(), 0.0);
    stamp_near(r1, L, a, 1);
    stamp_far(r1, L, b, -1);
    r1[L.tau(b.pants, 0)] -= 1;
    r1[L.tau(b.pants, 1)] -= 1;
    stamp_far(r2, L, a, 1);
    r2[L.tau(a.pants, 0)] += 1;
    r2[L.tau(a.pants, 1)] += 1;
    stamp_near(r2, L, b, -1);
    rows.push_back(std::move(r1));
    rows.push_back(std::move(r2));
  }
  return rows;
}

// Reduced row echelon form in place; returns the pivot columns. Entries stay
// small integers, so a fixed pivot threshold is safe.
std::vector<int> rref(std::vector<std::vector<double>>& m) {
  std::vector<int> pivots;
  if (m.empty()) return pivots;
  int rows = static_cast<int>(m.size());
  int cols = static_cast<int>(m[0].size());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int best = -1;
    double mag = 1e-9;
    for (int i = r; i < rows; ++i) {
      if (std::fabs(m[i][c]) > mag) {
        mag = std::fabs(m[i][c]);
        best = i;
      }
    }
    if (best < 0) continue;
    std::swap(m[r], m[best]);
    double inv = 1.0 / m[r][c];
    for (int j = c; j < cols; ++j) m[r][j] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0.0) continue;
      double f = m[i][c];
      for (int j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

BDCoords unflatten(const SurfaceComplex& s, const std::vector<double>& v) {
  Layout L = layout_of(s);
  BDCoords c;
  c.q_sigma.resize(L.n_pants);
  c.tau.resize(L.n_pants);
  c.p_sigma.resize(L.n_curves);
  for (int i = 0; i < L.n_pants; ++i) {
    for (int j = 0; j < 3; ++j) c.q_sigma[i][j] = {v[L.qx(i, j)], v[L.qy(i, j)]};
    c.tau[i] = {v[L.tau(i, 0)], v[L.tau(i, 1)]};
  }
  for (int k = 0; k < L.n_curves; ++k) c.p_sigma[k] = {v[L.px(k)], v[L.py(k)]};
  return c;
}

void check_sizes(const SurfaceComplex& s, const BDCoords& c) {
  if (static_cast<int>(c.q_sigma.size()) != s.num_pants() ||
      static_cast<int>(c.tau.size()) != s.num_pants() ||
      static_cast<int>(c.p_sigma.size()) != s.num_curves())
    throw LengthMismatch("coordinate vector does not match the surface");
}

}  // namespace

int SurfaceComplex::curve_at(PantsSide s) const { return side_curve_[s.pants][s.boundary]; }

PantsSide SurfaceComplex::across(PantsSide s) const {
  const auto& c = curves_[curve_at(s)];
  return c[0] == s ? c[1] : c[0];
}

bool SurfaceComplex::orients(PantsSide s) const { return curves_[curve_at(s)][0] == s; }

std::string SurfaceComplex::curve_id(int k) const { return "c" + std::to_string(k + 1); }

std::string SurfaceComplex::edge_id(int pants, int j) const {
  return "e" + std::to_string(pants + 1) + "." + std::to_string(j + 1);
}

std::string SurfaceComplex::triangle_id(int pants, bool prime) const {
  return "T" + std::to_string(pants + 1) + (prime ? "'" : "");
}

SurfaceComplex build_surface(int g, const std::vector<std::array<PantsSide, 2>>& curves) {
  if (g < 2) throw InvalidGluing("genus must be at least 2");
  int np = 2 * g - 2;
  if (static_cast<int>(curves.size()) != 3 * g - 3)
    throw InvalidGluing("a genus g gluing needs 3g - 3 pants curves");
  std::vector<std::array<int, 3>> slot_curve(np, {-1, -1, -1});
  for (int k = 0; k < static_cast<int>(curves.size()); ++k) {
    for (const PantsSide& sd : curves[k]) {
      if (sd.pants < 0 || sd.pants >= np || sd.boundary < 0 || sd.boundary > 2)
        throw InvalidGluing("pants side out of range");
      if (slot_curve[sd.pants][sd.boundary] != -1)
        throw InvalidGluing("pants boundary glued twice");
      slot_curve[sd.pants][sd.boundary] = k;
    }
  }
  // 2(3g - 3) sides over 3(2g - 2) slots with no slot reused covers every
  // boundary, so only connectivity is left to check.
  std::vector<char> reached(np, 0);
  std::vector<int> stack = {0};
  reached[0] = 1;
  while (!stack.empty()) {
    int p = stack.back();
    stack.pop_back();
    for (int j = 0; j < 3; ++j) {
      const auto& cur = curves[slot_curve[p][j]];
      int q = (cur[0].pants == p && cur[0].boundary == j) ? cur[1].pants : cur[0].pants;
      if (!reached[q]) {
        reached[q] = 1;
        stack.push_back(q);
      }
    }
  }
  if (std::count(reached.begin(), reached.end(), 1) != np)
    throw InvalidGluing("pants gluing is not connected");

  SurfaceComplex out;
  out.g_ = g;
  out.curves_ = curves;
  out.side_curve_ = std::move(slot_curve);
  return out;
}

SurfaceComplex build_surface(int g) {
  if (g < 2) throw InvalidGluing("genus must be at least 2");
  int np = 2 * g - 2;
  std::vector<std::array<PantsSide, 2>> curves;
  curves.reserve(3 * g - 3);
  for (int i = 0; i < np; ++i)
    curves.push_back({PantsSide{i, 2}, PantsSide{(i + 1) % np, 0}});
  for (int k = 0; k + 1 < np; k += 2)
    curves.push_back({PantsSide{k, 1}, PantsSide{k + 1, 1}});
  return build_surface(g, curves);
}

BDCoords zero_bd(const SurfaceComplex& s) {
  BDCoords c;
  c.q_sigma.assign(s.num_pants(), {SigmaPair{}, SigmaPair{}, SigmaPair{}});
  c.p_sigma.assign(s.num_curves(), SigmaPair{});
  c.tau.assign(s.num_pants(), {0.0, 0.0});
  return c;
}

BDCoords fuchsian_like(const SurfaceComplex& s) {
  BDCoords c = zero_bd(s);
  for (auto& pants : c.q_sigma)
    for (auto& sp : pants) sp = {1.0, 1.0};
  for (auto& sp : c.p_sigma) sp = {1.0, 1.0};
  return c;
}

BDReport validate_bd(const SurfaceComplex& s, const BDCoords& c) {
  check_sizes(s, c);
  BDReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& cur : s.curves()) {
    PantsSide a = cur[0], b = cur[1];
    CurveCheck ck;
    ck.margin[0] = near_sum(c, a);
    ck.margin[1] = near_sum(c, b);
    ck.residual[0] = ck.margin[0] - (far_sum(c, b) + tau_sum(c, b.pants));
    ck.residual[1] = (far_sum(c, a) + tau_sum(c, a.pants)) - ck.margin[1];
    rep.max_residual = std::max(
        {rep.max_residual, std::fabs(ck.residual[0]), std::fabs(ck.residual[1])});
    rep.min_margin = std::min({rep.min_margin, ck.margin[0], ck.margin[1]});
    rep.curves.push_back(ck);
  }
  rep.accepted = rep.max_residual < tol().cl && rep.min_margin > 0;
  return rep;
}

BDDimension bd_dimension(int g) {
  SurfaceComplex s = build_surface(g);
  auto rows = relation_rows(s);
  int rank = static_cast<int>(rref(rows).size());
  int params = layout_of(s).cols();
  return {params, rank, params - rank};
}

std::vector<BDCoords> bd_tangent_basis(const SurfaceComplex& s) {
  auto m = relation_rows(s);
  Layout L = layout_of(s);
  std::vector<int> pivots = rref(m);
  std::vector<char> is_pivot(L.cols(), 0);
  for (int p : pivots) is_pivot[p] = 1;
  std::vector<BDCoords> basis;
  for (int f = 0; f < L.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<double> v(L.cols(), 0.0);
    v[f] = 1.0;
    for (int r = 0; r < static_cast<int>(pivots.size()); ++r) v[pivots[r]] = -m[r][f];
    basis.push_back(unflatten(s, v));
  }
  return basis;
}

std::array<double, 2> boundary_log_eigen(const SurfaceComplex& s, const BDCoords& c, int curve) {
  check_sizes(s, c);
  if (curve < 0 || curve >= s.num_curves()) throw InvalidAnchors("curve index out of range");
  const auto& cur = s.curves()[curve];
  return {near_sum(c, cur[0]), near_sum(c, cur[1])};
}

SurfaceFlowSpec SurfaceFlowSpec::parse(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw DegenerateInput("surface flow spec must look like kind:target");
  std::string kind = text.substr(0, colon);
  std::string target = text.substr(colon + 1);
  SurfaceFlowSpec spec;
  if (kind == "shear") {
    spec.kind = Kind::shear;
  } else if (kind == "bulge") {
    spec.kind = Kind::bulge;
  } else if (kind == "eruption") {
    spec.kind = Kind::eruption;
  } else if (kind == "internal_bulge") {
    spec.kind = Kind::internal_bulge;
  } else {
    throw DegenerateInput("unknown surface flow kind");
  }
  bool wants_curve = spec.kind == Kind::shear || spec.kind == Kind::bulge;
  if (target.size() < 2 || target[0] != (wants_curve ? 'c' : 'P'))
    throw InvalidAnchors(wants_curve ? "shear and bulge target a closed curve, e.g. c1"
                                     : "eruption and internal bulging target a pants, e.g. P1");
  int idx = 0;
  char extra = 0;
  if (std::sscanf(target.c_str() + 1, "%d%c", &idx, &extra) != 1 || idx < 1)
    throw InvalidAnchors("flow target index must be a positive 1-based integer");
  spec.index = idx - 1;
  return spec;
}

std::string SurfaceFlowSpec::format() const {
  static const char* const names[] = {"shear", "bulge", "eruption", "internal_bulge"};
  bool wants_curve = kind == Kind::shear || kind == Kind::bulge;
  return std::string(names[static_cast<int>(kind)]) + ":" + (wants_curve ? "c" : "P") +
         std::to_string(index + 1);
}

}  // namespace projflow
