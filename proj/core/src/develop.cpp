#include "projflow/develop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "flowkit.hpp"
#include "ldops.hpp"
#include "projflow/invariants.hpp"
#include "projflow/scalars.hpp"

namespace projflow {

namespace {
// Positions live on the dyadic circle; 62 keeps every intermediate in int64.
constexpr int kMaxDyadicExp = 62;
}  // namespace

Dyadic Dyadic::make(std::int64_t num, int exp) {
  if (exp < 0) throw DegenerateInput("dyadic exponent must be nonnegative");
  if (exp > kMaxDyadicExp) throw OutOfDepth("dyadic position depth exhausted");
  const std::int64_t den = std::int64_t(1) << exp;
  num %= den;
  if (num < 0) num += den;
  while (exp > 0 && num % 2 == 0) {
    num /= 2;
    --exp;
  }
  Dyadic d;
  d.num_ = num;
  d.exp_ = exp;
  return d;
}

double Dyadic::to_double() const { return std::ldexp(double(num_), -exp_); }

bool operator<(const Dyadic& a, const Dyadic& b) {
  const int e = std::max(a.exp_, b.exp_);
  return (a.num_ << (e - a.exp_)) < (b.num_ << (e - b.exp_));
}

namespace {

Dyadic dy_add(const Dyadic& a, const Dyadic& b) {
  const int e = std::max(a.exp(), b.exp());
  return Dyadic::make((a.num() << (e - a.exp())) + (b.num() << (e - b.exp())), e);
}

Dyadic dy_sub(const Dyadic& a, const Dyadic& b) {
  const int e = std::max(a.exp(), b.exp());
  return Dyadic::make((a.num() << (e - a.exp())) - (b.num() << (e - b.exp())), e);
}

// Product of two circle offsets, used to rescale a block into a gap.
Dyadic dy_mul(const Dyadic& a, const Dyadic& b) {
  if (a.exp() + b.exp() > kMaxDyadicExp)
    throw OutOfDepth("dyadic position depth exhausted");
  return Dyadic::make(a.num() * b.num(), a.exp() + b.exp());
}

Dyadic dy_half(const Dyadic& a) { return Dyadic::make(a.num(), a.exp() + 1); }

}  // namespace

Dyadic cyclic_midpoint(const Dyadic& a, const Dyadic& b) {
  return dy_add(a, dy_half(dy_sub(b, a)));
}

bool cyclically_between(const Dyadic& a, const Dyadic& x, const Dyadic& b) {
  const Dyadic ax = dy_sub(x, a);
  const Dyadic ab = dy_sub(b, a);
  if (ax.num() == 0 || ab.num() == 0) return false;
  return ax < ab;
}

Word reduce_word(Word w) {
  Word out;
  auto push = [&out](int g) {
    if (!out.empty() && out.back() == -g)
      out.pop_back();
    else
      out.push_back(g);
  };
  for (int letter : w) {
    switch (letter) {
      case 1:
      case -1:
      case 3:
      case -3:
        push(letter);
        break;
      case 2:
        push(-3);
        push(-1);
        break;
      case -2:
        push(1);
        push(3);
        break;
      default:
        throw DegenerateInput("word letters must be 1, 2 or 3 up to sign");
    }
  }
  return out;
}

namespace {

// Spiral word of one boundary slot, in the two surviving generators.
Word slot_word(int slot) {
  switch (slot) {
    case 0:
      return {1};
    case 1:
      return {-3, -1};
    default:
      return {3};
  }
}

Word word_concat(const Word& a, const Word& b) {
  Word out = a;
  for (int g : b) {
    if (!out.empty() && out.back() == -g)
      out.pop_back();
    else
      out.push_back(g);
  }
  return out;
}

Word word_pow(const Word& w, int p) {
  Word out;
  for (int i = 0; i < p; ++i) out = word_concat(out, w);
  return out;
}

std::pair<int, int> edge_key(int a, int b) {
  return {std::min(a, b), std::max(a, b)};
}

}  // namespace

// Internal access to the development's state for the builders in this file.
struct DevAccess {
  static SurfaceComplex& surface(Development& d) { return d.surface_; }
  static BDCoords& coords(Development& d) { return d.coords_; }
  static int& base(Development& d) { return d.base_; }
  static int& depth(Development& d) { return d.K_; }
  static int& word_cap(Development& d) { return d.L_; }
  static std::vector<DevVertex>& verts(Development& d) { return d.verts_; }
  static std::vector<DevTriangle>& tris(Development& d) { return d.tris_; }
  static std::vector<DevEdge>& edges(Development& d) { return d.edges_; }
  static std::vector<int>& block_pants(Development& d) { return d.block_pants_; }
  static std::vector<int>& block_first(Development& d) { return d.block_first_tri_; }
  static std::map<std::tuple<int, int, Word>, int>& lookup(Development& d) {
    return d.tri_lookup_;
  }
  static std::array<Development::Chain, 3>& chains(Development& d) {
    return d.chains_;
  }
};

namespace {

const Flag kPlaceholderFlag(ProjPoint(0, 1, 1), ProjLine(1, 0, 0));

// Appends the combinatorics of one block: the seed pair of triangles and K
// rings of children, each child glued across its parent's free edge. Vertex
// positions are exact dyadic circle points, so sector tests stay exact.
void build_block(Development& dev, int block, int pants, int K) {
  auto& verts = DevAccess::verts(dev);
  auto& tris = DevAccess::tris(dev);
  auto& edges = DevAccess::edges(dev);
  auto& lookup = DevAccess::lookup(dev);

  const int first_tri = int(tris.size());
  DevAccess::block_first(dev).push_back(first_tri);
  DevAccess::block_pants(dev).push_back(pants);

  auto add_vert = [&](int role, const Dyadic& pos) {
    verts.push_back(DevVertex{block, role, pos, kPlaceholderFlag});
    return int(verts.size()) - 1;
  };
  auto add_tri = [&](bool prime, const Word& w, int ring, int side,
                     const std::array<int, 3>& vv) {
    const int idx = int(tris.size());
    tris.push_back(DevTriangle{block, prime, w, ring, side, vv, {-1, -1, -1}});
    lookup[{block, prime ? 1 : 0, w}] = idx;
    return idx;
  };

  const int v0 = add_vert(0, Dyadic::make(0, 0));
  const int v1 = add_vert(1, Dyadic::make(1, 1));
  const int v2 = add_vert(2, Dyadic::make(1, 2));
  const int vm = add_vert(1, Dyadic::make(1, 3));

  const int base = add_tri(false, {}, 0, 0, {v0, v1, v2});
  const int mirror = add_tri(true, {}, 0, 1, {v0, vm, v2});
  tris[base].nbr[2] = mirror;
  tris[mirror].nbr[2] = base;

  int ring_begin = first_tri;
  int ring_end = int(tris.size());
  for (int r = 1; r <= K; ++r) {
    for (int p = ring_begin; p < ring_end; ++p) {
      for (int cls = 0; cls < 3; ++cls) {
        if (tris[p].nbr[cls] >= 0) continue;
        Word cw = tris[p].word;
        if (cls == 0)
          cw = word_concat(cw, {tris[p].prime ? -1 : 1});
        else if (cls == 1)
          cw = word_concat(cw, {tris[p].prime ? 3 : -3});
        const int ex = tris[p].verts[cls];
        const int ey = tris[p].verts[(cls + 1) % 3];
        const int apex = tris[p].verts[(cls + 2) % 3];
        // The fresh vertex halves the arc on the far side of the shared edge.
        const Dyadic pi = verts[ex].pos, pj = verts[ey].pos, pa = verts[apex].pos;
        const Dyadic fresh_pos = cyclically_between(pi, pa, pj)
                                     ? cyclic_midpoint(pj, pi)
                                     : cyclic_midpoint(pi, pj);
        const int fresh = add_vert((cls + 2) % 3, fresh_pos);
        std::array<int, 3> vv;
        vv[cls] = ex;
        vv[(cls + 1) % 3] = ey;
        vv[(cls + 2) % 3] = fresh;
        const int child = add_tri(!tris[p].prime, cw, r, tris[p].side, vv);
        tris[p].nbr[cls] = child;
        tris[child].nbr[cls] = p;
      }
    }
    ring_begin = ring_end;
    ring_end = int(tris.size());
  }

  std::set<std::pair<int, int>> seen;
  for (int t = first_tri; t < int(tris.size()); ++t) {
    for (int cls = 0; cls < 3; ++cls) {
      const int x = tris[t].verts[cls];
      const int y = tris[t].verts[(cls + 1) % 3];
      if (!seen.insert(edge_key(x, y)).second) continue;
      edges.push_back(DevEdge{block, cls, x, y, t});
    }
  }
}

int block_tri_end(const Development& d, int block) {
  return block + 1 < d.num_blocks() ? d.block_first_triangle(block + 1)
                                    : int(d.triangles().size());
}

// Additive coordinate shifts applied on top of the stored pants coordinates,
// keyed by global triangle and edge indices.
struct CoordLedger {
  const std::map<int, double>* tau = nullptr;
  const std::map<int, SigmaPair>* sigma = nullptr;

  double tau_delta(int tri) const {
    if (!tau) return 0;
    auto it = tau->find(tri);
    return it == tau->end() ? 0 : it->second;
  }
  SigmaPair sigma_delta(int edge) const {
    if (!sigma) return SigmaPair{0, 0};
    auto it = sigma->find(edge);
    return it == sigma->end() ? SigmaPair{0, 0} : it->second;
  }
};

// Recomputes every flag of one block from its coordinates: the seed pair in
// standard position, then one attach per triangle across its parent edge.
// Deterministic, so equal coordinates reproduce equal flags bitwise.
void flag_pass(Development& dev, int block, const CoordLedger& led) {
  auto& verts = DevAccess::verts(dev);
  auto& tris = DevAccess::tris(dev);
  auto& edges = DevAccess::edges(dev);
  const BDCoords& c = dev.coords();
  const int pants = dev.block_pants(block);
  const int first = dev.block_first_triangle(block);
  const int last = block_tri_end(dev, block);

  std::map<std::pair<int, int>, int> edge_of;
  for (int e = 0; e < int(edges.size()); ++e)
    if (edges[e].block == block) edge_of[edge_key(edges[e].x, edges[e].y)] = e;

  auto tau_of = [&](int t) {
    return c.tau[pants][tris[t].prime ? 1 : 0] + led.tau_delta(t);
  };

  {
    const DevTriangle& seed = tris[first];
    const double scale = std::exp(-tau_of(first) / 2);
    verts[seed.verts[0]].flag = Flag(ProjPoint(0, 1, 1), ProjLine(1, 0, 0));
    verts[seed.verts[2]].flag = Flag(ProjPoint(1, 0, scale), ProjLine(0, 1, 0));
    verts[seed.verts[1]].flag = Flag(ProjPoint(scale, 1, 0), ProjLine(0, 0, 1));
  }

  using detail::ldot;
  using detail::lcross;
  using detail::lround3;
  using detail::lv;
  using detail::LV;

  for (int t = first + 1; t < last; ++t) {
    int pcls = -1;
    for (int cls = 0; cls < 3; ++cls)
      if (tris[t].nbr[cls] >= 0 && tris[t].nbr[cls] < t) pcls = cls;
    int i = tris[t].verts[pcls];
    int j = tris[t].verts[(pcls + 1) % 3];
    const int parent = tris[t].nbr[pcls];
    const int apex = tris[parent].verts[(pcls + 2) % 3];
    const int fresh = tris[t].verts[(pcls + 2) % 3];
    // Orient the shared edge so the settled apex sits in the arc from i to j;
    // the fresh flag then closes an ascending cyclic triple with (i, j).
    if (!cyclically_between(verts[i].pos, verts[apex].pos, verts[j].pos))
      std::swap(i, j);
    const int e = edge_of.at(edge_key(i, j));
    const SigmaPair d = led.sigma_delta(e);
    const SigmaPair q = c.q_sigma[pants][edges[e].cls];
    const double s_ij = (edges[e].x == i ? q.x + d.x : q.y + d.y);
    const double s_ji = (edges[e].x == i ? q.y + d.y : q.x + d.x);

    const LV pi = lv(verts[i].flag.point.rep());
    const LV pj = lv(verts[j].flag.point.rep());
    const LV pk = lv(verts[apex].flag.point.rep());
    const LV li = lv(verts[i].flag.line.rep());
    const LV lj = lv(verts[j].flag.line.rep());
    const long double cij = -expl((long double)s_ij);
    const long double cji = -expl((long double)s_ji);
    const LV x1 = pj + pk * (ldot(li, pj) / ((cij - 1) * ldot(li, pk)));
    const LV x2 = pi + pk * (cji * ldot(lj, pi) / ((1 - cji) * ldot(lj, pk)));
    const LV pn = lcross(lcross(pi, x1), lcross(pj, x2));

    const long double alpha =
        expl((long double)tau_of(t)) * ldot(li, pn) * ldot(lj, pi);
    const long double beta = ldot(li, pj) * ldot(lj, pn);
    const LV u = lcross(pn, pi);
    const LV v = lcross(pn, pj);
    const long double sl = (beta * ldot(u, pi) - alpha * ldot(u, pj)) /
                           (alpha * ldot(v, pj) - beta * ldot(v, pi));
    verts[fresh].flag =
        Flag(ProjPoint(lround3(pn)), ProjLine(lround3(u + v * sl)));
  }
}

// Developed map sending the block's seed triangle onto its named translate.
ProjMap block_word_map(const Development& d, int block, const Word& w) {
  const int t = d.find_triangle(block, false, w);
  if (t < 0) throw OutOfDepth("translate not developed at this radius");
  const auto& tris = d.triangles();
  const auto& verts = d.vertices();
  const auto& s0 = tris[d.block_first_triangle(block)].verts;
  const auto& s1 = tris[t].verts;
  return map_from_flag_data(verts[s0[0]].flag, verts[s0[1]].flag,
                            verts[s0[2]].flag.point, verts[s1[0]].flag,
                            verts[s1[1]].flag, verts[s1[2]].flag.point);
}

// Standalone radius-2 block of one pants, deep enough for every spiral word.
Development scratch_block(const SurfaceComplex& s, const BDCoords& c, int pants) {
  Development d;
  DevAccess::surface(d) = s;
  DevAccess::coords(d) = c;
  DevAccess::base(d) = pants;
  DevAccess::depth(d) = 2;
  DevAccess::word_cap(d) = 0;
  build_block(d, 0, pants, 2);
  flag_pass(d, 0, CoordLedger{});
  return d;
}

ProjMap side_spiral_holonomy(const Development& d, int block, int spiral_slot) {
  const int need = spiral_slot == 2 ? 1 : 2;
  if (d.depth() >= need) return block_word_map(d, block, slot_word(spiral_slot));
  Development sc =
      scratch_block(d.surface(), d.coords(), d.block_pants(block));
  return block_word_map(sc, 0, slot_word(spiral_slot));
}

// Rescales a block built in standalone coordinates into the open gap between
// the deepest settled position after z and the axis vertex x'.
void embed_block_positions(Development& dev, int block, const Dyadic& z_pos,
                           const Dyadic& axis_pos, int first_vert,
                           const Dyadic& own_axis_pos) {
  auto& verts = DevAccess::verts(dev);
  Dyadic best = Dyadic::make(0, 0);
  const Dyadic arc = dy_sub(axis_pos, z_pos);
  for (int v = 0; v < first_vert; ++v) {
    const Dyadic off = dy_sub(verts[v].pos, z_pos);
    if (off.num() != 0 && off < arc && best < off) best = off;
  }
  const Dyadic y_pos = cyclic_midpoint(dy_add(z_pos, best), axis_pos);
  const Dyadic span = dy_sub(axis_pos, y_pos);
  for (int v = first_vert; v < int(verts.size()); ++v) {
    const Dyadic rel = dy_sub(verts[v].pos, own_axis_pos);
    verts[v].pos = dy_add(y_pos, dy_mul(rel, span));
  }
}

}  // namespace

int Development::find_triangle(int block, bool prime, const Word& word) const {
  auto it = tri_lookup_.find({block, prime ? 1 : 0, word});
  return it == tri_lookup_.end() ? -1 : it->second;
}

const Development::Chain& Development::chain(int slot) const {
  if (slot < 0 || slot > 2)
    throw InvalidAnchors("boundary slot must be 0, 1 or 2");
  return chains_[slot];
}

ProjMap Development::truncated_boundary_holonomy(int slot) const {
  if (slot < 0 || slot > 2)
    throw InvalidAnchors("boundary slot must be 0, 1 or 2");
  return block_word_map(*this, 0, slot_word(slot));
}

Development develop(const SurfaceComplex& s, const BDCoords& c, int pants,
                    int K, int L) {
  if (pants < 0 || pants >= s.num_pants())
    throw InvalidAnchors("pants index out of range");
  if (K < 1) throw DegenerateInput("development radius must be at least 1");
  if (L < 0) throw DegenerateInput("holonomy cap must be nonnegative");
  const BDReport rep = validate_bd(s, c);
  if (!rep.accepted)
    throw DegenerateInput("coordinates do not satisfy the closed leaf relations");

  Development dev;
  DevAccess::surface(dev) = s;
  DevAccess::coords(dev) = c;
  DevAccess::base(dev) = pants;
  DevAccess::depth(dev) = K;
  DevAccess::word_cap(dev) = L;

  build_block(dev, 0, pants, K);
  flag_pass(dev, 0, CoordLedger{});

  auto& verts = DevAccess::verts(dev);
  auto& tris = DevAccess::tris(dev);
  const int base_first = dev.block_first_triangle(0);

  for (int slot = 0; slot < 3; ++slot) {
    const PantsSide side{pants, slot};
    const PantsSide far = s.across(side);
    const int curve = s.curve_at(side);
    const int block = 1 + slot;
    const int first_vert = int(verts.size());

    build_block(dev, block, far.pants, K);
    flag_pass(dev, block, CoordLedger{});
    const int far_first = dev.block_first_triangle(block);
    const int x_far = tris[far_first].verts[far.boundary];
    const int zp = tris[far_first].verts[(far.boundary + 1) % 3];

    // Axis frames of the two spiral holonomies around the shared curve.
    std::optional<EigenFlags> ea, eb;
    try {
      ea = eigen_flags(side_spiral_holonomy(dev, 0, slot));
      eb = eigen_flags(side_spiral_holonomy(dev, block, far.boundary));
    } catch (const NotLoxodromic& e) {
      throw ConvergenceFailure(std::string("spiral holonomy: ") + e.what());
    } catch (const SpectralGapTooSmall& e) {
      throw ConvergenceFailure(std::string("spiral holonomy: ") + e.what());
    }
    const EigenFlags& EA = *ea;
    const EigenFlags& EB = *eb;

    const Mat3 TA = Mat3::from_cols(EA.attracting_point.rep(),
                                    EA.neutral_point.rep(),
                                    EA.repelling_point.rep());
    const Mat3 VB = Mat3::from_cols(EB.attracting_point.rep(),
                                    EB.neutral_point.rep(),
                                    EB.repelling_point.rep());
    const Mat3 flip = Mat3::from_cols(EA.repelling_point.rep(),
                                      EA.neutral_point.rep(),
                                      EA.attracting_point.rep());
    const Mat3 G0 = flip * VB.adjugate();
    const Mat3 TAadj = TA.adjugate();

    // Gauge freedom along the axis is fixed by the two gluing invariants.
    const int z = tris[base_first].verts[(slot + 1) % 3];
    const Vec3 zh = TAadj * verts[z].flag.point.rep();
    const Vec3 zeta = TAadj * (G0 * verts[zp].flag.point.rep());
    const SigmaPair p = c.p_sigma[curve];
    const double sx = s.orients(side) ? p.x : p.y;
    const double sy = s.orients(side) ? p.y : p.x;
    const double a = -std::exp(sx) * (zh.x * zeta.y) / (zeta.x * zh.y);
    const double b = -std::exp(-sy) * (zh.z * zeta.y) / (zeta.z * zh.y);
    const ProjMap G(TA * Mat3::diag(a, 1, b) * TAadj * G0);
    for (int v = first_vert; v < int(verts.size()); ++v)
      verts[v].flag = G(verts[v].flag);

    embed_block_positions(dev, block, verts[z].pos,
                          verts[tris[base_first].verts[slot]].pos, first_vert,
                          verts[x_far].pos);

    auto& ch = DevAccess::chains(dev)[slot];
    ch.slot_word = slot_word(slot);
    ch.x = tris[base_first].verts[slot];
    ch.z = z;
    ch.zp = zp;
    const int tp = dev.find_triangle(0, false, ch.slot_word);
    if (tp >= 0) {
      ch.gz = tris[tp].verts[(slot + 1) % 3];
      ch.w = tris[tp].verts[(slot + 2) % 3];
      const int t1 = tris[tp].nbr[(slot + 2) % 3];
      if (t1 >= 0) {
        const int t2 =
            dev.find_triangle(0, true, word_concat(ch.slot_word, tris[t1].word));
        if (t2 >= 0) ch.gw = tris[t2].verts[(slot + 2) % 3];
      }
    }
  }
  return dev;
}

ProjMap holonomy(const Development& d, const Word& word) {
  const Word w = reduce_word(word);
  if (int(w.size()) > d.word_cap())
    throw OutOfDepth("word exceeds the holonomy cap");
  if (w.empty()) return ProjMap::identity();
  return block_word_map(d, 0, w);
}

ProjMap unipotent_limit(const ProjMap& r, const ProjMap& u) {
  const EigenFlags E = eigen_flags(r);
  const Mat3 T = Mat3::from_cols(E.repelling_point.rep(), E.neutral_point.rep(),
                                 E.attracting_point.rep());
  const Mat3 Tadj = T.adjugate();
  const Mat3 up = Tadj * u.mat() * T;
  const double corner = up.m[0][0];
  if (std::fabs(corner) <= tol().sing * up.frobenius())
    throw DegenerateInput("u does not fix the repelling flag of r");
  const double a = up.m[0][1] / corner;
  const double b = up.m[0][2] / corner;
  const double c = up.m[1][2] / corner;
  const double low = std::max({std::fabs(up.m[1][0]), std::fabs(up.m[2][0]),
                               std::fabs(up.m[2][1])}) /
                     std::fabs(corner);
  if (low > 1e-6 * (1 + std::fabs(a) + std::fabs(b) + std::fabs(c)))
    throw DegenerateInput("u does not fix the repelling flag of r");
  // Eigenvalues in ascending modulus; the sums telescope into these weights.
  const double alpha = 1;
  const double beta = std::exp(E.logratios[1]);
  const double gamma = std::exp(E.logratios[1] + E.logratios[0]);
  Mat3 U = Mat3::identity();
  U.m[0][1] = a * beta / (beta - alpha);
  U.m[1][2] = c * gamma / (gamma - beta);
  U.m[0][2] = b * gamma / (gamma - alpha) +
              a * c * alpha * gamma / ((beta - alpha) * (gamma - alpha));
  return ProjMap(T * U * Tadj);
}

namespace {

// One multiplicative factor of a truncated flow: a triangle's eruption piece
// or an edge's bulge piece, scheduled shallow to deep.
struct Factor {
  bool edge;
  int idx;
  int ring;
  int side;
};

std::vector<Factor> flow_schedule(const Development& d,
                                  SurfaceFlowSpec::Kind kind,
                                  FactorOrder order) {
  const auto& tris = d.triangles();
  std::vector<Factor> out;
  if (kind == SurfaceFlowSpec::Kind::eruption) {
    const int last = block_tri_end(d, 0);
    for (int t = d.block_first_triangle(0); t < last; ++t)
      out.push_back(Factor{false, t, tris[t].ring, tris[t].side});
  } else {
    const auto& edges = d.edges();
    for (int e = 0; e < int(edges.size()); ++e) {
      if (edges[e].block != 0) continue;
      const DevTriangle& t = tris[edges[e].tri];
      out.push_back(Factor{true, e, t.ring, t.side});
    }
  }
  if (order == FactorOrder::ring_reversed) {
    size_t i = 0;
    while (i < out.size()) {
      size_t j = i;
      while (j < out.size() && out[j].ring == out[i].ring &&
             out[j].side == out[i].side)
        ++j;
      std::reverse(out.begin() + i, out.begin() + j);
      i = j;
    }
  }
  return out;
}

// Schedule positions of the factors that move one boundary chain, grouped by
// spiral period. Everything else fixes the chain up to the base gauge.
std::vector<std::vector<int>> slot_mover_periods(const Development& d,
                                                 const std::vector<Factor>& sched,
                                                 SurfaceFlowSpec::Kind kind,
                                                 int slot) {
  std::map<int, std::vector<int>> by_tri;
  for (int i = 0; i < int(sched.size()); ++i) {
    const int t = sched[i].edge ? d.edges()[sched[i].idx].tri : sched[i].idx;
    by_tri[t].push_back(i);
  }
  const Word sw = slot_word(slot);
  const int tp1 = d.find_triangle(0, false, sw);
  if (tp1 < 0) return {};
  const int t1 = d.triangles()[tp1].nbr[(slot + 2) % 3];
  if (t1 < 0) return {};
  const Word w1 = d.triangles()[t1].word;

  std::vector<std::vector<int>> periods;
  for (int p = 1;; ++p) {
    const int a = d.find_triangle(
        0, true, word_concat(word_pow(sw, p - 1), w1));
    const int b = d.find_triangle(0, false, word_pow(sw, p));
    if (a < 0 || b < 0) break;
    std::vector<int> pos = by_tri[a];
    pos.insert(pos.end(), by_tri[b].begin(), by_tri[b].end());
    std::sort(pos.begin(), pos.end());
    if (pos.empty()) break;
    periods.push_back(pos);
  }
  return periods;
}

using TrackedFlags = std::map<int, Flag>;

void tracked_shear(const Development& d, TrackedFlags& cur, int i, int j,
                   double s) {
  const Flag fi = cur.at(i);
  const Flag fj = cur.at(j);
  const detail::FrameFlow frame = detail::FrameFlow::from_cols(
      fi.point.rep(), meet(fi.line, fj.line).rep(), fj.point.rep());
  const detail::FrameFlow plus =
      frame.with_diag(std::exp(s / 2), 1, std::exp(-s / 2));
  const detail::FrameFlow minus =
      frame.with_diag(std::exp(-s / 2), 1, std::exp(s / 2));
  const auto& verts = d.vertices();
  for (auto& [v, f] : cur) {
    if (v == i || v == j) continue;
    const bool in_plus =
        cyclically_between(verts[j].pos, verts[v].pos, verts[i].pos);
    f = in_plus ? plus(f) : minus(f);
  }
}

void tracked_bulge(const Development& d, TrackedFlags& cur, int i, int j,
                   double s) {
  const Flag fi = cur.at(i);
  const Flag fj = cur.at(j);
  const detail::FrameFlow frame = detail::FrameFlow::from_cols(
      fi.point.rep(), meet(fi.line, fj.line).rep(), fj.point.rep());
  const detail::FrameFlow plus =
      frame.with_diag(std::exp(-s / 6), std::exp(s / 3), std::exp(-s / 6));
  const detail::FrameFlow minus =
      frame.with_diag(std::exp(s / 6), std::exp(-s / 3), std::exp(s / 6));
  const auto& verts = d.vertices();
  for (auto& [v, f] : cur) {
    if (v == i || v == j) continue;
    const bool in_plus =
        cyclically_between(verts[i].pos, verts[v].pos, verts[j].pos);
    f = in_plus ? plus(f) : minus(f);
  }
}

// Applies one schedule factor to the tracked flags, mirroring the polygon
// flows: the eruption factor is the three-sector construction followed by
// the edge corrections that keep every shape invariant but the triple ratio.
void apply_factor_tracked(const Development& d, const Factor& f, double t,
                          bool substitute, TrackedFlags& cur) {
  const auto& verts = d.vertices();
  if (f.edge) {
    const DevEdge& e = d.edges()[f.idx];
    if (substitute)
      tracked_shear(d, cur, e.y, e.x, t);
    else
      tracked_bulge(d, cur, e.y, e.x, t);
    return;
  }

  const DevTriangle& T = d.triangles()[f.idx];
  const double s = T.prime ? -t : t;
  std::array<int, 3> a = T.verts;
  if (!cyclically_between(verts[a[0]].pos, verts[a[1]].pos, verts[a[2]].pos))
    std::swap(a[1], a[2]);

  const double tau =
      std::log(triple_ratio(cur.at(a[0]), cur.at(a[1]), cur.at(a[2])));
  const double leak = detail::softplus(tau) - detail::softplus(tau + s);

  {
    const Vec3 q1 = meet(cur.at(a[1]).line, cur.at(a[2]).line).rep();
    const Vec3 q2 = meet(cur.at(a[2]).line, cur.at(a[0]).line).rep();
    const Vec3 q3 = meet(cur.at(a[0]).line, cur.at(a[1]).line).rep();
    const detail::FrameFlow frame = detail::FrameFlow::from_cols(q1, q2, q3);
    const double e = std::exp(s / 3), einv = std::exp(-s / 3);
    const detail::FrameFlow g1 = frame.with_diag(1, e, einv);
    const detail::FrameFlow g2 = frame.with_diag(einv, 1, e);
    const detail::FrameFlow g3 = frame.with_diag(e, einv, 1);
    for (auto& [v, fl] : cur) {
      if (v == a[0])
        fl = Flag(detail::snap_to_line(g2.point(fl.point.rep()), fl.line),
                  fl.line);
      else if (v == a[1])
        fl = Flag(detail::snap_to_line(g3.point(fl.point.rep()), fl.line),
                  fl.line);
      else if (v == a[2])
        fl = Flag(detail::snap_to_line(g1.point(fl.point.rep()), fl.line),
                  fl.line);
      else if (cyclically_between(verts[a[1]].pos, verts[v].pos,
                                  verts[a[2]].pos))
        fl = g1(fl);
      else if (cyclically_between(verts[a[2]].pos, verts[v].pos,
                                  verts[a[0]].pos))
        fl = g2(fl);
      else
        fl = g3(fl);
    }
  }
  for (int m = 0; m < 3; ++m) {
    tracked_shear(d, cur, a[m], a[(m + 1) % 3], -s / 2);
    tracked_bulge(d, cur, a[m], a[(m + 1) % 3], -s / 2 - leak);
  }
}

// Gauged data of one spiral period at a boundary slot: the period's commutator
// factor u, the boundary translation r it rides on, and the mid-period
// prefixes, all expressed in the original frame of the chain.
struct PeriodData {
  ProjMap u = ProjMap::identity();
  ProjMap r = ProjMap::identity();
  bool unipotent_ok = false;
  Mat3 T = Mat3::identity();
  Mat3 Tadj = Mat3::identity();
  std::array<double, 2> lr{};
  Mat3 ueig = Mat3::identity();
  std::vector<Mat3> heig;
};

PeriodData one_period(const Development& d, const std::vector<Factor>& sched,
                      const std::vector<std::vector<int>>& periods, double t,
                      int slot, bool substitute) {
  const auto& ch = d.chain(slot);
  if (ch.gw < 0 || periods.empty())
    throw OutOfDepth("development too shallow for a boundary period");

  const auto& verts = d.vertices();
  TrackedFlags cur;
  for (int v : {ch.x, ch.z, ch.w, ch.gz, ch.gw})
    cur.emplace(v, verts[v].flag);
  const Flag x0 = verts[ch.x].flag, z0 = verts[ch.z].flag;
  const Flag w0 = verts[ch.w].flag, gz0 = verts[ch.gz].flag;
  const Flag gw0 = verts[ch.gw].flag;

  PeriodData pd;
  std::vector<ProjMap> partials;
  const std::vector<int>& pos = periods.front();
  for (size_t k = 0; k < pos.size(); ++k) {
    apply_factor_tracked(d, sched[pos[k]], t, substitute, cur);
    // Gauge the chain head back onto itself and read off the tail motion.
    const ProjMap gauge =
        map_from_flag_data(cur.at(ch.x), cur.at(ch.z), cur.at(ch.w).point, x0,
                           z0, w0.point);
    const Flag gz_g = gauge(cur.at(ch.gz));
    const Flag gw_g = gauge(cur.at(ch.gw));
    const ProjMap deep =
        map_from_flag_data(x0, gz0, gw0.point, x0, gz_g, gw_g.point);
    if (k + 1 < pos.size()) {
      partials.push_back(deep);
    } else {
      pd.u = deep;
      pd.r = map_from_flag_data(x0, z0, w0.point, x0, gz_g, gw_g.point);
    }
  }

  const Mat3 mu = pd.u.mat();
  const double det = mu.det();
  if (det > 0) {
    const Mat3 R = mu / std::cbrt(det);
    const Mat3 D = R + Mat3::identity() * -1.0;
    pd.unipotent_ok = std::fabs(R.trace() - 3) < 1e-6 &&
                      (D * D * D).frobenius() < 1e-6;
  }

  std::optional<EigenFlags> eo;
  try {
    eo = eigen_flags(pd.r);
  } catch (const NotLoxodromic& e) {
    throw ConvergenceFailure(std::string("boundary translation: ") + e.what());
  } catch (const SpectralGapTooSmall& e) {
    throw ConvergenceFailure(std::string("boundary translation: ") + e.what());
  }
  const EigenFlags& E = *eo;
  pd.T = Mat3::from_cols(E.repelling_point.rep(), E.neutral_point.rep(),
                         E.attracting_point.rep());
  pd.Tadj = pd.T.adjugate();
  pd.lr = E.logratios;

  auto to_eig = [&pd](const Mat3& m) {
    Mat3 e = pd.Tadj * m * pd.T;
    const double corner = e.m[0][0];
    if (std::fabs(corner) <= tol().sing * e.frobenius())
      throw ConvergenceFailure("period factor degenerates at the boundary");
    e = e * (1.0 / corner);
    // The factor fixes the chain's head flag, so these vanish identically.
    e.m[1][0] = e.m[2][0] = e.m[2][1] = 0;
    return e;
  };
  pd.ueig = to_eig(pd.u.mat());
  for (const ProjMap& h : partials) pd.heig.push_back(to_eig(h.mat()));
  return pd;
}

// Motion of the tail beyond the slot's fan after c completed periods and m
// further factors, as a partial product in the eigenbasis of the boundary
// translation, where each conjugate is an explicit entry scaling.
Mat3 deep_motion(const PeriodData& pd, int c, int m) {
  auto conj = [&pd](const Mat3& e, int k) {
    Mat3 out = e;
    out.m[0][1] *= std::exp(-k * pd.lr[1]);
    out.m[1][2] *= std::exp(-k * pd.lr[0]);
    out.m[0][2] *= std::exp(-k * (pd.lr[0] + pd.lr[1]));
    return out;
  };
  Mat3 P = Mat3::identity();
  for (int k = 0; k < c; ++k) P = conj(pd.ueig, k) * P;
  if (m > 0) P = conj(pd.heig.at(m - 1), c) * P;
  return pd.T * P * pd.Tadj;
}

void require_two_sided(const Development& d) {
  const SurfaceComplex& s = d.surface();
  for (int slot = 0; slot < 3; ++slot)
    if (s.across({d.base_pants(), slot}).pants == d.base_pants())
      throw DegenerateInput(
          "truncated flows need boundary curves joining distinct pants");
}

void require_supported_kind(SurfaceFlowSpec::Kind kind) {
  if (kind != SurfaceFlowSpec::Kind::eruption &&
      kind != SurfaceFlowSpec::Kind::internal_bulge)
    throw DegenerateInput(
        "truncated flows exist for eruption and internal bulging");
}

Development flow_stage(const Development& d, const SurfaceFlowSpec& flow,
                       double t, int j, FactorOrder order, bool substitute) {
  require_supported_kind(flow.kind);
  if (flow.index < 0 || flow.index >= d.surface().num_pants())
    throw InvalidAnchors("pants index out of range");
  if (flow.index != d.base_pants())
    throw DegenerateInput("the flow must target the development's base pants");
  require_two_sided(d);
  const std::vector<Factor> sched = flow_schedule(d, flow.kind, order);
  if (j < 0) throw DegenerateInput("factor count must be nonnegative");
  if (j > int(sched.size()))
    throw OutOfDepth("factor count exceeds the developed schedule");

  Development out = d;
  if (j == 0 || t == 0) return out;

  std::map<int, double> tau_d;
  std::map<int, SigmaPair> sig_d;
  for (int i = 0; i < j; ++i) {
    const Factor& f = sched[i];
    if (f.edge) {
      SigmaPair& sp = sig_d[f.idx];
      sp.x -= t;
      sp.y += substitute ? -t : t;
    } else {
      tau_d[f.idx] += d.triangles()[f.idx].prime ? -t : t;
    }
  }
  CoordLedger led;
  led.tau = &tau_d;
  led.sigma = &sig_d;
  flag_pass(out, 0, led);

  const auto& verts0 = d.vertices();
  auto& verts = DevAccess::verts(out);
  for (int slot = 0; slot < 3; ++slot) {
    const auto& ch = d.chain(slot);
    if (ch.w < 0)
      throw OutOfDepth("development too shallow for a boundary chain");
    const auto periods = slot_mover_periods(d, sched, flow.kind, slot);
    int c = 0, m = 0;
    for (const auto& per : periods) {
      int done = 0;
      for (int p : per)
        if (p < j) ++done;
      if (done == int(per.size())) {
        ++c;
      } else {
        m = done;
        break;
      }
    }
    ProjMap M = ProjMap::identity();
    if (c > 0 || m > 0) {
      const PeriodData pd = one_period(d, sched, periods, t, slot, substitute);
      M = ProjMap(deep_motion(pd, c, m));
    }
    const ProjMap q_inv = map_from_flag_data(
        verts0[ch.x].flag, verts0[ch.z].flag, verts0[ch.w].flag.point,
        verts[ch.x].flag, verts[ch.z].flag, verts[ch.w].flag.point);
    const ProjMap move = q_inv * M;
    for (int v = 0; v < int(verts.size()); ++v)
      if (verts0[v].block == 1 + slot) verts[v].flag = move(verts0[v].flag);
  }

  const auto& seed = d.triangles()[d.block_first_triangle(0)].verts;
  const ProjMap renorm = map_from_flag_data(
      verts[seed[0]].flag, verts[seed[1]].flag, verts[seed[2]].flag.point,
      verts0[seed[0]].flag, verts0[seed[1]].flag, verts0[seed[2]].flag.point);
  for (auto& v : verts) v.flag = renorm(v.flag);
  return out;
}

}  // namespace

Development truncated_equivariant_flow(const Development& d,
                                       const SurfaceFlowSpec& flow, double t,
                                       int j, FactorOrder order) {
  return flow_stage(d, flow, t, j, order, false);
}

namespace {

SigmaPair sigma_estimate_from(const Development& d, int slot, const Flag& fzp,
                              const Flag& yhat) {
  const auto& ch = d.chain(slot);
  const Flag& fx = d.vertices()[ch.x].flag;
  const Flag& fz = d.vertices()[ch.z].flag;
  const double cx = cross_ratio(fx.line, CrossArg(fz.point),
                                CrossArg(fzp.point), join(fx.point, yhat.point));
  const double cy = cross_ratio(yhat.line, CrossArg(fzp.point),
                                CrossArg(fz.point), join(yhat.point, fx.point));
  if (cx >= 0 || cy >= 0)
    throw DegenerateInput("closed edge cross ratio is not negative");
  SigmaPair out{std::log(-cx), std::log(-cy)};
  if (!d.surface().orients({d.base_pants(), slot})) std::swap(out.x, out.y);
  return out;
}

}  // namespace

SigmaPair closed_edge_sigma_estimate(const Development& d, int slot) {
  const auto& ch = d.chain(slot);
  if (ch.zp < 0) throw OutOfDepth("closed edge chain not developed");
  const EigenFlags E = eigen_flags(d.truncated_boundary_holonomy(slot));
  return sigma_estimate_from(d, slot, d.vertices()[ch.zp].flag,
                             E.attracting_flag());
}

ConvergenceReport converge_report(const SurfaceComplex& s, const BDCoords& c,
                                  const SurfaceFlowSpec& flow, double t,
                                  int slot, int K, int L, bool substitute_shear,
                                  FactorOrder order) {
  require_supported_kind(flow.kind);
  if (substitute_shear && flow.kind != SurfaceFlowSpec::Kind::internal_bulge)
    throw DegenerateInput("the shear substitution applies to internal bulging");
  if (slot < 0 || slot > 2)
    throw InvalidAnchors("boundary slot must be 0, 1 or 2");

  const Development d0 = develop(s, c, flow.index, K, L);
  require_two_sided(d0);
  const std::vector<Factor> sched = flow_schedule(d0, flow.kind, order);
  const auto periods = slot_mover_periods(d0, sched, flow.kind, slot);
  const PeriodData pd = one_period(d0, sched, periods, t, slot, substitute_shear);

  ConvergenceReport rep;
  rep.stages.push_back(closed_edge_sigma_estimate(d0, slot));
  for (const auto& per : periods) {
    const Development st =
        flow_stage(d0, flow, t, per.back() + 1, order, substitute_shear);
    rep.stages.push_back(closed_edge_sigma_estimate(st, slot));
  }
  rep.limit = rep.stages.back();

  const int n = int(rep.stages.size());
  if (n >= 3) {
    const SigmaPair& p1 = rep.stages[n - 2];
    const SigmaPair& p2 = rep.stages[n - 1];
    rep.cauchy = std::max(std::fabs(p2.x - p1.x), std::fabs(p2.y - p1.y)) <
                 tol().conv;
  }
  rep.unipotent_ok = pd.unipotent_ok;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.prediction = SigmaPair{nan, nan};
  rep.agrees = false;
  try {
    const ProjMap U = unipotent_limit(pd.r, pd.u);
    const auto& ch = d0.chain(slot);
    const Flag zp_inf = U(d0.vertices()[ch.zp].flag);
    const EigenFlags E0 = eigen_flags(d0.truncated_boundary_holonomy(slot));
    const Flag yhat_inf = U(E0.attracting_flag());
    rep.prediction = sigma_estimate_from(d0, slot, zp_inf, yhat_inf);
    rep.agrees = rep.cauchy && rep.unipotent_ok &&
                 std::fabs(rep.limit.x - rep.prediction.x) < tol().conv &&
                 std::fabs(rep.limit.y - rep.prediction.y) < tol().conv;
  } catch (const Error&) {
    rep.agrees = false;
  }
  return rep;
}

namespace {
// Internal depth for the boundary corrections of the coordinate-level flows.
constexpr int kFlowDepth = 8;
constexpr int kFlowWordCap = 8;
}  // namespace

BDCoords flow_coords(const SurfaceComplex& s, const BDCoords& c,
                     const SurfaceFlowSpec& flow, double t) {
  if (!validate_bd(s, c).accepted)
    throw DegenerateInput("coordinates do not satisfy the closed leaf relations");
  BDCoords out = c;
  switch (flow.kind) {
    case SurfaceFlowSpec::Kind::shear:
      if (flow.index < 0 || flow.index >= int(s.curves().size()))
        throw InvalidAnchors("curve index out of range");
      out.p_sigma[flow.index].x -= t;
      out.p_sigma[flow.index].y -= t;
      return out;
    case SurfaceFlowSpec::Kind::bulge:
      if (flow.index < 0 || flow.index >= int(s.curves().size()))
        throw InvalidAnchors("curve index out of range");
      out.p_sigma[flow.index].x += t;
      out.p_sigma[flow.index].y -= t;
      return out;
    default:
      break;
  }

  if (flow.index < 0 || flow.index >= s.num_pants())
    throw InvalidAnchors("pants index out of range");
  if (flow.kind == SurfaceFlowSpec::Kind::eruption) {
    out.tau[flow.index][0] += t;
    out.tau[flow.index][1] -= t;
  } else {
    for (int k = 0; k < 3; ++k) {
      out.q_sigma[flow.index][k].x -= t;
      out.q_sigma[flow.index][k].y += t;
    }
  }
  if (t == 0) return out;

  // The interior shifts above are exact; the boundary invariants move to the
  // limits of their truncated estimates, sampled at the deepest two periods.
  const Development d0 = develop(s, c, flow.index, kFlowDepth, kFlowWordCap);
  const std::vector<Factor> sched =
      flow_schedule(d0, flow.kind, FactorOrder::standard);
  for (int slot = 0; slot < 3; ++slot) {
    const auto periods = slot_mover_periods(d0, sched, flow.kind, slot);
    if (int(periods.size()) < 2)
      throw ConvergenceFailure("development too shallow for a boundary limit");
    SigmaPair est[2];
    for (int k = 0; k < 2; ++k) {
      const int j = periods[periods.size() - 2 + k].back() + 1;
      const Development st =
          flow_stage(d0, flow, t, j, FactorOrder::standard, false);
      est[k] = closed_edge_sigma_estimate(st, slot);
    }
    if (std::max(std::fabs(est[1].x - est[0].x),
                 std::fabs(est[1].y - est[0].y)) >= tol().conv)
      throw ConvergenceFailure("boundary sigma estimates did not settle");
    out.p_sigma[s.curve_at({flow.index, slot})] = est[1];
  }
  if (!validate_bd(s, out).accepted)
    throw ConvergenceFailure("flowed coordinates violate the closed leaf relations");
  return out;
}

namespace {

// Positions-only universe around one pants: the base block and its three
// neighbours, with the three closed edges joining them across the gaps.
struct Universe {
  Development dev;
  std::array<std::array<int, 2>, 3> closed{};
};

Universe build_universe(const SurfaceComplex& s, int base, int K) {
  Universe u;
  Development& dev = u.dev;
  DevAccess::surface(dev) = s;
  DevAccess::coords(dev) = zero_bd(s);
  DevAccess::base(dev) = base;
  DevAccess::depth(dev) = K;
  DevAccess::word_cap(dev) = 0;
  build_block(dev, 0, base, K);
  auto& verts = DevAccess::verts(dev);
  auto& tris = DevAccess::tris(dev);
  const int base_first = dev.block_first_triangle(0);
  for (int slot = 0; slot < 3; ++slot) {
    const PantsSide far = s.across({base, slot});
    const int block = 1 + slot;
    const int first_vert = int(verts.size());
    build_block(dev, block, far.pants, K);
    const int x_far =
        tris[dev.block_first_triangle(block)].verts[far.boundary];
    const int x = tris[base_first].verts[slot];
    const int z = tris[base_first].verts[(slot + 1) % 3];
    embed_block_positions(dev, block, verts[z].pos, verts[x].pos, first_vert,
                          verts[x_far].pos);
    u.closed[slot] = {x, x_far};
  }
  return u;
}

int resolve_vertex(const Development& dev, const VertexDescriptor& v, int cap) {
  if (v.slot < 0 || v.slot > 2)
    throw InvalidAnchors("descriptor slot out of range");
  const SurfaceComplex& s = dev.surface();
  int block, pants;
  if (v.via < 0) {
    block = 0;
    pants = dev.base_pants();
  } else {
    if (v.via > 2) throw InvalidAnchors("descriptor via slot out of range");
    block = 1 + v.via;
    pants = s.across({dev.base_pants(), v.via}).pants;
  }
  if (v.pants != pants)
    throw DegenerateInput("descriptor pants does not match its block");
  const Word w = reduce_word(v.word);
  if (int(w.size()) > cap)
    throw OutOfDepth("descriptor word exceeds the depth cap");
  const int t = dev.find_triangle(block, false, w);
  if (t < 0) throw OutOfDepth("descriptor word not developed");
  return dev.triangles()[t].verts[v.slot];
}

// Canonical descriptor per vertex: its first unprimed triangle in enumeration
// order, or the word of the unprimed child that would contain it one ring
// deeper when only primed triangles reach it at the truncation boundary.
std::vector<VertexDescriptor> vertex_names(const Development& dev) {
  const auto& verts = dev.vertices();
  const auto& tris = dev.triangles();
  std::vector<VertexDescriptor> names(verts.size());
  std::vector<char> have(verts.size(), 0);
  for (int t = 0; t < int(tris.size()); ++t) {
    if (tris[t].prime) continue;
    for (int k = 0; k < 3; ++k) {
      const int v = tris[t].verts[k];
      if (have[v]) continue;
      have[v] = 1;
      names[v] = VertexDescriptor{dev.block_pants(tris[t].block), k,
                                  tris[t].word,
                                  tris[t].block == 0 ? -1 : tris[t].block - 1};
    }
  }
  for (int t = 0; t < int(tris.size()); ++t) {
    if (!tris[t].prime) continue;
    for (int k = 0; k < 3; ++k) {
      const int v = tris[t].verts[k];
      if (have[v]) continue;
      have[v] = 1;
      Word w = tris[t].word;
      if (k == 0)
        w = word_concat(w, {-1});
      else if (k == 1)
        w = word_concat(w, {3});
      names[v] = VertexDescriptor{dev.block_pants(tris[t].block), k, w,
                                  tris[t].block == 0 ? -1 : tris[t].block - 1};
    }
  }
  return names;
}

}  // namespace

TransverseEdgeSet transverse_edge_set(const SurfaceComplex& s,
                                      const VertexDescriptor& x0,
                                      const VertexDescriptor& y0, int L) {
  if (L < 0) throw DegenerateInput("depth must be nonnegative");
  if (x0.pants < 0 || x0.pants >= s.num_pants())
    throw InvalidAnchors("pants index out of range");
  if (x0.via >= 0)
    throw DegenerateInput("x0 must name a base block vertex");
  if (y0.via < 0 && y0.pants != x0.pants)
    throw DegenerateInput("descriptor pants does not match its block");

  const Universe uni = build_universe(s, x0.pants, std::min(2 * L + 2, 12));
  const Development& dev = uni.dev;
  const int vx = resolve_vertex(dev, x0, L);
  const int vy = resolve_vertex(dev, y0, L);
  if (vx == vy) throw DegenerateInput("x0 and y0 must name distinct vertices");

  const auto& verts = dev.vertices();
  const auto names = vertex_names(dev);

  // The endpoints of a represented closed edge separate nothing else in the
  // truncation; the edge is its own degenerate fan.
  for (int slot = 0; slot < 3; ++slot) {
    const auto& cl = uni.closed[slot];
    if ((cl[0] == vx && cl[1] == vy) || (cl[0] == vy && cl[1] == vx)) {
      TransverseEdgeSet out;
      out.fans = 1;
      TransverseEdgeSet::Entry e{names[vx],
                                 names[vy],
                                 verts[vx].pos.to_double(),
                                 verts[vy].pos.to_double(),
                                 true,
                                 1,
                                 'a'};
      out.edges = {e, e, e};
      out.edges[1].part = 'b';
      out.edges[2].part = 'c';
      return out;
    }
  }

  const Dyadic px = verts[vx].pos;
  const Dyadic py = verts[vy].pos;
  struct Cross {
    int a, b;
    bool closed;
    int fan;
    Dyadic ob, oa;
  };
  std::vector<Cross> hits;
  auto consider = [&](int u, int v, bool closed) {
    if (u == vx || u == vy || v == vx || v == vy) return;
    const bool ua = cyclically_between(px, verts[u].pos, py);
    const bool va = cyclically_between(px, verts[v].pos, py);
    if (ua == va) return;
    const int a = ua ? u : v;
    const int b = ua ? v : u;
    hits.push_back(Cross{a, b, closed, 0, dy_sub(px, verts[b].pos),
                         dy_sub(verts[a].pos, px)});
  };
  for (const DevEdge& e : dev.edges()) consider(e.x, e.y, false);
  for (int slot = 0; slot < 3; ++slot)
    consider(uni.closed[slot][0], uni.closed[slot][1], true);

  // Weak precedence: both endpoints advance away from x0. Lexicographic in
  // (far endpoint, near endpoint) linearizes it on a non-crossing family.
  std::stable_sort(hits.begin(), hits.end(), [](const Cross& a, const Cross& b) {
    if (!(a.ob == b.ob)) return a.ob < b.ob;
    return a.oa < b.oa;
  });

  std::vector<int> closed_at;
  for (int i = 0; i < int(hits.size()); ++i)
    if (hits[i].closed) closed_at.push_back(i);
  for (auto& h : hits) {
    for (int f = 0; f < int(closed_at.size()); ++f) {
      const Cross& l = hits[closed_at[f]];
      if (h.a == l.a || h.a == l.b || h.b == l.a || h.b == l.b) {
        h.fan = f + 1;
        break;
      }
    }
  }

  TransverseEdgeSet out;
  out.fans = int(closed_at.size());
  auto mk_entry = [&](const Cross& h, int fan, char part) {
    return TransverseEdgeSet::Entry{names[h.a],          names[h.b],
                                    verts[h.a].pos.to_double(),
                                    verts[h.b].pos.to_double(),
                                    h.closed,
                                    fan,
                                    part};
  };
  std::vector<const Cross*> kept;
  std::vector<char> fan_done(out.fans + 1, 0);
  for (const Cross& h : hits) {
    if (h.fan == 0) {
      out.edges.push_back(mk_entry(h, 0, 's'));
      kept.push_back(&h);
      continue;
    }
    if (fan_done[h.fan]) continue;
    fan_done[h.fan] = 1;
    const Cross* lo = nullptr;
    const Cross* hi = nullptr;
    const Cross* mid = nullptr;
    for (const Cross& g : hits) {
      if (g.fan != h.fan) continue;
      if (!lo) lo = &g;
      hi = &g;
      if (g.closed) mid = &g;
    }
    out.edges.push_back(mk_entry(*lo, h.fan, 'a'));
    out.edges.push_back(mk_entry(*mid, h.fan, 'b'));
    out.edges.push_back(mk_entry(*hi, h.fan, 'c'));
    kept.push_back(lo);
    kept.push_back(mid);
    kept.push_back(hi);
  }

  for (size_t i = 0; i + 1 < kept.size(); ++i) {
    const Cross* e1 = kept[i];
    const Cross* e2 = kept[i + 1];
    if (e1->a == e2->a && e1->b == e2->b) continue;
    int shared = -1;
    if (e1->a == e2->a || e1->a == e2->b)
      shared = e1->a;
    else if (e1->b == e2->a || e1->b == e2->b)
      shared = e1->b;
    if (shared < 0) continue;
    const int o1 = e1->a == shared ? e1->b : e1->a;
    const int o2 = e2->a == shared ? e2->b : e2->a;
    out.triangles.push_back({names[shared], names[o1], names[o2]});
  }
  return out;
}

}  // namespace projflow
