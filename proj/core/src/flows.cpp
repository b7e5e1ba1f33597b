#include "projflow/flows.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "flowkit.hpp"
#include "ldops.hpp"
#include "projflow/invariants.hpp"
#include "projflow/scalars.hpp"

namespace projflow {

namespace {

using detail::FrameFlow;
using detail::snap_to_line;
using detail::softplus;

bool cyclically_between(int a, int x, int b, int n) {
  return ((x - a) % n + n) % n < ((b - a) % n + n) % n;
}

void check_anchor_range(const FlagTuple& t, int idx) {
  if (idx < 0 || idx >= t.size()) throw InvalidAnchors("anchor index out of range");
}

// Shear and bulge share the anchor eigenbasis (p_i, meet(l_i, l_j), p_j).
FrameFlow edge_frame(const FlagTuple& t, int i, int j) {
  if (i == j) throw InvalidAnchors("edge anchors must be distinct");
  check_anchor_range(t, i);
  check_anchor_range(t, j);
  Vec3 mid = meet(t[i].line, t[j].line).rep();
  return FrameFlow::from_cols(t[i].point.rep(), mid, t[j].point.rep());
}

}  // namespace

FlagTuple eruption(const FlagTuple& t, const std::array<int, 3>& a, double s) {
  int n = t.size();
  for (int idx : a) check_anchor_range(t, idx);
  if (a[0] == a[1] || a[1] == a[2] || a[0] == a[2])
    throw InvalidAnchors("eruption anchors must be distinct");
  if (!cyclically_between(a[0], a[1], a[2], n))
    throw InvalidAnchors("eruption anchors must ascend in the cyclic order");

  Vec3 q1 = meet(t[a[1]].line, t[a[2]].line).rep();
  Vec3 q2 = meet(t[a[2]].line, t[a[0]].line).rep();
  Vec3 q3 = meet(t[a[0]].line, t[a[1]].line).rep();
  FrameFlow frame = FrameFlow::from_cols(q1, q2, q3);
  double e = std::exp(s / 3), einv = std::exp(-s / 3);
  FrameFlow g1 = frame.with_diag(1, e, einv);
  FrameFlow g2 = frame.with_diag(einv, 1, e);
  FrameFlow g3 = frame.with_diag(e, einv, 1);

  std::vector<Flag> out;
  out.reserve(n);
  for (int x = 0; x < n; ++x) {
    const Flag& f = t[x];
    if (x == a[0])
      out.push_back(Flag(snap_to_line(g2.point(f.point.rep()), f.line), f.line));
    else if (x == a[1])
      out.push_back(Flag(snap_to_line(g3.point(f.point.rep()), f.line), f.line));
    else if (x == a[2])
      out.push_back(Flag(snap_to_line(g1.point(f.point.rep()), f.line), f.line));
    else if (cyclically_between(a[1], x, a[2], n))
      out.push_back(g1(f));
    else if (cyclically_between(a[2], x, a[0], n))
      out.push_back(g2(f));
    else
      out.push_back(g3(f));
  }
  FlagTuple erupted = validate_tuple(out);

  // The sector maps alone leak into the sigma invariants of the anchor
  // triangle's own edges: with T the anchor triple ratio, sigma_{u,v} gains
  // log((1+T)/(1+e^s T)) and sigma_{v,u} the complement summing to -s, while
  // every other coordinate is already exact.  A shear/bulge pair per anchor
  // edge cancels the leak, so the composite flow moves tau alone.
  double tau = std::log(triple_ratio(t[a[0]], t[a[1]], t[a[2]]));
  double leak = softplus(tau) - softplus(tau + s);
  for (int m = 0; m < 3; ++m) {
    int u = a[m], v = a[(m + 1) % 3];
    if ((v - u + n) % n == 1 || (u - v + n) % n == 1) continue;  // polygon side
    erupted = shear(erupted, {u, v}, -s / 2);
    erupted = bulge(erupted, {u, v}, -s / 2 - leak);
  }
  return erupted;
}

FlagTuple shear(const FlagTuple& t, const std::array<int, 2>& a, double s) {
  int n = t.size();
  int i = a[0], j = a[1];
  FrameFlow fr = edge_frame(t, i, j);
  FrameFlow plus = fr.with_diag(std::exp(s / 2), 1, std::exp(-s / 2));
  FrameFlow minus = fr.with_diag(std::exp(-s / 2), 1, std::exp(s / 2));

  std::vector<Flag> out;
  out.reserve(n);
  for (int x = 0; x < n; ++x) {
    if (x == i || x == j)
      out.push_back(t[x]);
    else if (cyclically_between(j, x, i, n))
      out.push_back(plus(t[x]));
    else
      out.push_back(minus(t[x]));
  }
  return validate_tuple(out);
}

FlagTuple bulge(const FlagTuple& t, const std::array<int, 2>& a, double s) {
  int n = t.size();
  int i = a[0], j = a[1];
  FrameFlow fr = edge_frame(t, i, j);
  FrameFlow plus = fr.with_diag(std::exp(-s / 6), std::exp(s / 3), std::exp(-s / 6));
  FrameFlow minus = fr.with_diag(std::exp(s / 6), std::exp(-s / 3), std::exp(s / 6));

  std::vector<Flag> out;
  out.reserve(n);
  for (int x = 0; x < n; ++x) {
    if (x == i || x == j)
      out.push_back(t[x]);
    else if (cyclically_between(i, x, j, n))
      out.push_back(plus(t[x]));
    else
      out.push_back(minus(t[x]));
  }
  return validate_tuple(out);
}

FlowSpec FlowSpec::parse(const std::string& text) {
  size_t colon = text.find(':');
  size_t at = text.find('@');
  if (colon == std::string::npos || at == std::string::npos || at < colon)
    throw DegenerateInput("flow spec must look like kind:anchors@time");

  FlowSpec spec;
  std::string kind = text.substr(0, colon);
  if (kind == "eruption")
    spec.kind = Kind::eruption;
  else if (kind == "shear")
    spec.kind = Kind::shear;
  else if (kind == "bulge")
    spec.kind = Kind::bulge;
  else
    throw DegenerateInput("unknown flow kind '" + kind + "'");

  std::string anchors = text.substr(colon + 1, at - colon - 1);
  int vals[3];
  char extra;
  int parsed = std::sscanf(anchors.c_str(), "%d,%d,%d%c", &vals[0], &vals[1], &vals[2], &extra);
  int expected = spec.kind == Kind::eruption ? 3 : 2;
  if (expected == 2) parsed = std::sscanf(anchors.c_str(), "%d,%d%c", &vals[0], &vals[1], &extra);
  if (parsed != expected) throw InvalidAnchors("flow spec anchor list malformed");
  for (int k = 0; k < expected; ++k) {
    if (vals[k] < 1) throw InvalidAnchors("flow spec anchors are 1-based");
    spec.anchors[k] = vals[k] - 1;
  }
  if (expected == 2) spec.anchors[2] = -1;

  size_t used = 0;
  std::string time_text = text.substr(at + 1);
  try {
    spec.time = std::stod(time_text, &used);
  } catch (const std::exception&) {
    throw DegenerateInput("flow spec time malformed");
  }
  if (used != time_text.size()) throw DegenerateInput("flow spec time malformed");
  return spec;
}

std::string FlowSpec::format() const {
  char buf[96];
  if (kind == Kind::eruption)
    std::snprintf(buf, sizeof buf, "eruption:%d,%d,%d@%.17g", anchors[0] + 1, anchors[1] + 1,
                  anchors[2] + 1, time);
  else
    std::snprintf(buf, sizeof buf, "%s:%d,%d@%.17g", kind == Kind::shear ? "shear" : "bulge",
                  anchors[0] + 1, anchors[1] + 1, time);
  return buf;
}

FlagTuple apply(const FlagTuple& t, const FlowSpec& spec) {
  switch (spec.kind) {
    case FlowSpec::Kind::eruption:
      return eruption(t, spec.anchors, spec.time);
    case FlowSpec::Kind::shear:
      return shear(t, {spec.anchors[0], spec.anchors[1]}, spec.time);
    default:
      return bulge(t, {spec.anchors[0], spec.anchors[1]}, spec.time);
  }
}

FlagTuple apply(const FlagTuple& t, const std::vector<FlowSpec>& schedule) {
  FlagTuple out = t;
  for (const FlowSpec& spec : schedule) out = apply(out, spec);
  return out;
}

std::vector<FlowSpec> solve_transition(const FGCoords& c1, const FGCoords& c2,
                                       const Triangulation& tri) {
  auto sigma_at = [](const FGCoords& c, int i, int j) {
    auto it = c.sigma.find({i, j});
    if (it == c.sigma.end())
      throw IncompatibleTriangulation("coordinates missing a sigma entry for the triangulation");
    return it->second;
  };
  auto tau_at = [](const FGCoords& c, const std::array<int, 3>& t) {
    auto it = c.tau.find(t);
    if (it == c.tau.end())
      throw IncompatibleTriangulation("coordinates missing a tau entry for the triangulation");
    return it->second;
  };

  std::vector<FlowSpec> schedule;
  for (const auto& t : tri.triangles()) {
    FlowSpec spec;
    spec.kind = FlowSpec::Kind::eruption;
    spec.anchors = t;
    spec.time = tau_at(c2, t) - tau_at(c1, t);
    schedule.push_back(spec);
  }
  for (auto [i, j] : tri.internal_edges()) {
    double d1 = sigma_at(c2, i, j) - sigma_at(c1, i, j);
    double d2 = sigma_at(c2, j, i) - sigma_at(c1, j, i);
    FlowSpec sh;
    sh.kind = FlowSpec::Kind::shear;
    sh.anchors = {i, j, -1};
    sh.time = -(d1 + d2) / 2;
    schedule.push_back(sh);
    FlowSpec bu;
    bu.kind = FlowSpec::Kind::bulge;
    bu.anchors = {i, j, -1};
    bu.time = (d1 - d2) / 2;
    schedule.push_back(bu);
  }
  return schedule;
}

}  // namespace projflow
