#include "lrp/coupling.hpp"

#include <cmath>
#include <stdexcept>

namespace lrp {

void validate_ladder(const Graph& g, const std::vector<Rung>& ladder, double graph_radius) {
  if (ladder.empty()) throw std::invalid_argument("ladder: empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i].beta >= 0.0) || !(ladder[i].r > 0.0)) throw std::invalid_argument("ladder: invalid rung");
    if (i > 0 && (ladder[i].beta < ladder[i - 1].beta || ladder[i].r < ladder[i - 1].r))
      throw std::invalid_argument("ladder: rungs must be nondecreasing in beta and r (rung " + std::to_string(i) + ")");
  }
  if (ladder.back().r > graph_radius) throw std::invalid_argument("ladder: top cut-off exceeds the graph cut-off");
  if (!g.has_geometry() && std::isfinite(ladder.front().r))
    throw std::invalid_argument("ladder: finite cut-offs need a graph with geometry");
}

SweepResult coupled_sweep(const Graph& g, double graph_radius, const std::vector<Rung>& ladder,
                          std::uint32_t origin, const ClusterRequest& request, const ConfigKey& key) {
  validate_ladder(g, ladder, graph_radius);
  validate_request(g, request);
  const Rung top = ladder.back();
  LazyConfiguration omega(g, top.beta, key);
  VertexMarks top_marks;
  top_marks.resize(g.vertex_count());
  std::vector<std::uint32_t> top_members;
  omega.component(origin, [](std::uint32_t) { return false; }, top_members, nullptr, top_marks);

  SweepResult out;
  const std::size_t k = ladder.size();
  // Edge check: an edge open at rung i is open at every later rung.
  for (std::uint32_t u : top_members) {
    for (const OpenEdge& e : omega.open_edges(u)) {
      if (e.owner != u) continue;
      bool prev = false;
      for (std::size_t i = 0; i < k; ++i) {
        const double w = g.has_geometry() ? omega.weight_at(e, ladder[i].r) : omega.weight(e);
        const bool open = e.level <= ladder[i].beta * w;
        if (prev && !open) ++out.edge_violations;
        prev = open;
      }
      ++out.edges_checked;
    }
  }

  std::vector<VertexMarks> marks(k);
  std::vector<std::uint32_t> members, chem;
  for (std::size_t i = 0; i < k; ++i) {
    marks[i].resize(g.vertex_count());
    marks[i].clear();
    members.clear();
    chem.clear();
    marks[i].set(origin);
    members.push_back(origin);
    chem.push_back(0);
    const Rung rung = ladder[i];
    for (std::size_t head = 0; head < members.size(); ++head) {
      const std::uint32_t u = members[head];
      for (const OpenEdge& e : omega.open_edges(u)) {
        if (marks[i].test(e.to)) continue;
        const double w = g.has_geometry() ? omega.weight_at(e, rung.r) : omega.weight(e);
        if (!(e.level <= rung.beta * w)) continue;
        marks[i].set(e.to);
        members.push_back(e.to);
        chem.push_back(chem[head] + 1);
      }
    }
    for (std::uint32_t v : members)
      if (!top_marks.test(v)) ++out.vertex_violations;
    if (i > 0) {
      // Previous rung's members must all be present here.
      for (std::uint32_t v : out.rungs[i - 1].members)
        if (!marks[i].test(v)) ++out.vertex_violations;
    }
    ClusterRequest req = request;
    req.keep_members = true;
    ClusterStats s = summarize_cluster(g, origin, members, chem, req, marks[i]);
    out.rungs.push_back(std::move(s));
  }
  if (!request.keep_members) {
    for (auto& s : out.rungs) {
      s.members.clear();
      s.chem.clear();
    }
  }
  if (request.mode != ExploreMode::WithChemical)
    for (auto& s : out.rungs) s.chem.clear();
  return out;
}

TripleClusters coupled_clusters(const Graph& g, double beta, std::uint32_t o, std::uint32_t x, std::uint32_t y,
                                const std::vector<std::uint32_t>& probes, const ConfigKey& key,
                                bool keep_members) {
  const std::uint32_t n = g.vertex_count();
  if (o >= n || x >= n || y >= n) throw std::invalid_argument("coupled clusters: point outside the graph");
  if (o == x || o == y || x == y) throw std::invalid_argument("coupled clusters: points 0, x, y must be distinct");
  for (std::uint32_t a : probes)
    if (a >= n) throw std::invalid_argument("coupled clusters: probe outside the graph");

  auto sub = [&](std::uint64_t c) {
    ConfigKey k = key;
    k.tag = StreamTag::Overlay;
    k.config = key.config * 4 + c;
    return k;
  };
  LazyConfiguration w0(g, beta, sub(0)), wx(g, beta, sub(1)), wy(g, beta, sub(2));
  enum { K0, KX, KY, KXX, KYY, KY0Y, KYXY, NSETS };
  std::vector<VertexMarks> m(NSETS);
  for (auto& mk : m) mk.resize(n);
  std::vector<std::vector<std::uint32_t>> lists(NSETS);
  auto none = [](std::uint32_t) { return false; };

  TripleClusters t;
  w0.component(o, none, lists[K0], nullptr, m[K0]);
  t.x_in_k0 = m[K0].test(x);
  t.y_in_k0 = m[K0].test(y);

  wx.component(x, none, lists[KXX], nullptr, m[KXX]);
  if (t.x_in_k0) {
    lists[KX] = lists[K0];
    m[KX].clear();
    for (std::uint32_t v : lists[KX]) m[KX].set(v);
  } else {
    wx.component(x, [&](std::uint32_t v) { return m[K0].test(v); }, lists[KX], nullptr, m[KX]);
  }
  t.y_in_kx = m[KX].test(y);
  t.y_in_kx_x = m[KXX].test(y);

  wy.component(y, none, lists[KYY], nullptr, m[KYY]);
  auto copy_set = [&](int from, int to) {
    lists[to] = lists[from];
    m[to].clear();
    for (std::uint32_t v : lists[to]) m[to].set(v);
  };
  if (t.y_in_k0) copy_set(K0, KY);
  else if (t.y_in_kx) copy_set(KX, KY);
  else wy.component(y, [&](std::uint32_t v) { return m[K0].test(v) || m[KX].test(v); }, lists[KY], nullptr, m[KY]);

  if (t.y_in_k0) copy_set(K0, KY0Y);
  else wy.component(y, [&](std::uint32_t v) { return m[K0].test(v); }, lists[KY0Y], nullptr, m[KY0Y]);

  if (t.y_in_kx_x) copy_set(KXX, KYXY);
  else wy.component(y, [&](std::uint32_t v) { return m[KXX].test(v); }, lists[KYXY], nullptr, m[KYXY]);

  for (std::uint32_t a : probes) {
    const bool in_yy = m[KYY].test(a);
    t.in_ky_y.push_back(in_yy);
    t.c_0xy.push_back(in_yy && !(m[KY].test(a) && !t.y_in_k0 && !t.y_in_kx));
    t.c_0y.push_back(in_yy && !(m[KY0Y].test(a) && !t.y_in_k0));
    t.c_xy.push_back(in_yy && !(m[KYXY].test(a) && !t.y_in_kx_x));
  }
  CoupledCluster* outs[NSETS] = {&t.k0, &t.kx, &t.ky, &t.kx_x, &t.ky_y, &t.ky_0y, &t.ky_xy};
  for (int i = 0; i < NSETS; ++i) {
    outs[i]->size = lists[i].size();
    if (keep_members) outs[i]->members = lists[i];
  }
  return t;
}

}  // namespace lrp
