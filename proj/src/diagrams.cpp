#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

#include "lrp/analytics.hpp"

namespace lrp {

std::string DiagramTree::canonical() const {
  const int vertices = n == 1 ? 2 : 2 * n;
  std::vector<std::vector<int>> adj(vertices);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::function<std::string(int, int)> rec = [&](int v, int parent) -> std::string {
    if (v <= n) return std::to_string(v);
    std::vector<std::string> kids;
    for (int w : adj[v])
      if (w != parent) kids.push_back(rec(w, v));
    std::sort(kids.begin(), kids.end());
    std::string s = "(";
    for (std::size_t i = 0; i < kids.size(); ++i) s += (i ? "," : "") + kids[i];
    return s + ")";
  };
  return rec(adj[0].front(), 0);
}

std::vector<DiagramTree> enumerate_trees(int n) {
  if (n < 1 || n > 8) throw std::invalid_argument("enumerate_trees: n must be in 1..8");
  std::vector<DiagramTree> trees{DiagramTree{n, {{0, 1}}}};
  int next_internal = n + 1;
  for (int k = 1; k < n; ++k, ++next_internal) {
    std::vector<DiagramTree> grown;
    for (const auto& t : trees)
      for (std::size_t e = 0; e < t.edges.size(); ++e) {
        DiagramTree g = t;
        const auto [a, b] = t.edges[e];
        const int c = next_internal;
        g.edges[e] = {a, c};
        g.edges.push_back({c, b});
        g.edges.push_back({c, k + 1});
        grown.push_back(std::move(g));
      }
    trees = std::move(grown);
  }
  std::set<std::string> seen;
  for (const auto& t : trees)
    if (!seen.insert(t.canonical()).second) throw std::logic_error("enumerate_trees: duplicate isomorphism class");
  return trees;
}

double diagram_moment(const std::vector<Monomial>& p, double alpha) {
  const int n = static_cast<int>(p.size());
  if (n < 1) throw std::invalid_argument("diagram_moment: need at least one monomial");
  const int d = p.front().d;
  struct Factor {
    int leaf;
    std::vector<double> u;
  };
  std::vector<Factor> factors;
  for (int i = 0; i < n; ++i) {
    p[i].validate();
    if (p[i].d != d) throw std::invalid_argument("diagram_moment: dimension mismatch");
    for (const auto& u : p[i].factors) factors.push_back({i + 1, u});
  }
  const int D = static_cast<int>(factors.size());
  if (D > kMaxMomentDegree) throw std::invalid_argument("diagram_moment: total degree must be <= 8");
  const auto trees = enumerate_trees(n);
  if (D == 0) return static_cast<double>(trees.size());

  const MomentTable table = kappa_moments(d, alpha, D, 1);
  const std::uint32_t full = (1u << D) - 1;
  std::vector<double> mom(full + 1, 0.0);
  for (std::uint32_t s = 0; s <= full; ++s) {
    Monomial m{d, {}};
    for (int f = 0; f < D; ++f)
      if ((s >> f) & 1) m.factors.push_back(factors[f].u);
    mom[s] = m.degree() % 2 ? 0.0 : table.of(m);
  }

  double total = 0.0;
  for (const auto& t : trees) {
    const int vertices = n == 1 ? 2 : 2 * n;
    std::vector<std::vector<std::pair<int, int>>> adj(vertices);
    for (int e = 0; e < static_cast<int>(t.edges.size()); ++e) {
      adj[t.edges[e].first].push_back({t.edges[e].second, e});
      adj[t.edges[e].second].push_back({t.edges[e].first, e});
    }
    // Edge masks: factor f may sit on edge e iff e lies on the path from leaf 0 to its leaf.
    std::vector<std::uint32_t> path_edges(vertices, 0);  // bitset of edges on path 0 -> v
    std::vector<int> stack{0};
    std::vector<bool> seen(vertices, false);
    seen[0] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (auto [w, e] : adj[v])
        if (!seen[w]) {
          seen[w] = true;
          path_edges[w] = path_edges[v] | (1u << e);
          stack.push_back(w);
        }
    }
    std::vector<double> dp(full + 1, 0.0);
    dp[0] = 1.0;
    for (int e = 0; e < static_cast<int>(t.edges.size()); ++e) {
      std::uint32_t allowed = 0;
      for (int f = 0; f < D; ++f)
        if ((path_edges[factors[f].leaf] >> e) & 1) allowed |= 1u << f;
      std::vector<double> next(full + 1, 0.0);
      for (std::uint32_t m = 0; m <= full; ++m) {
        if (dp[m] == 0.0) continue;
        const std::uint32_t free = allowed & ~m;
        for (std::uint32_t s = free;; s = (s - 1) & free) {
          if (mom[s] != 0.0) next[m | s] += dp[m] * mom[s];
          if (s == 0) break;
        }
      }
      dp = std::move(next);
    }
    total += dp[full];
  }
  return total;
}

}  // namespace lrp
