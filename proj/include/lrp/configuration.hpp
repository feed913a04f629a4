#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrp/cluster.hpp"
#include "lrp/graph.hpp"
#include "lrp/union_find.hpp"

namespace lrp {

struct OpenEdge {
  std::uint32_t to = 0;
  std::uint32_t owner = 0;
  std::uint32_t j = 0;
  double level = 0.0;
};

// A percolation configuration revealed vertex by vertex. When a vertex is
// processed its edges to all not-yet-processed vertices are decided and
// memoized, so every pair is decided exactly once and repeated explorations
// (with different avoided sets) see one consistent configuration.
class LazyConfiguration {
 public:
  LazyConfiguration(const Graph& g, double beta, const ConfigKey& key);

  void rebind(const Graph& g, double beta, const ConfigKey& key);
  void reset(const ConfigKey& key);

  std::span<const OpenEdge> open_edges(std::uint32_t v);
  bool processed(std::uint32_t v) const { return processed_.test(v); }
  const Graph& graph() const { return *g_; }
  double beta() const { return beta_; }

  double weight_at(const OpenEdge& e, double r) const { return g_->weight_at(e.owner, e.j, r); }
  double weight(const OpenEdge& e) const { return g_->weight(e.owner, e.j); }

  // Component of x in the configuration restricted to vertices with blocked(v) false.
  // Members are appended in breadth-first order; chem (if non-null) gets BFS distances.
  // Marks are set for members.
  template <class Blocked>
  void component(std::uint32_t x, Blocked&& blocked, std::vector<std::uint32_t>& members,
                 std::vector<std::uint32_t>* chem, VertexMarks& marks) {
    members.clear();
    if (chem) chem->clear();
    marks.clear();
    if (blocked(x)) return;
    marks.set(x);
    members.push_back(x);
    if (chem) chem->push_back(0);
    for (std::size_t head = 0; head < members.size(); ++head) {
      const std::uint32_t u = members[head];
      const std::uint32_t du = chem ? (*chem)[head] : 0;
      for (const OpenEdge& e : open_edges(u)) {
        if (marks.test(e.to) || blocked(e.to)) continue;
        marks.set(e.to);
        members.push_back(e.to);
        if (chem) chem->push_back(du + 1);
      }
    }
  }

 private:
  void process(std::uint32_t v);

  const Graph* g_;
  double beta_;
  ConfigKey key_;
  VertexMarks processed_;
  std::vector<std::vector<OpenEdge>> adj_;
  std::vector<std::uint32_t> touched_;
};

struct FullEdge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  std::uint32_t j = 0;
  double level = 0.0;
};

struct FullConfiguration {
  std::vector<FullEdge> edges;
  UnionFind clusters;
  double beta = 0.0;
};

struct FullOptions {
  bool keep_edges = false;
  double max_expected_edges = 2e8;
};

// Every pair decided once, by its lower-indexed endpoint; union-find labels all clusters.
FullConfiguration sample_full_configuration(const Graph& g, double beta, const ConfigKey& key,
                                            const FullOptions& options = {});

void sample_full_configuration(const Graph& g, double beta, const ConfigKey& key, const FullOptions& options,
                               FullConfiguration& out);

}  // namespace lrp
