#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "lrp/graph.hpp"
#include "lrp/rng.hpp"

namespace lrp {

// Poisson clock over the cumulative weights of one vertex: calls f(j, level)
// for every open candidate j, where level ~ Exp(1) conditioned on level <= beta w_j.
// The edge to j is open at (beta', w') iff level <= beta' w', which gives the
// monotone coupling in beta and in the cut-off.
template <class F>
void for_each_open_candidate(std::span<const double> cum, double beta, Rng& rng, F&& f) {
  if (cum.empty() || !(beta > 0.0)) return;
  const double total = cum.back();
  double t = 0.0;
  while (true) {
    t += rng.exponential() / beta;
    if (t >= total) return;
    const auto it = std::upper_bound(cum.begin(), cum.end(), t);
    const auto j = static_cast<std::uint32_t>(it - cum.begin());
    const double start = j == 0 ? 0.0 : cum[j - 1];
    f(j, beta * (t - start));
    t = cum[j];
  }
}

enum class ExploreMode { VertexSet, WithChemical };

// One moment Σ_{x∈K} d_chem(o,x)^chem_power · m(x)^degree where m(x) is the norm
// (direction < 0) or <x, u_direction>.
struct MomentSpec {
  int chem_power = 0;
  int degree = 0;
  int direction = -1;
};

struct ClusterRequest {
  ExploreMode mode = ExploreMode::VertexSet;
  std::vector<double> box_radii;
  std::vector<std::vector<double>> directions;
  std::vector<MomentSpec> moments;
  std::vector<std::uint32_t> probes;
  std::vector<std::uint64_t> truncations;
  bool keep_members = false;
};

struct ClusterStats {
  std::uint64_t size = 0;
  std::vector<std::uint64_t> box_counts;
  std::vector<double> moments;
  std::vector<std::uint8_t> contains;
  std::vector<std::uint64_t> truncations;
  std::vector<std::uint32_t> members;
  std::vector<std::uint32_t> chem;

  bool operator==(const ClusterStats&) const = default;
};

// Per-vertex stream key for configuration `config` of replica `replica`.
inline Rng vertex_stream(std::uint64_t seed, StreamTag tag, std::uint64_t config, std::uint64_t replica,
                         std::uint32_t v) {
  return Rng::keyed(seed, (static_cast<std::uint64_t>(tag) << 16) | config, replica, v);
}

struct ConfigKey {
  std::uint64_t seed = 0;
  StreamTag tag = StreamTag::Cluster;
  std::uint64_t config = 0;
  std::uint64_t replica = 0;

  Rng stream(std::uint32_t v) const { return vertex_stream(seed, tag, config, replica, v); }
};

// Epoch-stamped vertex marks, reset in O(1).
class VertexMarks {
 public:
  void resize(std::size_t n) {
    if (stamp_.size() != n) {
      stamp_.assign(n, 0);
      epoch_ = 0;
    }
  }
  void clear() {
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
  }
  bool test(std::uint32_t v) const { return stamp_[v] == epoch_; }
  void set(std::uint32_t v) { stamp_[v] = epoch_; }

 private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
};

class LazyConfiguration;

struct ExploreWorkspace {
  VertexMarks discovered;
  std::vector<std::uint32_t> queue;
  std::vector<std::uint32_t> chem;
};

// Cluster of `origin` at inverse temperature beta. Vertex-set mode decides each
// pair at most once and only towards undiscovered vertices; with-chemical mode
// decides every intra-cluster pair and reports chemical distances.
ClusterStats explore_cluster(const Graph& g, double beta, std::uint32_t origin, const ClusterRequest& request,
                             const ConfigKey& key, ExploreWorkspace& ws);

ClusterStats explore_cluster(const Graph& g, double beta, std::uint32_t origin, const ClusterRequest& request,
                             const ConfigKey& key);

// Statistics of an explicit member list (discovery order; chem may be empty).
ClusterStats summarize_cluster(const Graph& g, std::uint32_t origin, std::span<const std::uint32_t> members,
                               std::span<const std::uint32_t> chem, const ClusterRequest& request,
                               const VertexMarks& in_cluster);

void validate_request(const Graph& g, const ClusterRequest& request);

}  // namespace lrp
