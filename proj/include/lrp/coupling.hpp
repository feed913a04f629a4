#pragma once

#include <cstdint>
#include <vector>

#include "lrp/cluster.hpp"
#include "lrp/configuration.hpp"
#include "lrp/graph.hpp"

namespace lrp {

struct Rung {
  double beta = 0.0;
  double r = kInfinity;
};

void validate_ladder(const Graph& g, const std::vector<Rung>& ladder, double graph_radius);

struct SweepResult {
  std::vector<ClusterStats> rungs;
  std::uint64_t edge_violations = 0;
  std::uint64_t vertex_violations = 0;
  std::uint64_t edges_checked = 0;
};

// One draw at the top rung; rung i keeps the edges with level <= beta_i J_{r_i}(dist).
// graph_radius is the cut-off the graph was built with (+inf for explicit graphs).
SweepResult coupled_sweep(const Graph& g, double graph_radius, const std::vector<Rung>& ladder,
                          std::uint32_t origin, const ClusterRequest& request, const ConfigKey& key);

struct CoupledCluster {
  std::uint64_t size = 0;
  std::vector<std::uint32_t> members;
};

struct TripleClusters {
  CoupledCluster k0;        // K_0 = K_0^0
  CoupledCluster kx;        // K_x^{0x}
  CoupledCluster ky;        // K_y^{0xy}
  CoupledCluster kx_x;      // K_x^x
  CoupledCluster ky_y;      // K_y^y
  CoupledCluster ky_0y;     // K_y^{0y}
  CoupledCluster ky_xy;     // K_y^{xy}
  bool x_in_k0 = false;
  bool y_in_k0 = false;
  bool y_in_kx = false;     // y in K_x^{0x}
  bool y_in_kx_x = false;   // y in K_x^x
  std::vector<std::uint8_t> c_0y;
  std::vector<std::uint8_t> c_xy;
  std::vector<std::uint8_t> c_0xy;
  std::vector<std::uint8_t> in_ky_y;
};

// Priority overlay of three independent configurations.
TripleClusters coupled_clusters(const Graph& g, double beta, std::uint32_t o, std::uint32_t x, std::uint32_t y,
                                const std::vector<std::uint32_t>& probes, const ConfigKey& key,
                                bool keep_members = false);

}  // namespace lrp
