#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lrp/cluster.hpp"
#include "lrp/estimate.hpp"
#include "lrp/graph.hpp"
#include "lrp/monomial.hpp"

namespace lrp {

struct SimulationSpec {
  KernelSpec spec;  // spec.beta is the inverse temperature
  double r = kInfinity;
  std::int64_t L = 64;
  std::optional<SmallWeightedGraph> instance;  // explicit graph instead of a torus
  std::uint64_t seed = 1;
  std::uint64_t replicas = 1024;
  int batches = 32;
  int workers = 1;

  Params params() const;
  void validate() const;
};

// Owns the graph a simulation runs on.
class SimulationContext {
 public:
  explicit SimulationContext(const SimulationSpec& sim);
  const Graph& graph() const { return *graph_; }
  const TorusGraph* torus() const { return torus_; }
  std::uint32_t origin() const { return origin_; }
  // Lattice offset (torus) or vertex id as a one-element vector (explicit graph).
  std::uint32_t resolve(const std::vector<int>& point) const;
  const SimulationSpec& sim() const { return sim_; }

 private:
  SimulationSpec sim_;
  std::unique_ptr<Graph> graph_;
  const TorusGraph* torus_ = nullptr;
  std::uint32_t origin_ = 0;
};

// One cluster exploration per replica (replica index = stream key), in index order.
std::vector<ClusterStats> sample_clusters(const SimulationContext& ctx, const ClusterRequest& request);

Estimate estimate_moment(int p, const SimulationSpec& sim);
Estimate estimate_truncated(std::uint64_t m, const SimulationSpec& sim);
Estimate estimate_vertex_factor(const SimulationSpec& sim);
Estimate estimate_chemical_moment(int q, int p, const SimulationSpec& sim);

// Per-replica values -> estimates, from an existing sample table.
Estimate moment_from(const std::vector<ClusterStats>& table, int p, const SimulationSpec& sim);
Estimate vertex_factor_from(const std::vector<ClusterStats>& table, const SimulationSpec& sim);

// Edian of max_x |K_x ∩ B_r| under full-configuration sampling, B_r centred at the torus origin.
Estimate estimate_edian(double r_box, const SimulationSpec& sim);

struct ConnectionEstimates {
  std::vector<Estimate> two_point;    // tau(0, x)
  std::vector<Estimate> three_point;  // tau(0, x, y)
};
ConnectionEstimates estimate_connection(const std::vector<std::vector<int>>& points,
                                        const std::vector<std::pair<std::vector<int>, std::vector<int>>>& pairs,
                                        const SimulationSpec& sim);

// Translation-averaged tau(0, x) from full configurations.
std::vector<Estimate> estimate_two_point_profile(const std::vector<std::vector<int>>& offsets, const SimulationSpec& sim);

enum class CorrectionVariant { D1, D2 };

struct CorrectionProfile {
  std::vector<Estimate> d;          // D^(k)(0,y)
  std::vector<Estimate> joint;      // E[|K_0| |K_y|^k 1(0 not connected to y)]
  std::vector<Estimate> product;    // E|K_0| E|K_y|^k
  std::vector<Estimate> connected;  // E[|K_0|^2 1(0 <-> y)]
  std::vector<Estimate> tau;        // tau(0,y)
};

// Per-probe D^(k)(0,y) with common random numbers: per replica
// |K_0| (|K~_y|^k - |K_y^{0y}|^k 1(y not in K_0)), where K~_y is the cluster of y
// in an independent configuration and K_y^{0y} its restriction avoiding K_0.
// The independent configuration is revealed lazily in probe order, so replica
// values depend on the probe list (not on worker scheduling).
CorrectionProfile estimate_correction_profile(CorrectionVariant variant, const std::vector<std::vector<int>>& probes,
                                              const SimulationSpec& sim);

// Σ_{y ∈ B_{probe_radius}} D^(k)(0,y) P(y/r_scale). probe_radius defaults to L/4 (norm).
Estimate estimate_correction(CorrectionVariant variant, const Monomial& p, double r_scale, const SimulationSpec& sim,
                             double probe_radius = -1.0);

struct BetaCOptions {
  double beta_lo = 0.2;
  double beta_hi = 2.0;
  std::uint64_t replicas = 2000;
  int batches = 32;
  std::uint64_t seed = 1;
  int workers = 1;
  double z = 2.0;  // bracket half-width in standard errors
  int scan_points = 41;
};

struct BetaCCurvePoint {
  double beta = 0.0;
  std::vector<double> u;  // per size
  std::vector<double> u_stderr;
};

struct BetaCEstimate {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::int64_t> sizes_used;
  std::string method;
  double exponent = 0.0;
  std::vector<BetaCCurvePoint> scan;
  bool monotone = true;  // every u curve nondecreasing in beta at 3 stderr
};

// u(beta, L) on an even scan grid over [beta_lo, beta_hi], without the crossing search.
std::vector<BetaCCurvePoint> max_cluster_scan(const KernelSpec& spec, const std::vector<std::int64_t>& sizes,
                                              double tol, const BetaCOptions& options);

BetaCEstimate estimate_beta_c(const KernelSpec& spec, const std::vector<std::int64_t>& sizes, double tol,
                              const BetaCOptions& options);

}  // namespace lrp
