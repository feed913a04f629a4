#include "lrp/cluster.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "lrp/configuration.hpp"

namespace lrp {

void validate_request(const Graph& g, const ClusterRequest& request) {
  const bool needs_geometry = !request.box_radii.empty() ||
                              std::any_of(request.moments.begin(), request.moments.end(),
                                          [](const MomentSpec& m) { return m.degree > 0; });
  if (needs_geometry && !g.has_geometry())
    throw std::invalid_argument("cluster: spatial statistics requested on a graph without geometry");
  for (const auto& m : request.moments) {
    if (m.chem_power > 0 && request.mode != ExploreMode::WithChemical)
      throw std::invalid_argument("cluster: chemical moments need with-chemical mode");
    if (m.direction >= static_cast<int>(request.directions.size()))
      throw std::invalid_argument("cluster: moment direction index out of range");
    if (m.chem_power < 0 || m.degree < 0) throw std::invalid_argument("cluster: negative moment power");
  }
  for (const auto& u : request.directions)
    if (static_cast<int>(u.size()) != g.dimension()) throw std::invalid_argument("cluster: direction dimension mismatch");
  for (std::uint32_t p : request.probes)
    if (p >= g.vertex_count()) throw std::invalid_argument("cluster: probe outside the graph");
}

ClusterStats summarize_cluster(const Graph& g, std::uint32_t origin, std::span<const std::uint32_t> members,
                               std::span<const std::uint32_t> chem, const ClusterRequest& request,
                               const VertexMarks& in_cluster) {
  ClusterStats s;
  s.size = members.size();
  s.box_counts.assign(request.box_radii.size(), 0);
  s.moments.assign(request.moments.size(), 0.0);
  const int d = g.dimension();
  const bool geometry = g.has_geometry() && (!request.box_radii.empty() || !request.moments.empty());
  std::vector<int> x(std::max(d, 1), 0);
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (geometry) g.displacement(origin, members[i], x.data());
    const double nx = geometry ? norm(std::span<const int>(x.data(), d)) : 0.0;
    for (std::size_t b = 0; b < request.box_radii.size(); ++b)
      if (nx <= request.box_radii[b]) ++s.box_counts[b];
    for (std::size_t k = 0; k < request.moments.size(); ++k) {
      const MomentSpec& m = request.moments[k];
      double term = 1.0;
      if (m.chem_power > 0) {
        const double dc = chem[i];
        term = std::pow(dc, m.chem_power);
      }
      if (m.degree > 0) {
        double base = nx;
        if (m.direction >= 0) {
          const auto& u = request.directions[m.direction];
          base = 0.0;
          for (int c = 0; c < d; ++c) base += u[c] * x[c];
        }
        term *= std::pow(base, m.degree);
      }
      s.moments[k] += term;
    }
  }
  s.contains.reserve(request.probes.size());
  for (std::uint32_t p : request.probes) s.contains.push_back(in_cluster.test(p) ? 1 : 0);
  for (std::uint64_t m : request.truncations) s.truncations.push_back(std::min<std::uint64_t>(s.size, m));
  if (request.keep_members) {
    s.members.assign(members.begin(), members.end());
    s.chem.assign(chem.begin(), chem.end());
  }
  return s;
}

namespace {

struct ChemicalWorkspace {
  std::unique_ptr<LazyConfiguration> lazy;
};

thread_local ChemicalWorkspace tls_chemical;

}  // namespace

ClusterStats explore_cluster(const Graph& g, double beta, std::uint32_t origin, const ClusterRequest& request,
                             const ConfigKey& key, ExploreWorkspace& ws) {
  if (!(beta >= 0.0)) throw std::invalid_argument("cluster: beta must be nonnegative");
  if (origin >= g.vertex_count()) throw std::invalid_argument("cluster: origin outside the graph");
  validate_request(g, request);
  ws.discovered.resize(g.vertex_count());

  if (request.mode == ExploreMode::WithChemical) {
    auto& lazy = tls_chemical.lazy;
    if (!lazy) lazy = std::make_unique<LazyConfiguration>(g, beta, key);
    else lazy->rebind(g, beta, key);
    lazy->component(origin, [](std::uint32_t) { return false; }, ws.queue, &ws.chem, ws.discovered);
    return summarize_cluster(g, origin, ws.queue, ws.chem, request, ws.discovered);
  }

  ws.discovered.clear();
  ws.queue.clear();
  ws.chem.clear();
  ws.discovered.set(origin);
  ws.queue.push_back(origin);
  for (std::size_t head = 0; head < ws.queue.size(); ++head) {
    const std::uint32_t v = ws.queue[head];
    Rng rng = key.stream(v);
    for_each_open_candidate(g.cumulative(v), beta, rng, [&](std::uint32_t j, double) {
      const std::uint32_t w = g.neighbour(v, j);
      if (ws.discovered.test(w)) return;
      ws.discovered.set(w);
      ws.queue.push_back(w);
    });
  }
  return summarize_cluster(g, origin, ws.queue, ws.chem, request, ws.discovered);
}

ClusterStats explore_cluster(const Graph& g, double beta, std::uint32_t origin, const ClusterRequest& request,
                             const ConfigKey& key) {
  ExploreWorkspace ws;
  return explore_cluster(g, beta, origin, request, key, ws);
}

}  // namespace lrp
