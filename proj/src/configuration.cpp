#include "lrp/configuration.hpp"

#include <stdexcept>
#include <string>

namespace lrp {

LazyConfiguration::LazyConfiguration(const Graph& g, double beta, const ConfigKey& key)
    : g_(&g), beta_(beta), key_(key) {
  rebind(g, beta, key);
}

void LazyConfiguration::rebind(const Graph& g, double beta, const ConfigKey& key) {
  if (!(beta >= 0.0)) throw std::invalid_argument("configuration: beta must be nonnegative");
  const bool same = g_ == &g && adj_.size() == g.vertex_count();
  g_ = &g;
  beta_ = beta;
  if (!same) {
    adj_.assign(g.vertex_count(), {});
    touched_.clear();
    processed_.resize(g.vertex_count());
  }
  reset(key);
}

void LazyConfiguration::reset(const ConfigKey& key) {
  key_ = key;
  for (std::uint32_t v : touched_) adj_[v].clear();
  touched_.clear();
  processed_.resize(adj_.size());
  processed_.clear();
}

std::span<const OpenEdge> LazyConfiguration::open_edges(std::uint32_t v) {
  if (!processed_.test(v)) process(v);
  return adj_[v];
}

void LazyConfiguration::process(std::uint32_t v) {
  processed_.set(v);
  if (adj_[v].empty()) touched_.push_back(v);
  Rng rng = key_.stream(v);
  for_each_open_candidate(g_->cumulative(v), beta_, rng, [&](std::uint32_t j, double level) {
    const std::uint32_t w = g_->neighbour(v, j);
    if (w == v || processed_.test(w)) return;
    if (adj_[w].empty()) touched_.push_back(w);
    adj_[v].push_back({w, v, j, level});
    adj_[w].push_back({v, v, j, level});
  });
}

void sample_full_configuration(const Graph& g, double beta, const ConfigKey& key, const FullOptions& options,
                               FullConfiguration& out) {
  if (!(beta >= 0.0)) throw std::invalid_argument("full configuration: beta must be nonnegative");
  const std::uint32_t n = g.vertex_count();
  double weight_sum = 0.0;
  for (std::uint32_t v = 0; v < n; ++v) {
    auto cum = g.cumulative(v);
    if (!cum.empty()) weight_sum += cum.back();
  }
  const double expected = 0.5 * beta * weight_sum;
  if (expected > options.max_expected_edges)
    throw std::length_error("full configuration: about " + std::to_string(static_cast<long long>(expected)) +
                            " open pairs expected, budget is " +
                            std::to_string(static_cast<long long>(options.max_expected_edges)));
  out.beta = beta;
  out.edges.clear();
  out.clusters.reset(n);
  for (std::uint32_t v = 0; v < n; ++v) {
    Rng rng = key.stream(v);
    for_each_open_candidate(g.cumulative(v), beta, rng, [&](std::uint32_t j, double level) {
      const std::uint32_t w = g.neighbour(v, j);
      if (w <= v) return;
      out.clusters.unite(v, w);
      if (options.keep_edges) out.edges.push_back({v, w, j, level});
    });
  }
}

FullConfiguration sample_full_configuration(const Graph& g, double beta, const ConfigKey& key,
                                            const FullOptions& options) {
  FullConfiguration out;
  sample_full_configuration(g, beta, key, options, out);
  return out;
}

}  // namespace lrp
