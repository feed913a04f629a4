#include "lrp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lrp {

void Graph::displacement(std::uint32_t, std::uint32_t, int*) const {
  throw std::logic_error("graph: displacement requested on a graph without geometry");
}

double Graph::max_total_weight() const {
  double best = 0.0;
  for (std::uint32_t v = 0; v < vertex_count(); ++v) {
    auto cum = cumulative(v);
    if (!cum.empty()) best = std::max(best, cum.back());
  }
  return best;
}

std::int64_t TorusBox::volume() const {
  std::int64_t n = 1;
  for (int i = 0; i < d; ++i) n *= L;
  return n;
}

void TorusBox::validate(double r) const {
  if (d < 1) throw std::invalid_argument("torus: dimension must be >= 1");
  if (L < 2 || L % 2 != 0) throw std::invalid_argument("torus: L must be even and >= 2, got " + std::to_string(L));
  if (volume() > static_cast<std::int64_t>(std::numeric_limits<std::uint32_t>::max() / 2))
    throw std::invalid_argument("torus: too many vertices");
  if (std::isfinite(r)) {
    const std::int64_t rho = lattice_radius(r);
    if (L < 2 * rho + 2)
      throw std::invalid_argument("torus: L = " + std::to_string(L) + " too small for r = " + std::to_string(r) +
                                  " (need L >= " + std::to_string(2 * rho + 2) + ")");
  }
}

TorusGraph::TorusGraph(const KernelSpec& spec, double r, const TorusBox& box) : spec_(spec), r_(r), box_(box) {
  spec_.validate();
  if (!(r > 0.0)) throw std::invalid_argument("torus: cut-off must be positive");
  if (box.d != spec.d) throw std::invalid_argument("torus: dimension mismatch between box and kernel");
  box_.validate(r);
  volume_ = box_.volume();
  strides_.assign(box_.d, 1);
  for (int i = box_.d - 2; i >= 0; --i) strides_[i] = strides_[i + 1] * box_.L;

  // Displacements with coordinates in (-L/2, L/2]; for finite r only those inside the range.
  const int half = static_cast<int>(box_.L / 2);
  int lo = -half + 1, hi = half;
  if (std::isfinite(r)) {
    const int rho = static_cast<int>(lattice_radius(r));
    lo = std::max(lo, -rho);
    hi = std::min(hi, rho);
  }
  struct Candidate {
    double dist;
    std::vector<int> x;
  };
  std::vector<Candidate> candidates;
  std::vector<int> x(box_.d, lo);
  while (true) {
    const double dist = norm(x);
    if (dist > 0.0 && dist < r) candidates.push_back({dist, x});
    int i = box_.d - 1;
    while (i >= 0 && x[i] == hi) x[i--] = lo;
    if (i < 0) break;
    ++x[i];
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });
  offsets_.reserve(candidates.size() * box_.d);
  double cum = 0.0;
  for (const auto& c : candidates) {
    const double w = cutoff_kernel(spec_, c.dist, r);
    if (!(w > 0.0)) continue;
    offsets_.insert(offsets_.end(), c.x.begin(), c.x.end());
    weights_.push_back(w);
    distances_.push_back(c.dist);
    cum += w;
    cumulative_.push_back(cum);
  }
}

std::uint32_t TorusGraph::index(std::span<const int> x) const {
  std::int64_t idx = 0;
  for (int i = 0; i < box_.d; ++i) {
    std::int64_t c = x[i] % box_.L;
    if (c < 0) c += box_.L;
    idx += c * strides_[i];
  }
  return static_cast<std::uint32_t>(idx);
}

void TorusGraph::coordinates(std::uint32_t v, int* out) const {
  std::int64_t rest = v;
  for (int i = 0; i < box_.d; ++i) {
    out[i] = static_cast<int>(rest / strides_[i]);
    rest %= strides_[i];
  }
}

std::uint32_t TorusGraph::translate(std::uint32_t v, std::span<const int> shift) const {
  std::int64_t rest = v, idx = 0;
  for (int i = 0; i < box_.d; ++i) {
    std::int64_t c = rest / strides_[i] + shift[i];
    rest %= strides_[i];
    c %= box_.L;
    if (c < 0) c += box_.L;
    idx += c * strides_[i];
  }
  return static_cast<std::uint32_t>(idx);
}

std::uint32_t TorusGraph::neighbour(std::uint32_t v, std::uint32_t j) const {
  return translate(v, candidate_offset(j));
}

double TorusGraph::weight_at(std::uint32_t, std::uint32_t j, double r) const {
  return cutoff_kernel(spec_, distances_[j], r);
}

void TorusGraph::displacement(std::uint32_t u, std::uint32_t v, int* out) const {
  std::int64_t ru = u, rv = v;
  const std::int64_t half = box_.L / 2;
  for (int i = 0; i < box_.d; ++i) {
    std::int64_t c = rv / strides_[i] - ru / strides_[i];
    ru %= strides_[i];
    rv %= strides_[i];
    c %= box_.L;
    if (c < 0) c += box_.L;
    if (c > half) c -= box_.L;
    out[i] = static_cast<int>(c);
  }
}

void SmallWeightedGraph::validate() const {
  if (n < 1 || n > 12) throw std::invalid_argument("graph '" + name + "': vertex count must be in [1,12], got " + std::to_string(n));
  if (edges.size() > 20) throw std::invalid_argument("graph '" + name + "': " + std::to_string(edges.size()) + " edges exceeds the enumeration cap of 20");
  if (root < 0 || root >= n) throw std::invalid_argument("graph '" + name + "': root out of range");
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n || e.u == e.v)
      throw std::invalid_argument("graph '" + name + "': invalid edge endpoints");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw std::invalid_argument("graph '" + name + "': weights must be finite and positive");
  }
}

double SmallWeightedGraph::total_weight_at(int v) const {
  double s = 0.0;
  for (const auto& e : edges)
    if (e.u == v || e.v == v) s += e.weight;
  return s;
}

double SmallWeightedGraph::max_total_weight() const {
  double best = 0.0;
  for (int v = 0; v < n; ++v) best = std::max(best, total_weight_at(v));
  return best;
}

ExplicitGraph::ExplicitGraph(const SmallWeightedGraph& g) {
  g.validate();
  adjacency_.resize(g.n);
  weights_.resize(g.n);
  cumulative_.resize(g.n);
  for (const auto& e : g.edges) {
    adjacency_[e.u].push_back(static_cast<std::uint32_t>(e.v));
    weights_[e.u].push_back(e.weight);
    adjacency_[e.v].push_back(static_cast<std::uint32_t>(e.u));
    weights_[e.v].push_back(e.weight);
  }
  for (int v = 0; v < g.n; ++v) {
    double cum = 0.0;
    for (double w : weights_[v]) {
      cum += w;
      cumulative_[v].push_back(cum);
    }
  }
}

double ExplicitGraph::distance(std::uint32_t, std::uint32_t) const { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace lrp
