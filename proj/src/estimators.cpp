#include "lrp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lrp/configuration.hpp"
#include "lrp/parallel.hpp"
#include "lrp/union_find.hpp"

namespace lrp {

Params SimulationSpec::params() const {
  Params p;
  p.d = spec.d;
  p.alpha = spec.alpha;
  p.beta = spec.beta;
  p.r = instance ? kInfinity : r;
  p.L = instance ? 0 : L;
  return p;
}

void SimulationSpec::validate() const {
  spec.validate();
  if (!(spec.beta >= 0.0)) throw std::invalid_argument("simulation: beta must be nonnegative");
  if (batches < kMinBatches)
    throw std::invalid_argument("simulation: at least " + std::to_string(kMinBatches) + " batches required, got " +
                                std::to_string(batches));
  if (replicas < static_cast<std::uint64_t>(batches))
    throw std::invalid_argument("simulation: " + std::to_string(replicas) + " replicas cannot fill " +
                                std::to_string(batches) + " batches");
  if (instance) instance->validate();
  else TorusBox{spec.d, L}.validate(r);
}

SimulationContext::SimulationContext(const SimulationSpec& sim) : sim_(sim) {
  sim.validate();
  if (sim.instance) {
    graph_ = std::make_unique<ExplicitGraph>(*sim.instance);
    origin_ = static_cast<std::uint32_t>(sim.instance->root);
  } else {
    auto t = std::make_unique<TorusGraph>(sim.spec, sim.r, TorusBox{sim.spec.d, sim.L});
    torus_ = t.get();
    graph_ = std::move(t);
  }
}

std::uint32_t SimulationContext::resolve(const std::vector<int>& point) const {
  if (!torus_) {
    if (point.size() != 1 || point[0] < 0 || static_cast<std::uint32_t>(point[0]) >= graph_->vertex_count())
      throw std::invalid_argument("simulation: explicit-graph points are single vertex ids");
    return static_cast<std::uint32_t>(point[0]);
  }
  if (static_cast<int>(point.size()) != sim_.spec.d) throw std::invalid_argument("simulation: point dimension mismatch");
  for (int c : point)
    if (4 * std::abs(static_cast<std::int64_t>(c)) > sim_.L)
      throw std::invalid_argument("simulation: point outside the box margin L/4");
  std::vector<int> x(point);
  for (int& c : x) c = static_cast<int>(((c % sim_.L) + sim_.L) % sim_.L);
  return torus_->index(x);
}

namespace {

ConfigKey replica_key(const SimulationSpec& sim, StreamTag tag, std::uint64_t config, std::uint64_t replica) {
  return ConfigKey{sim.seed, tag, config, replica};
}

Estimate finish(Estimate e, const std::string& name, const SimulationSpec& sim) {
  e.observable = name;
  e.seed = sim.seed;
  e.params = sim.params();
  return e;
}

Estimate column_estimate(const std::vector<double>& values, const std::string& name, const SimulationSpec& sim) {
  return finish(batch_estimate(values, sim.batches), name, sim);
}

void check_moment_order(int p) {
  if (p < 1 || p > 6) throw std::invalid_argument("moment order must be in 1..6, got " + std::to_string(p));
}

}  // namespace

std::vector<ClusterStats> sample_clusters(const SimulationContext& ctx, const ClusterRequest& request) {
  const auto& sim = ctx.sim();
  validate_request(ctx.graph(), request);
  std::vector<ClusterStats> out(sim.replicas);
  std::vector<ExploreWorkspace> ws(std::max(1, sim.workers));
  parallel_for(sim.replicas, sim.workers, [&](std::size_t i, int w) {
    out[i] = explore_cluster(ctx.graph(), sim.spec.beta, ctx.origin(), request,
                             replica_key(sim, StreamTag::Cluster, 0, i), ws[w]);
  });
  return out;
}

Estimate moment_from(const std::vector<ClusterStats>& table, int p, const SimulationSpec& sim) {
  check_moment_order(p);
  std::vector<double> v(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) v[i] = std::pow(static_cast<double>(table[i].size), p);
  return column_estimate(v, "moment_" + std::to_string(p), sim);
}

Estimate vertex_factor_from(const std::vector<ClusterStats>& table, const SimulationSpec& sim) {
  std::vector<std::vector<double>> cols(2, std::vector<double>(table.size()));
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double k = static_cast<double>(table[i].size);
    cols[0][i] = k;
    cols[1][i] = k * k;
  }
  double mean = 0.0;
  for (double k : cols[0]) mean += k;
  if (!(mean > 0.0)) throw std::invalid_argument("vertex factor: degenerate denominator");
  Estimate e = jackknife_estimate(cols, sim.batches, [](std::span<const double> m) {
    if (!(m[0] > 0.0)) throw std::invalid_argument("vertex factor: degenerate denominator");
    return m[1] / (m[0] * m[0] * m[0]);
  });
  return finish(e, "vertex_factor", sim);
}

Estimate estimate_moment(int p, const SimulationSpec& sim) {
  check_moment_order(p);
  SimulationContext ctx(sim);
  return moment_from(sample_clusters(ctx, {}), p, sim);
}

Estimate estimate_truncated(std::uint64_t m, const SimulationSpec& sim) {
  if (m < 1) throw std::invalid_argument("truncation level must be positive");
  SimulationContext ctx(sim);
  ClusterRequest req;
  req.truncations = {m};
  const auto table = sample_clusters(ctx, req);
  std::vector<double> v(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) v[i] = static_cast<double>(table[i].truncations[0]);
  return column_estimate(v, "truncated_" + std::to_string(m), sim);
}

Estimate estimate_vertex_factor(const SimulationSpec& sim) {
  SimulationContext ctx(sim);
  return vertex_factor_from(sample_clusters(ctx, {}), sim);
}

Estimate estimate_chemical_moment(int q, int p, const SimulationSpec& sim) {
  if (q < 0 || p < 0) throw std::invalid_argument("chemical moment: negative power");
  SimulationContext ctx(sim);
  ClusterRequest req;
  req.mode = ExploreMode::WithChemical;
  req.moments = {MomentSpec{q, p, -1}};
  const auto table = sample_clusters(ctx, req);
  std::vector<double> v(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) v[i] = table[i].moments[0];
  return column_estimate(v, "chemical_" + std::to_string(q) + "_" + std::to_string(p), sim);
}

namespace {

// Minimal n with #{x_i >= n} / N <= e^{-1}: one more than the (k+1)-th largest
// value, k = floor(N / e).
double edian_of(std::vector<std::uint64_t> x) {
  const auto k = static_cast<std::size_t>(std::floor(std::exp(-1.0) * static_cast<double>(x.size())));
  std::nth_element(x.begin(), x.begin() + k, x.end(), std::greater<>());
  return static_cast<double>(x[k] + 1);
}

}  // namespace

Estimate estimate_edian(double r_box, const SimulationSpec& sim) {
  if (sim.instance) throw std::invalid_argument("edian: needs a torus");
  if (!(r_box >= 0.0) || !std::isfinite(r_box)) throw std::invalid_argument("edian: box radius must be finite");
  SimulationContext ctx(sim);
  const TorusGraph& g = *ctx.torus();
  if (2 * lattice_radius(r_box) + 1 > sim.L) throw std::invalid_argument("edian: box B_r does not fit in the torus");
  std::vector<std::uint32_t> ball;
  for (auto x : ball_points(sim.spec, r_box)) {
    for (int& c : x) c = static_cast<int>(((c % sim.L) + sim.L) % sim.L);
    ball.push_back(g.index(x));
  }
  std::vector<std::uint64_t> maxima(sim.replicas);
  struct Local {
    FullConfiguration full;
    std::vector<std::uint32_t> count;
  };
  std::vector<Local> local(std::max(1, sim.workers));
  parallel_for(
      sim.replicas, sim.workers,
      [&](std::size_t i, int w) {
        auto& L = local[w];
        sample_full_configuration(g, sim.spec.beta, replica_key(sim, StreamTag::Full, 0, i), {}, L.full);
        L.count.assign(g.vertex_count(), 0);
        std::uint64_t best = 0;
        for (std::uint32_t v : ball) best = std::max<std::uint64_t>(best, ++L.count[L.full.clusters.find(v)]);
        maxima[i] = best;
      },
      8);
  Estimate e;
  e.value = edian_of(maxima);
  const auto ranges = batch_ranges(maxima.size(), sim.batches);
  std::vector<double> per_batch;
  for (const auto& [lo, hi] : ranges)
    per_batch.push_back(edian_of(std::vector<std::uint64_t>(maxima.begin() + lo, maxima.begin() + hi)));
  const Estimate b = batch_estimate(per_batch, static_cast<int>(per_batch.size()));
  e.stderr_ = b.stderr_;
  e.n_replicas = maxima.size();
  e.n_batches = sim.batches;
  return finish(e, "edian", sim);
}

ConnectionEstimates estimate_connection(const std::vector<std::vector<int>>& points,
                                        const std::vector<std::pair<std::vector<int>, std::vector<int>>>& pairs,
                                        const SimulationSpec& sim) {
  SimulationContext ctx(sim);
  ClusterRequest req;
  for (const auto& x : points) req.probes.push_back(ctx.resolve(x));
  for (const auto& [x, y] : pairs) {
    req.probes.push_back(ctx.resolve(x));
    req.probes.push_back(ctx.resolve(y));
  }
  const auto table = sample_clusters(ctx, req);
  ConnectionEstimates out;
  std::vector<double> v(table.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    for (std::size_t i = 0; i < table.size(); ++i) v[i] = table[i].contains[k];
    out.two_point.push_back(column_estimate(v, "tau2", sim));
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const std::size_t a = points.size() + 2 * k;
    for (std::size_t i = 0; i < table.size(); ++i) v[i] = table[i].contains[a] && table[i].contains[a + 1] ? 1.0 : 0.0;
    out.three_point.push_back(column_estimate(v, "tau3", sim));
  }
  return out;
}

std::vector<Estimate> estimate_two_point_profile(const std::vector<std::vector<int>>& offsets,
                                                 const SimulationSpec& sim) {
  if (sim.instance) throw std::invalid_argument("two-point profile: needs a torus");
  SimulationContext ctx(sim);
  const TorusGraph& g = *ctx.torus();
  for (const auto& x : offsets) ctx.resolve(x);
  const std::uint32_t n = g.vertex_count();
  std::vector<std::vector<double>> values(offsets.size(), std::vector<double>(sim.replicas));
  struct Local {
    FullConfiguration full;
    std::vector<std::uint32_t> label;
  };
  std::vector<Local> local(std::max(1, sim.workers));
  parallel_for(
      sim.replicas, sim.workers,
      [&](std::size_t i, int w) {
        auto& L = local[w];
        sample_full_configuration(g, sim.spec.beta, replica_key(sim, StreamTag::Full, 0, i), {}, L.full);
        L.label.resize(n);
        for (std::uint32_t u = 0; u < n; ++u) L.label[u] = L.full.clusters.find(u);
        for (std::size_t k = 0; k < offsets.size(); ++k) {
          std::uint64_t hits = 0;
          for (std::uint32_t u = 0; u < n; ++u) hits += L.label[u] == L.label[g.translate(u, offsets[k])];
          values[k][i] = static_cast<double>(hits) / n;
        }
      },
      8);
  std::vector<Estimate> out;
  for (auto& v : values) out.push_back(column_estimate(v, "tau2_translation_averaged", sim));
  return out;
}

namespace {

// Component sizes of probe vertices in one configuration, memoized per replica.
class ComponentSizes {
 public:
  void reset(std::size_t n) {
    marks_.resize(n);
    scratch_.resize(n);
    marks_.clear();
    size_.resize(n);
  }
  template <class Blocked>
  std::uint64_t size(LazyConfiguration& cfg, std::uint32_t y, Blocked&& blocked) {
    if (marks_.test(y)) return size_[y];
    cfg.component(y, blocked, members_, nullptr, scratch_);
    for (std::uint32_t v : members_) {
      marks_.set(v);
      size_[v] = members_.size();
    }
    return members_.size();
  }

 private:
  VertexMarks marks_;
  VertexMarks scratch_;
  std::vector<std::uint64_t> size_;
  std::vector<std::uint32_t> members_;
};

struct CorrectionLocal {
  ExploreWorkspace ws;
  std::unique_ptr<LazyConfiguration> cfg;
  ComponentSizes full;
  ComponentSizes avoid;
};

// Per replica and probe: (|K_0|, |K~_y|, |K_y^{0y}| 1(y not in K_0), 1(y in K_0)).
template <class Sink>
void correction_replicas(const SimulationContext& ctx, const std::vector<std::uint32_t>& probes, Sink&& sink) {
  const auto& sim = ctx.sim();
  const Graph& g = ctx.graph();
  std::vector<CorrectionLocal> local(std::max(1, sim.workers));
  ClusterRequest req;
  req.probes = probes;
  parallel_for(
      sim.replicas, sim.workers,
      [&](std::size_t i, int w) {
        auto& L = local[w];
        const ClusterStats k0 =
            explore_cluster(g, sim.spec.beta, ctx.origin(), req, replica_key(sim, StreamTag::Cluster, 0, i), L.ws);
        // ws.discovered still marks K_0 until the next exploration on this workspace.
        const VertexMarks& in_k0 = L.ws.discovered;
        const ConfigKey key1 = replica_key(sim, StreamTag::Cluster, 1, i);
        if (!L.cfg) L.cfg = std::make_unique<LazyConfiguration>(g, sim.spec.beta, key1);
        else L.cfg->reset(key1);
        L.full.reset(g.vertex_count());
        L.avoid.reset(g.vertex_count());
        for (std::size_t k = 0; k < probes.size(); ++k) {
          const std::uint32_t y = probes[k];
          const std::uint64_t tilde = L.full.size(*L.cfg, y, [](std::uint32_t) { return false; });
          const bool connected = k0.contains[k] != 0;
          const std::uint64_t restricted =
              connected ? 0 : L.avoid.size(*L.cfg, y, [&](std::uint32_t v) { return in_k0.test(v); });
          sink(i, k, static_cast<double>(k0.size), static_cast<double>(tilde), static_cast<double>(restricted),
               connected);
        }
      },
      16);
}

std::vector<std::uint32_t> resolve_probes(const SimulationContext& ctx, const std::vector<std::vector<int>>& probes) {
  std::vector<std::uint32_t> out;
  for (const auto& y : probes) out.push_back(ctx.resolve(y));
  return out;
}

}  // namespace

CorrectionProfile estimate_correction_profile(CorrectionVariant variant, const std::vector<std::vector<int>>& probes,
                                              const SimulationSpec& sim) {
  SimulationContext ctx(sim);
  const auto ids = resolve_probes(ctx, probes);
  const int k = variant == CorrectionVariant::D1 ? 1 : 2;
  const std::size_t n = sim.replicas;
  std::vector<std::vector<double>> d(ids.size(), std::vector<double>(n)), joint = d, product = d, conn = d, tau = d;
  correction_replicas(ctx, ids, [&](std::size_t i, std::size_t j, double s0, double tilde, double restricted,
                                    bool connected) {
    const double tk = k == 1 ? tilde : tilde * tilde;
    const double rk = k == 1 ? restricted : restricted * restricted;
    product[j][i] = s0 * tk;
    joint[j][i] = s0 * rk;
    d[j][i] = s0 * (tk - rk);
    conn[j][i] = connected ? s0 * s0 : 0.0;
    tau[j][i] = connected ? 1.0 : 0.0;
  });
  const std::string tag = k == 1 ? "D1" : "D2";
  CorrectionProfile out;
  for (std::size_t j = 0; j < ids.size(); ++j) {
    out.d.push_back(column_estimate(d[j], tag, sim));
    out.joint.push_back(column_estimate(joint[j], tag + "_joint", sim));
    out.product.push_back(column_estimate(product[j], tag + "_product", sim));
    out.connected.push_back(column_estimate(conn[j], "connected_square", sim));
    out.tau.push_back(column_estimate(tau[j], "tau2", sim));
  }
  return out;
}

Estimate estimate_correction(CorrectionVariant variant, const Monomial& p, double r_scale, const SimulationSpec& sim,
                             double probe_radius) {
  if (sim.instance) throw std::invalid_argument("correction sum: needs a torus");
  p.validate();
  if (p.d != sim.spec.d) throw std::invalid_argument("correction sum: monomial dimension mismatch");
  if (!(r_scale > 0.0)) throw std::invalid_argument("correction sum: scale must be positive");
  if (probe_radius < 0.0) probe_radius = sim.L / 4.0;
  if (probe_radius > sim.L / 2.0)
    throw std::invalid_argument("correction sum: probe radius " + std::to_string(probe_radius) +
                                " exceeds the box margin (L/2 in norm)");
  SimulationContext ctx(sim);
  std::vector<std::vector<int>> lattice;
  std::vector<double> weight;
  for (const auto& y : ball_points(sim.spec, probe_radius)) {
    std::vector<double> scaled(y.begin(), y.end());
    for (double& c : scaled) c /= r_scale;
    lattice.push_back(y);
    weight.push_back(p.evaluate(scaled));
  }
  const auto ids = resolve_probes(ctx, lattice);
  const int k = variant == CorrectionVariant::D1 ? 1 : 2;
  std::vector<double> total(sim.replicas, 0.0);
  std::vector<long double> acc(sim.replicas, 0.0);
  correction_replicas(ctx, ids, [&](std::size_t i, std::size_t j, double s0, double tilde, double restricted, bool) {
    const double tk = k == 1 ? tilde : tilde * tilde;
    const double rk = k == 1 ? restricted : restricted * restricted;
    acc[i] += static_cast<long double>(weight[j] * s0 * (tk - rk));
  });
  for (std::size_t i = 0; i < total.size(); ++i) total[i] = static_cast<double>(acc[i]);
  return column_estimate(total, k == 1 ? "D1_sum" : "D2_sum", sim);
}

namespace {

struct SizeCurves {
  std::int64_t L = 0;
  // batch_sums[b][g] = Σ over replicas in batch b of max-cluster / L^exponent at grid point g.
  std::vector<std::vector<double>> batch_sums;
  std::vector<std::size_t> batch_counts;
};

SizeCurves sample_size_curves(const KernelSpec& spec, std::int64_t L, const std::vector<double>& grid, double exponent,
                              const BetaCOptions& opt) {
  const double beta_hi = grid.back();
  KernelSpec s = spec;
  s.beta = beta_hi;
  const TorusGraph g(s, kInfinity, TorusBox{spec.d, L});
  const double scale = std::pow(static_cast<double>(L), exponent);
  const auto ranges = batch_ranges(opt.replicas, opt.batches);
  SizeCurves out;
  out.L = L;
  out.batch_sums.assign(ranges.size(), std::vector<double>(grid.size(), 0.0));
  out.batch_counts.resize(ranges.size());
  parallel_for(
      ranges.size(), opt.workers,
      [&](std::size_t b, int) {
        FullConfiguration full;
        UnionFind uf;
        std::vector<std::pair<double, std::uint64_t>> act;
        auto& sums = out.batch_sums[b];
        for (std::size_t i = ranges[b].first; i < ranges[b].second; ++i) {
          const ConfigKey key{opt.seed, StreamTag::BetaC, 0, (static_cast<std::uint64_t>(L) << 32) | i};
          sample_full_configuration(g, beta_hi, key, FullOptions{true, 2e8}, full);
          act.clear();
          for (std::size_t e = 0; e < full.edges.size(); ++e)
            act.emplace_back(full.edges[e].level / g.weight(full.edges[e].u, full.edges[e].j), e);
          std::sort(act.begin(), act.end());
          uf.reset(g.vertex_count());
          std::size_t next = 0;
          for (std::size_t k = 0; k < grid.size(); ++k) {
            while (next < act.size() && act[next].first <= grid[k]) {
              const auto& e = full.edges[act[next].second];
              uf.unite(e.u, e.v);
              ++next;
            }
            sums[k] += static_cast<double>(uf.largest()) / scale;
          }
        }
        out.batch_counts[b] = ranges[b].second - ranges[b].first;
      },
      1);
  return out;
}

// Mean and batch-means stderr of u at a point between grid nodes (linear interpolation).
std::pair<double, double> curve_at(const SizeCurves& c, const std::vector<double>& grid, double beta) {
  const auto it = std::upper_bound(grid.begin(), grid.end(), beta);
  std::size_t hi = std::min<std::size_t>(it - grid.begin(), grid.size() - 1);
  std::size_t lo = hi == 0 ? 0 : hi - 1;
  const double t = grid[hi] == grid[lo] ? 0.0 : std::clamp((beta - grid[lo]) / (grid[hi] - grid[lo]), 0.0, 1.0);
  std::vector<double> means;
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t b = 0; b < c.batch_sums.size(); ++b) {
    const double s = (1 - t) * c.batch_sums[b][lo] + t * c.batch_sums[b][hi];
    means.push_back(s / c.batch_counts[b]);
    total += s;
    n += c.batch_counts[b];
  }
  const double m = total / n;
  double var = 0.0;
  for (std::size_t b = 0; b < means.size(); ++b) {
    const double w = static_cast<double>(c.batch_counts[b]) / n;
    var += w * w * (means[b] - m) * (means[b] - m);
  }
  const double B = static_cast<double>(means.size());
  return {m, std::sqrt(var * B / (B - 1))};
}

template <class F>
double bisect(F&& f, double lo, double hi, double tol) {
  double flo = f(lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

namespace {

struct CurveSet {
  std::vector<double> grid;
  std::vector<SizeCurves> curves;
  std::vector<BetaCCurvePoint> scan;
  double exponent = 0.0;
};

CurveSet build_curves(const KernelSpec& spec, const std::vector<std::int64_t>& sizes, double tol,
                      const BetaCOptions& opt) {
  spec.validate();
  if (sizes.empty()) throw std::invalid_argument("beta_c: no sizes");
  if (!(tol > 0.0)) throw std::invalid_argument("beta_c: tolerance must be positive");
  if (!(opt.beta_lo > 0.0) || !(opt.beta_hi > opt.beta_lo)) throw std::invalid_argument("beta_c: bad search bracket");
  if (opt.batches < kMinBatches) throw std::invalid_argument("beta_c: at least 16 batches required");
  for (auto L : sizes) TorusBox{spec.d, L}.validate(kInfinity);
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw std::invalid_argument("beta_c: sizes must be increasing");

  CurveSet cs;
  cs.exponent = (spec.d + spec.alpha) / 2.0;
  const std::size_t nodes = static_cast<std::size_t>(std::ceil((opt.beta_hi - opt.beta_lo) / (tol / 4))) + 1;
  cs.grid.resize(nodes);
  for (std::size_t k = 0; k < nodes; ++k)
    cs.grid[k] = opt.beta_lo + (opt.beta_hi - opt.beta_lo) * static_cast<double>(k) / (nodes - 1);
  for (auto L : sizes) cs.curves.push_back(sample_size_curves(spec, L, cs.grid, cs.exponent, opt));

  const int scan = std::max(2, opt.scan_points);
  for (int k = 0; k < scan; ++k) {
    BetaCCurvePoint pt;
    pt.beta = opt.beta_lo + (opt.beta_hi - opt.beta_lo) * k / (scan - 1);
    for (const auto& c : cs.curves) {
      auto [m, s] = curve_at(c, cs.grid, pt.beta);
      pt.u.push_back(m);
      pt.u_stderr.push_back(s);
    }
    cs.scan.push_back(pt);
  }
  return cs;
}

}  // namespace

std::vector<BetaCCurvePoint> max_cluster_scan(const KernelSpec& spec, const std::vector<std::int64_t>& sizes,
                                              double tol, const BetaCOptions& options) {
  return build_curves(spec, sizes, tol, options).scan;
}

BetaCEstimate estimate_beta_c(const KernelSpec& spec, const std::vector<std::int64_t>& sizes, double tol,
                              const BetaCOptions& opt) {
  if (sizes.size() < 2) throw std::invalid_argument("beta_c: need at least two sizes");
  const CurveSet cs = build_curves(spec, sizes, tol, opt);
  const auto& grid = cs.grid;
  const auto& curves = cs.curves;

  BetaCEstimate out;
  out.sizes_used = sizes;
  out.exponent = cs.exponent;
  out.scan = cs.scan;
  std::ostringstream method;
  method << "max-cluster crossing, u = E[max cluster] / L^" << cs.exponent << ", sizes";
  for (auto L : sizes) method << ' ' << L;
  method << ", bracket at z = " << opt.z;
  out.method = method.str();
  const int scan = static_cast<int>(out.scan.size());
  for (std::size_t c = 0; c < curves.size(); ++c)
    for (int k = 1; k < scan; ++k) {
      const double du = out.scan[k].u[c] - out.scan[k - 1].u[c];
      const double s = std::hypot(out.scan[k].u_stderr[c], out.scan[k - 1].u_stderr[c]);
      if (du < -3 * s) out.monotone = false;
    }

  const SizeCurves& small = curves[curves.size() - 2];
  const SizeCurves& big = curves.back();
  auto diff = [&](double beta) {
    auto [mb, sb] = curve_at(big, grid, beta);
    auto [ms, ss] = curve_at(small, grid, beta);
    return std::pair<double, double>{mb - ms, std::hypot(sb, ss)};
  };
  const auto [f_lo, s_lo] = diff(opt.beta_lo);
  const auto [f_hi, s_hi] = diff(opt.beta_hi);
  if (!(f_lo < 0.0) || !(f_hi > 0.0)) {
    std::ostringstream msg;
    msg << "beta_c: no crossing of sizes " << small.L << " and " << big.L << " in [" << opt.beta_lo << ", "
        << opt.beta_hi << "]; scanned curve (beta: u_small u_big):";
    for (const auto& pt : out.scan)
      msg << "\n  " << pt.beta << ": " << pt.u[curves.size() - 2] << ' ' << pt.u.back();
    throw std::runtime_error(msg.str());
  }
  out.value = bisect([&](double b) { return diff(b).first; }, opt.beta_lo, opt.beta_hi, tol / 4);
  auto upper_band = [&](double b) {
    auto [f, s] = diff(b);
    return f + opt.z * s;
  };
  auto lower_band = [&](double b) {
    auto [f, s] = diff(b);
    return f - opt.z * s;
  };
  out.lo = upper_band(opt.beta_lo) < 0.0 ? bisect(upper_band, opt.beta_lo, out.value, tol / 4) : opt.beta_lo;
  out.hi = lower_band(opt.beta_hi) > 0.0 ? bisect(lower_band, out.value, opt.beta_hi, tol / 4) : opt.beta_hi;
  out.lo = std::min(out.lo, out.value);
  out.hi = std::max(out.hi, out.value);
  return out;
}

}  // namespace lrp
