#include "lrp/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "lrp/rng.hpp"

namespace lrp {

long long double_factorial(int n) {
  long long r = 1;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

ExactEnumerator::ExactEnumerator(const SmallWeightedGraph& g) : g_(g), n_(g.n) {
  g_.validate();
  const std::size_t configs = configurations();
  const int E = static_cast<int>(g_.edges.size());
  comp_.assign(configs * n_, 0);
  chem_.assign(configs * n_, 0xff);
  std::vector<std::uint16_t> adj(n_);
  for (std::size_t omega = 0; omega < configs; ++omega) {
    std::fill(adj.begin(), adj.end(), 0);
    for (int e = 0; e < E; ++e) {
      if (!((omega >> e) & 1)) continue;
      adj[g_.edges[e].u] |= static_cast<std::uint16_t>(1u << g_.edges[e].v);
      adj[g_.edges[e].v] |= static_cast<std::uint16_t>(1u << g_.edges[e].u);
    }
    std::uint16_t* comp = &comp_[omega * n_];
    std::uint16_t assigned = 0;
    for (int v = 0; v < n_; ++v) {
      if ((assigned >> v) & 1) continue;
      std::uint16_t reached = static_cast<std::uint16_t>(1u << v), frontier = reached;
      while (frontier) {
        std::uint16_t next = 0;
        for (std::uint16_t f = frontier; f; f &= f - 1) next |= adj[std::countr_zero(f)];
        frontier = next & ~reached;
        reached |= next;
      }
      for (std::uint16_t f = reached; f; f &= f - 1) comp[std::countr_zero(f)] = reached;
      assigned |= reached;
    }
    std::uint8_t* chem = &chem_[omega * n_];
    std::uint16_t reached = static_cast<std::uint16_t>(1u << g_.root), frontier = reached;
    chem[g_.root] = 0;
    for (std::uint8_t dist = 1; frontier; ++dist) {
      std::uint16_t next = 0;
      for (std::uint16_t f = frontier; f; f &= f - 1) next |= adj[std::countr_zero(f)];
      frontier = next & ~reached;
      reached |= next;
      for (std::uint16_t f = frontier; f; f &= f - 1) chem[std::countr_zero(f)] = dist;
    }
  }
}

void ExactEnumerator::probabilities(double beta, std::vector<double>& out) const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("oracle: beta must be finite and nonnegative");
  const int E = static_cast<int>(g_.edges.size());
  const int lo_bits = E / 2, hi_bits = E - lo_bits;
  auto table = [&](int first, int bits) {
    std::vector<double> t(std::size_t{1} << bits);
    for (std::size_t mask = 0; mask < t.size(); ++mask) {
      double p = 1.0;
      for (int b = 0; b < bits; ++b) {
        const double pe = -std::expm1(-beta * g_.edges[first + b].weight);
        p *= ((mask >> b) & 1) ? pe : 1.0 - pe;
      }
      t[mask] = p;
    }
    return t;
  };
  const auto lo = table(0, lo_bits), hi = table(lo_bits, hi_bits);
  out.resize(configurations());
  for (std::size_t omega = 0; omega < out.size(); ++omega)
    out[omega] = lo[omega & ((std::size_t{1} << lo_bits) - 1)] * hi[omega >> lo_bits];
}

double ExactEnumerator::evaluate(const Observable& f, std::size_t omega) const {
  const std::uint16_t root = comp_[omega * n_ + g_.root];
  const double s = std::popcount(root);
  switch (f.kind) {
    case Observable::Kind::Constant:
      return 1.0;
    case Observable::Kind::Moment:
      return std::pow(s, f.p);
    case Observable::Kind::Truncated:
      return std::min(s, static_cast<double>(f.m));
    case Observable::Kind::TruncatedSquare: {
      const double t = std::min(s, static_cast<double>(f.m));
      return t * t;
    }
    case Observable::Kind::Connection:
      return (root >> f.x) & 1;
    case Observable::Kind::Connection3:
      return ((root >> f.x) & 1) && ((root >> f.y) & 1);
  }
  return 0.0;
}

double ExactEnumerator::expectation(double beta, const Observable& f) const {
  std::vector<double> prob;
  probabilities(beta, prob);
  long double sum = 0.0;
  for (std::size_t omega = 0; omega < prob.size(); ++omega) sum += prob[omega] * evaluate(f, omega);
  return static_cast<double>(sum);
}

double ExactEnumerator::derivative(double beta, const Observable& f) const {
  std::vector<double> prob;
  probabilities(beta, prob);
  double total = 0.0;
  for (std::size_t e = 0; e < g_.edges.size(); ++e) {
    const std::size_t bit = std::size_t{1} << e;
    long double sum = 0.0;
    for (std::size_t omega = 0; omega < prob.size(); ++omega) {
      if (omega & bit) continue;
      sum += prob[omega] * (evaluate(f, omega | bit) - evaluate(f, omega));
    }
    total += g_.edges[e].weight * static_cast<double>(sum);
  }
  return total;
}

ExactEnumerator::SizeDerivatives ExactEnumerator::size_derivatives(double beta,
                                                                   const std::vector<std::uint64_t>& levels) const {
  std::vector<double> prob;
  probabilities(beta, prob);
  SizeDerivatives out;
  out.truncated.assign(levels.size(), 0.0);
  for (std::size_t e = 0; e < g_.edges.size(); ++e) {
    const std::size_t bit = std::size_t{1} << e;
    const double w = g_.edges[e].weight;
    // Only pivotal pairs change the root cluster.
    long double mean = 0.0, second = 0.0;
    std::vector<long double> trunc(levels.size(), 0.0);
    for (std::size_t omega = 0; omega < prob.size(); ++omega) {
      if (omega & bit) continue;
      const std::uint16_t a = comp_[omega * n_ + g_.root];
      const std::uint16_t b = comp_[(omega | bit) * n_ + g_.root];
      if (a == b) continue;
      const double s0 = std::popcount(a), s1 = std::popcount(b), p = prob[omega];
      mean += p * (s1 - s0);
      second += p * (s1 * s1 - s0 * s0);
      for (std::size_t k = 0; k < levels.size(); ++k) {
        const double m = static_cast<double>(levels[k]);
        trunc[k] += p * (std::min(s1, m) - std::min(s0, m));
      }
    }
    out.mean += w * static_cast<double>(mean);
    out.second += w * static_cast<double>(second);
    for (std::size_t k = 0; k < levels.size(); ++k) out.truncated[k] += w * static_cast<double>(trunc[k]);
  }
  return out;
}

ExactReport ExactEnumerator::report(double beta, const std::vector<Observable>& observables,
                                    const std::vector<std::uint64_t>& trunc_levels,
                                    const std::vector<std::uint32_t>& w_masks) const {
  std::vector<double> prob;
  probabilities(beta, prob);
  const int n = n_, o = g_.root;
  using Acc = long double;
  using Vec = std::vector<Acc>;
  Acc mass = 0;
  Vec moments(6, 0), trunc_mean(trunc_levels.size(), 0), trunc_square(trunc_levels.size(), 0);
  Vec size_at(n, 0), second_at(n, 0), tau2(n, 0), disjoint(n, 0), disjoint_sq(n, 0), connected_sq(n, 0),
      connected_cube(n, 0), product(n, 0), product_sq(n, 0), chem(4, 0), glad_joint(w_masks.size(), 0),
      glad_inter(w_masks.size(), 0), values(observables.size(), 0), tau3(static_cast<std::size_t>(n) * n, 0);

  std::vector<double> sizes(n);
  for (std::size_t omega = 0; omega < prob.size(); ++omega) {
    const Acc p = prob[omega];
    mass += p;
    const std::uint16_t* comp = &comp_[omega * n];
    for (int v = 0; v < n; ++v) sizes[v] = std::popcount(comp[v]);
    const std::uint16_t root = comp[o];
    const double s = sizes[o];
    Acc sp = 1.0;
    for (int k = 0; k <= 5; ++k) {
      moments[k] += p * sp;
      sp *= s;
    }
    for (std::size_t k = 0; k < trunc_levels.size(); ++k) {
      const double t = std::min(s, static_cast<double>(trunc_levels[k]));
      trunc_mean[k] += p * t;
      trunc_square[k] += p * t * t;
    }
    for (int v = 0; v < n; ++v) {
      const double sy = sizes[v];
      size_at[v] += p * sy;
      second_at[v] += p * sy * sy;
      product[v] += p * s * sy;
      product_sq[v] += p * s * sy * sy;
      if ((root >> v) & 1) {
        tau2[v] += p;
        connected_sq[v] += p * s * s;
        connected_cube[v] += p * s * s * s;
        for (std::uint16_t f = root; f; f &= f - 1) tau3[static_cast<std::size_t>(v) * n + std::countr_zero(f)] += p;
      } else {
        disjoint[v] += p * s * sy;
        disjoint_sq[v] += p * s * sy * sy;
      }
    }
    const std::uint8_t* ch = &chem_[omega * n];
    for (std::uint16_t f = root; f; f &= f - 1) {
      const double dc = ch[std::countr_zero(f)];
      chem[0] += p;
      chem[1] += p * dc;
      chem[2] += p * dc * dc;
      chem[3] += p * dc * dc * dc;
    }
    for (std::size_t k = 0; k < w_masks.size(); ++k) {
      const double inter = std::popcount(static_cast<std::uint32_t>(root) & w_masks[k]);
      glad_joint[k] += p * s * inter;
      glad_inter[k] += p * inter;
    }
    for (std::size_t k = 0; k < observables.size(); ++k) values[k] += p * evaluate(observables[k], omega);
  }

  auto cast = [](const Vec& v) { return std::vector<double>(v.begin(), v.end()); };
  ExactReport r;
  r.beta = beta;
  r.mass = static_cast<double>(mass);
  r.moments = cast(moments);
  r.trunc_levels = trunc_levels;
  r.trunc_mean = cast(trunc_mean);
  r.trunc_square = cast(trunc_square);
  r.size_at = cast(size_at);
  r.second_at = cast(second_at);
  r.tau2 = cast(tau2);
  r.tau3.assign(n, std::vector<double>(n, 0.0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) r.tau3[a][b] = static_cast<double>(tau3[static_cast<std::size_t>(a) * n + b]);
  r.disjoint = cast(disjoint);
  r.disjoint_sq = cast(disjoint_sq);
  r.connected_sq = cast(connected_sq);
  r.connected_cube = cast(connected_cube);
  r.product = cast(product);
  r.product_sq = cast(product_sq);
  r.chem_moments = cast(chem);
  for (std::size_t k = 0; k < w_masks.size(); ++k)
    r.gladkov.push_back({w_masks[k], static_cast<double>(glad_joint[k]), static_cast<double>(glad_inter[k])});
  r.values = cast(values);
  r.d1.assign(n, 0.0);
  r.d2.assign(n, 0.0);
  for (int v = 0; v < n; ++v) {
    r.d1[v] = static_cast<double>(size_at[o] * size_at[v] - disjoint[v]);
    r.d2[v] = static_cast<double>(size_at[o] * second_at[v] - disjoint_sq[v]);
  }
  return r;
}

ExactReport exact_expectations(const SmallWeightedGraph& g, double beta, const std::vector<Observable>& observables) {
  return ExactEnumerator(g).report(beta, observables);
}

double exact_beta_derivative(const SmallWeightedGraph& g, double beta, const Observable& f) {
  return ExactEnumerator(g).derivative(beta, f);
}

const char* to_string(InequalityCheck::Status s) {
  switch (s) {
    case InequalityCheck::Status::Pass:
      return "pass";
    case InequalityCheck::Status::Fail:
      return "fail";
    case InequalityCheck::Status::Skipped:
      return "skipped";
  }
  return "?";
}

std::vector<InequalityCheck> inequality_suite(const SmallWeightedGraph& g, const std::vector<double>& betas,
                                              double tolerance) {
  ExactEnumerator en(g);
  const std::vector<std::uint64_t> levels = {1, 2, 4, 8, 32};
  const int n = g.n, o = g.root;
  // W families: singletons, first half, everything.
  std::vector<std::uint32_t> w_masks;
  for (int v = 0; v < n; ++v) w_masks.push_back(1u << v);
  w_masks.push_back((1u << ((n + 1) / 2)) - 1);
  w_masks.push_back((1u << n) - 1);

  double jstar = g.max_total_weight();
  double jmin = kInfinity, jmax = 0.0;
  for (const auto& e : g.edges) {
    jmin = std::min(jmin, e.weight);
    jmax = std::max(jmax, e.weight);
  }

  std::vector<InequalityCheck> out;
  for (double beta : betas) {
    const ExactReport r = en.report(beta, {}, levels, w_masks);
    const auto der = en.size_derivatives(beta, levels);
    const double mean = r.moments[1];
    double mean_sup = 0.0;
    for (double v : r.size_at) mean_sup = std::max(mean_sup, v);

    // lhs <= rhs is the asserted form.
    auto add = [&](const std::string& name, double lhs, double rhs, bool needs_transitive) {
      InequalityCheck c;
      c.graph = g.name;
      c.name = name;
      c.beta = beta;
      c.lhs = lhs;
      c.rhs = rhs;
      c.margin = rhs - lhs;
      if (needs_transitive && !g.transitive) {
        c.status = InequalityCheck::Status::Skipped;
        c.reason = "requires a transitive graph";
      } else {
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        const bool ok = std::isfinite(c.margin) ? c.margin >= -tolerance * scale : c.margin > 0;
        c.status = ok ? InequalityCheck::Status::Pass : InequalityCheck::Status::Fail;
      }
      out.push_back(std::move(c));
    };
    auto skip = [&](const std::string& name, const std::string& reason) {
      InequalityCheck c;
      c.graph = g.name;
      c.name = name;
      c.beta = beta;
      c.status = InequalityCheck::Status::Skipped;
      c.reason = reason;
      out.push_back(std::move(c));
    };

    for (int p = 1; p <= 4; ++p)
      add("tree_graph p=" + std::to_string(p), r.moments[p],
          double_factorial(2 * p - 3) * std::pow(mean, 2 * p - 1), true);
    for (int p = 2; p <= 5; ++p)
      for (int k = 0; k <= p / 2; ++k)  // ceil((p-1)/2) = floor(p/2)
        add("generalized_tree_graph p=" + std::to_string(p) + " k=" + std::to_string(k), r.moments[p],
            double_factorial(2 * p - 3) * std::pow(r.moments[2], k) * std::pow(mean, 2 * p - 1 - 3 * k), true);

    for (const auto& gt : r.gladkov) {
      const double w_size = std::popcount(gt.w_mask);
      add("gladkov |W|=" + std::to_string(static_cast<int>(w_size)) + " W=" + std::to_string(gt.w_mask), gt.joint,
          std::pow(2.0, 1.5) * mean_sup * std::sqrt(w_size * gt.intersection), false);
    }

    for (std::size_t k = 0; k < levels.size(); ++k) {
      const double m = static_cast<double>(levels[k]);
      const std::string tag = " m=" + std::to_string(levels[k]);
      const double tm = r.trunc_mean[k], tq = r.trunc_square[k], dm = der.truncated[k];
      add("finitary_magnetization" + tag, 0.5 * std::min(mean, std::sqrt(m / 2.0)), tm, true);
      if (beta > 0.0) {
        add("durrett_nguyen" + tag, dm, std::sqrt(jstar * tm * tq / beta), false);
        add("durrett_nguyen_truncated" + tag, dm, std::sqrt(jstar * m / beta) * tm, true);
      } else {
        skip("durrett_nguyen" + tag, "beta = 0: right-hand side infinite");
        skip("durrett_nguyen_truncated" + tag, "beta = 0: right-hand side infinite");
      }
      add("truncated_derivative_simple" + tag, dm, jstar * tm * tm, true);
    }
    if (beta > 0.0)
      add("durrett_nguyen m=inf", der.mean, std::sqrt(jstar * mean * r.moments[2] / beta), true);
    else
      skip("durrett_nguyen m=inf", "beta = 0: right-hand side infinite");
    add("derivative_upper", der.mean, jstar * mean * mean, true);
    if (beta > 0.0) {
      double factor = kInfinity;
      for (const auto& e : g.edges) factor = std::min(factor, e.weight / std::expm1(beta * e.weight));
      if (g.edges.empty()) factor = 0.0;
      add("osss_lower", factor * (r.moments[2] / (4.0 * mean) - 0.5 * mean + 0.25), der.mean, true);
    } else {
      skip("osss_lower", "beta = 0: edge factor infinite");
    }

    for (int y = 0; y < n; ++y) {
      if (y == o) continue;
      const std::string tag = " y=" + std::to_string(y);
      const double ex = r.size_at[o], ey = r.size_at[y], ey2 = r.second_at[y];
      add("bk_upper F=G=|K|" + tag, r.disjoint[y], ex * ey, false);
      add("bk_lower F=G=|K|" + tag, ex * ey - r.connected_sq[y], r.disjoint[y], false);
      add("bk_covariance_lower F=G=|K|" + tag, 0.0, r.product[y] - ex * ey, false);
      add("bk_covariance_upper F=G=|K|" + tag, r.product[y] - ex * ey, r.connected_sq[y], false);
      add("bk_upper F=|K|,G=|K|^2" + tag, r.disjoint_sq[y], ex * ey2, false);
      add("bk_lower F=|K|,G=|K|^2" + tag, ex * ey2 - r.connected_cube[y], r.disjoint_sq[y], false);
      add("bk_covariance_lower F=|K|,G=|K|^2" + tag, 0.0, r.product_sq[y] - ex * ey2, false);
      add("bk_covariance_upper F=|K|,G=|K|^2" + tag, r.product_sq[y] - ex * ey2, r.connected_cube[y], false);
      add("correction_d1_lower" + tag, 0.0, r.d1[y], false);
      add("correction_d1_upper" + tag, r.d1[y], r.connected_sq[y], false);
    }

    add("chemical_sum", r.chem_moments[1], mean * mean, true);
    add("chemical_second_moment", r.moments[2], mean * (r.chem_moments[0] + r.chem_moments[1]), true);
    add("chemical_square_sum", r.chem_moments[2], 2.0 * mean * mean * mean, true);
    if (beta > 0.0 && !g.edges.empty()) {
      double sup = 0.0;
      for (const auto& e : g.edges) sup = std::max(sup, e.weight / std::expm1(beta * e.weight));
      add("chemical_derivative", der.mean, sup * r.chem_moments[1], true);
    }
  }
  (void)jmin;
  (void)jmax;
  return out;
}

SmallWeightedGraph single_edge(double w) {
  SmallWeightedGraph g;
  g.name = "single_edge";
  g.n = 2;
  g.edges = {{0, 1, w}};
  g.transitive = true;
  return g;
}

SmallWeightedGraph triangle(double w) {
  SmallWeightedGraph g = cycle_graph(3, w);
  g.name = "triangle";
  return g;
}

SmallWeightedGraph cycle_graph(int n, double w) {
  SmallWeightedGraph g;
  g.name = "cycle_" + std::to_string(n);
  g.n = n;
  for (int i = 0; i < n; ++i) g.edges.push_back({i, (i + 1) % n, w});
  if (n == 2) g.edges.resize(1);
  g.transitive = true;
  return g;
}

SmallWeightedGraph complete_graph(int n, double w) {
  SmallWeightedGraph g;
  g.name = "complete_" + std::to_string(n);
  g.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.edges.push_back({i, j, w});
  g.transitive = true;
  return g;
}

SmallWeightedGraph torus_instance(const KernelSpec& spec, std::int64_t L, double r) {
  TorusBox box{spec.d, L};
  TorusGraph t(spec, r, box);
  SmallWeightedGraph g;
  g.name = "torus_L" + std::to_string(L) + "_r" + (std::isfinite(r) ? std::to_string(static_cast<int>(r)) : "inf");
  g.n = static_cast<int>(t.vertex_count());
  if (g.n > 12) throw std::invalid_argument("torus instance: more than 12 vertices");
  for (std::uint32_t v = 0; v < t.vertex_count(); ++v)
    for (std::uint32_t j = 0; j < t.candidate_count(); ++j) {
      const std::uint32_t w = t.neighbour(v, j);
      if (w > v) g.edges.push_back({static_cast<int>(v), static_cast<int>(w), t.weight(v, j)});
    }
  g.transitive = true;
  g.validate();
  return g;
}

SmallWeightedGraph box_instance(const KernelSpec& spec, int n, double r, int root) {
  SmallWeightedGraph g;
  g.name = "box_n" + std::to_string(n) + "_r" + std::to_string(r);
  g.n = n;
  g.root = root;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double w = cutoff_kernel(spec, 2.0 * (j - i), r);
      if (w > 0.0) g.edges.push_back({i, j, w});
    }
  g.transitive = n <= 2;
  g.validate();
  return g;
}

std::vector<SmallWeightedGraph> random_instances(int count, std::uint64_t seed) {
  std::vector<SmallWeightedGraph> out;
  KernelSpec spec;
  spec.d = 1;
  spec.alpha = 1.0 / 3.0;
  for (int i = 0; out.size() < static_cast<std::size_t>(count); ++i) {
    Rng rng = Rng::keyed(seed, static_cast<std::uint64_t>(StreamTag::Instance), static_cast<std::uint64_t>(i));
    const int family = i % 5;
    const double scale = 0.2 + 2.8 * rng.uniform();
    SmallWeightedGraph g;
    if (family == 0) {
      g = cycle_graph(3 + static_cast<int>(rng.below(10)), scale);
    } else if (family == 1) {
      g = complete_graph(2 + static_cast<int>(rng.below(5)), scale);
    } else if (family == 2) {
      // Kernel-weighted torus, rescaled so the beta grid spans sub- and supercritical behaviour.
      static const std::pair<std::int64_t, double> shapes[] = {{4, 3.0}, {6, 5.0}, {8, 5.0}, {10, 5.0}, {4, kInfinity}, {6, kInfinity}, {10, 3.0}, {12, 3.0}};
      const auto [L, r] = shapes[rng.below(std::size(shapes))];
      g = torus_instance(spec, L, r);
      for (auto& e : g.edges) e.weight *= 4.0 * scale;
    } else if (family == 3) {
      static const std::pair<int, double> shapes[] = {{6, 7.0}, {8, 5.0}, {10, 5.0}, {12, 3.0}, {7, 7.0}, {9, 5.0}};
      const auto [n, r] = shapes[rng.below(std::size(shapes))];
      g = box_instance(spec, n, r, static_cast<int>(rng.below(n)));
      for (auto& e : g.edges) e.weight *= 4.0 * scale;
    } else {
      // Sparse random graph with independent weights; not transitive.
      const int n = 4 + static_cast<int>(rng.below(7));
      g.n = n;
      g.name = "random_n" + std::to_string(n);
      for (int a = 0; a < n && g.edges.size() < 20; ++a)
        for (int b = a + 1; b < n && g.edges.size() < 20; ++b)
          if (rng.uniform() < 0.45) g.edges.push_back({a, b, scale * (0.1 + 1.9 * rng.uniform())});
      g.root = static_cast<int>(rng.below(n));
      g.transitive = false;
    }
    g.name += "#" + std::to_string(out.size());
    g.validate();
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<SmallWeightedGraph> builtin_instances() {
  KernelSpec spec;
  spec.d = 1;
  spec.alpha = 1.0 / 3.0;
  std::vector<SmallWeightedGraph> v = {single_edge(1.0), triangle(1.0), cycle_graph(6, 1.0), complete_graph(4, 1.0),
                                       torus_instance(spec, 10, 5.0)};
  return v;
}

}  // namespace lrp
