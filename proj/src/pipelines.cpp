#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "lrp/analytics.hpp"
#include "lrp/estimators.hpp"
#include "lrp/harness.hpp"
#include "lrp/oracle.hpp"

namespace fs = std::filesystem;

namespace lrp {

namespace {

std::atomic<bool> g_interrupt{false};

}  // namespace

void request_interrupt() { g_interrupt = true; }
bool interrupt_requested() { return g_interrupt.load(); }
void clear_interrupt() { g_interrupt = false; }

namespace {

double opt_real(const ojson& o, const char* k, double def) {
  if (!o.contains(k)) return def;
  const auto& v = o[k];
  if (v.is_string()) return v.get<std::string>() == "inf" ? kInfinity : std::stod(v.get<std::string>());
  return v.get<double>();
}
std::int64_t opt_int(const ojson& o, const char* k, std::int64_t def) {
  return o.contains(k) ? o[k].get<std::int64_t>() : def;
}
template <class T>
std::vector<T> opt_list(const ojson& o, const char* k, std::vector<T> def) {
  if (!o.contains(k)) return def;
  std::vector<T> out;
  for (const auto& v : o[k]) out.push_back(v.get<T>());
  return out;
}
ojson real_json(double x) { return std::isfinite(x) ? ojson(x) : ojson("inf"); }

struct Unit {
  ojson label;
  std::uint64_t replicas = 0;
  std::function<std::vector<ResultRecord>(int workers)> execute;
};

ResultRecord from_estimate(const Estimate& e) {
  ResultRecord r;
  r.params = e.params;
  r.observable = e.observable;
  r.value = e.value;
  r.stderr_ = e.stderr_;
  r.n = e.n_replicas;
  r.seed = e.seed;
  r.batches = e.n_batches;
  return r;
}

ResultRecord exact_record(const ExperimentConfig& c, const std::string& name, double value) {
  ResultRecord r;
  r.params.d = c.kernel.d;
  r.params.alpha = c.kernel.alpha;
  r.params.beta = 0.0;
  r.params.r = kInfinity;
  r.params.L = 0;
  r.observable = name;
  r.value = value;
  r.seed = c.seed;
  r.exact = true;
  return r;
}

SimulationSpec sim_for(const ExperimentConfig& c, const GridPoint& g, int workers) {
  SimulationSpec s;
  s.spec = c.kernel;
  s.spec.beta = g.beta;
  s.r = g.r;
  s.L = g.L;
  s.seed = c.seed;
  s.replicas = g.replicas;
  s.batches = c.batches;
  s.workers = workers;
  return s;
}

ojson grid_label(const GridPoint& g) {
  return {{"beta", g.beta}, {"r", real_json(g.r)}, {"L", g.L}, {"replicas", g.replicas}};
}

std::vector<int> axis_point(int d, std::int64_t x) {
  std::vector<int> p(d, 0);
  p[0] = static_cast<int>(x);
  return p;
}

double point_norm(const std::vector<int>& p) { return norm(p); }

std::vector<std::int64_t> powers_of_two(std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> out;
  for (std::int64_t x = lo; x <= hi; x *= 2) out.push_back(x);
  return out;
}

// Per grid point units for the simulation kinds.
std::vector<Unit> grid_units(const ExperimentConfig& c,
                             const std::function<std::vector<ResultRecord>(const SimulationSpec&)>& body) {
  std::vector<Unit> units;
  for (const auto& g : c.grid()) {
    units.push_back({grid_label(g), g.replicas, [c, g, body](int workers) { return body(sim_for(c, g, workers)); }});
  }
  return units;
}

std::vector<Unit> plan_simulate(const ExperimentConfig& c) {
  const auto truncations = opt_list<std::uint64_t>(c.options, "truncations", {4});
  const int max_moment = static_cast<int>(opt_int(c.options, "max_moment", 3));
  return grid_units(c, [=](const SimulationSpec& sim) {
    SimulationContext ctx(sim);
    ClusterRequest req;
    req.truncations = truncations;
    const auto table = sample_clusters(ctx, req);
    std::vector<ResultRecord> out;
    for (int p = 1; p <= max_moment; ++p) out.push_back(from_estimate(moment_from(table, p, sim)));
    out.push_back(from_estimate(vertex_factor_from(table, sim)));
    for (std::size_t j = 0; j < truncations.size(); ++j) {
      std::vector<double> v(table.size());
      for (std::size_t i = 0; i < table.size(); ++i) v[i] = static_cast<double>(table[i].truncations[j]);
      Estimate e = batch_estimate(v, sim.batches);
      e.observable = "truncated_" + std::to_string(truncations[j]);
      e.seed = sim.seed;
      e.params = sim.params();
      auto r = from_estimate(e);
      r.annotations["m"] = truncations[j];
      out.push_back(r);
    }
    return out;
  });
}

std::vector<Unit> plan_scaling(const ExperimentConfig& c) {
  const ojson opts = c.options;
  return grid_units(c, [opts](const SimulationSpec& sim) {
    SimulationContext ctx(sim);
    const auto table = sample_clusters(ctx, {});
    std::vector<ResultRecord> out;
    auto vf = from_estimate(vertex_factor_from(table, sim));
    vf.annotations["r"] = real_json(sim.r);
    out.push_back(vf);
    out.push_back(from_estimate(moment_from(table, 1, sim)));
    out.push_back(from_estimate(moment_from(table, 2, sim)));
    const double volume = std::pow(static_cast<double>(sim.L), sim.spec.d);
    const auto tail_n =
        opt_list<std::int64_t>(opts, "tail_n", powers_of_two(1, static_cast<std::int64_t>(std::min(volume / 4, 1048576.0))));
    for (auto n : tail_n) {
      std::vector<double> v(table.size());
      for (std::size_t i = 0; i < table.size(); ++i) v[i] = table[i].size >= static_cast<std::uint64_t>(n) ? 1.0 : 0.0;
      Estimate e = batch_estimate(v, sim.batches);
      e.observable = "volume_tail";
      e.seed = sim.seed;
      e.params = sim.params();
      auto r = from_estimate(e);
      r.annotations["n"] = n;
      out.push_back(r);
    }
    return out;
  });
}

std::vector<Unit> plan_betac(const ExperimentConfig& c) {
  BetaCOptions opt;
  opt.beta_lo = opt_real(c.options, "beta_lo", opt.beta_lo);
  opt.beta_hi = opt_real(c.options, "beta_hi", opt.beta_hi);
  opt.z = opt_real(c.options, "z", opt.z);
  opt.replicas = c.replicas.front();
  opt.batches = c.batches;
  opt.seed = c.seed;
  const double tol = opt_real(c.options, "tol", 0.01);
  std::vector<std::int64_t> sizes = c.L;
  std::sort(sizes.begin(), sizes.end());
  ojson label = {{"sizes", sizes}, {"replicas", opt.replicas}};
  return {{label, opt.replicas, [c, opt, tol, sizes](int workers) {
             BetaCOptions o = opt;
             o.workers = workers;
             const auto est = estimate_beta_c(c.kernel, sizes, tol, o);
             std::vector<ResultRecord> out;
             ResultRecord r;
             r.params.d = c.kernel.d;
             r.params.alpha = c.kernel.alpha;
             r.params.beta = est.value;
             r.params.r = kInfinity;
             r.params.L = sizes.back();
             r.observable = "beta_c";
             r.value = est.value;
             r.stderr_ = (est.hi - est.lo) / (2 * o.z);
             r.n = o.replicas;
             r.seed = o.seed;
             r.batches = o.batches;
             r.annotations = {{"lo", est.lo},         {"hi", est.hi},   {"z", o.z},
                              {"method", est.method}, {"tol", tol},     {"sizes", est.sizes_used},
                              {"exponent", est.exponent}, {"monotone", est.monotone}};
             out.push_back(r);
             for (const auto& pt : est.scan) {
               for (std::size_t k = 0; k < sizes.size(); ++k) {
                 ResultRecord u = r;
                 u.observable = "max_cluster_ratio";
                 u.params.beta = pt.beta;
                 u.params.L = sizes[k];
                 u.value = pt.u[k];
                 u.stderr_ = pt.u_stderr[k];
                 u.annotations = {{"exponent", est.exponent}};
                 out.push_back(u);
               }
             }
             return out;
           }}};
}

std::vector<Unit> plan_edian(const ExperimentConfig& c) {
  std::vector<Unit> units;
  for (const auto& g : c.grid()) {
    std::vector<double> boxes;
    if (c.options.contains("r_box")) {
      for (const auto& v : c.options["r_box"]) boxes.push_back(v.get<double>());
    } else {
      for (std::int64_t b = 4; 2 * lattice_radius(static_cast<double>(b)) + 1 <= g.L / 2; b *= 2)
        boxes.push_back(static_cast<double>(b));
    }
    for (double rb : boxes) {
      ojson label = grid_label(g);
      label["r_box"] = rb;
      units.push_back({label, g.replicas, [c, g, rb](int workers) {
                         const auto sim = sim_for(c, g, workers);
                         auto e = from_estimate(estimate_edian(rb, sim));
                         e.annotations["r_box"] = rb;
                         const double scale = std::pow(rb, (c.kernel.d + c.kernel.alpha) / 2);
                         ResultRecord h = e;
                         h.observable = "edian_hydrodynamic_ratio";
                         h.value = e.value / scale;
                         h.stderr_ = e.stderr_ / scale;
                         h.annotations["scale"] = "M_r / r^{(d+alpha)/2}";
                         return std::vector<ResultRecord>{e, h};
                       }});
    }
  }
  return units;
}

std::vector<Unit> plan_twopoint(const ExperimentConfig& c) {
  const ojson opts = c.options;
  return grid_units(c, [opts](const SimulationSpec& sim) {
    const auto xs = opt_list<std::int64_t>(opts, "x", powers_of_two(1, std::max<std::int64_t>(1, sim.L / 4)));
    std::vector<std::vector<int>> offsets;
    for (auto x : xs) offsets.push_back(axis_point(sim.spec.d, x));
    const auto est = estimate_two_point_profile(offsets, sim);
    std::vector<ResultRecord> out;
    for (std::size_t i = 0; i < est.size(); ++i) {
      auto r = from_estimate(est[i]);
      r.annotations = {{"offset", offsets[i]}, {"distance", point_norm(offsets[i])}};
      out.push_back(r);
    }
    return out;
  });
}

std::vector<Unit> plan_threepoint(const ExperimentConfig& c) {
  const ojson opts = c.options;
  return grid_units(c, [opts](const SimulationSpec& sim) {
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    if (opts.contains("pairs")) {
      for (const auto& p : opts["pairs"]) pairs.push_back({p[0].get<std::int64_t>(), p[1].get<std::int64_t>()});
    } else {
      for (auto x : powers_of_two(1, std::max<std::int64_t>(1, sim.L / 16))) {
        pairs.push_back({x, -x});
        pairs.push_back({x, 4 * x});
      }
    }
    SimulationContext ctx(sim);
    const int d = sim.spec.d;
    ClusterRequest req;
    for (auto [x, y] : pairs) {
      req.probes.push_back(ctx.resolve(axis_point(d, x)));
      req.probes.push_back(ctx.resolve(axis_point(d, y)));
      req.probes.push_back(ctx.resolve(axis_point(d, y - x)));
    }
    const auto table = sample_clusters(ctx, req);
    std::vector<ResultRecord> out;
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      const auto [x, y] = pairs[j];
      std::vector<std::vector<double>> cols(4, std::vector<double>(table.size()));
      for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& s = table[i].contains;
        cols[0][i] = s[3 * j];
        cols[1][i] = s[3 * j + 1];
        cols[2][i] = s[3 * j + 2];
        cols[3][i] = s[3 * j] && s[3 * j + 1];
      }
      const double dx = std::abs(static_cast<double>(x)) * 2, dy = std::abs(static_cast<double>(y)) * 2,
                   dxy = std::abs(static_cast<double>(y - x)) * 2;
      const double dmin = std::min({dx, dy, dxy}), dmax = std::max({dx, dy, dxy});
      ojson ann = {{"x", x}, {"y", y}, {"d_min", dmin}, {"d_max", dmax}};
      auto tau3 = from_estimate([&] {
        Estimate e = batch_estimate(cols[3], sim.batches);
        e.observable = "tau3";
        e.seed = sim.seed;
        e.params = sim.params();
        return e;
      }());
      tau3.annotations = ann;
      out.push_back(tau3);
      bool positive = true;
      for (int k = 0; k < 3; ++k) {
        double s = 0;
        for (double v : cols[k]) s += v;
        positive = positive && s > 0;
      }
      if (positive) {
        Estimate e = jackknife_estimate(cols, sim.batches, [](std::span<const double> m) {
          const double den = m[0] * m[1] * m[2];
          return den > 0 ? m[3] / std::sqrt(den) : 0.0;
        });
        e.observable = "tau3_ratio";
        e.seed = sim.seed;
        e.params = sim.params();
        auto r = from_estimate(e);
        r.annotations = ann;
        r.annotations["scale"] = "tau3 / sqrt(tau2(0,x) tau2(0,y) tau2(x,y))";
        out.push_back(r);
      }
    }
    return out;
  });
}

std::vector<Unit> plan_corrections(const ExperimentConfig& c) {
  const ojson opts = c.options;
  return grid_units(c, [opts](const SimulationSpec& sim) {
    const auto ys = opt_list<std::int64_t>(opts, "probes", {1, 2, 3, 4, 6, 8});
    const std::string variant = opts.value("variant", std::string("D1"));
    std::vector<std::vector<int>> probes;
    for (auto y : ys) probes.push_back(axis_point(sim.spec.d, y));
    std::vector<ResultRecord> out;
    std::vector<CorrectionVariant> variants;
    if (variant != "D2") variants.push_back(CorrectionVariant::D1);
    if (variant != "D1") variants.push_back(CorrectionVariant::D2);
    for (auto v : variants) {
      const auto prof = estimate_correction_profile(v, probes, sim);
      for (std::size_t j = 0; j < probes.size(); ++j) {
        const ojson ann = {{"y", probes[j]}, {"distance", point_norm(probes[j])}};
        for (const auto* e : {&prof.d[j], &prof.joint[j], &prof.product[j], &prof.connected[j], &prof.tau[j]}) {
          auto r = from_estimate(*e);
          if (e != &prof.d[j]) r.observable = (v == CorrectionVariant::D1 ? "D1:" : "D2:") + r.observable;
          r.annotations = ann;
          out.push_back(r);
        }
      }
    }
    return out;
  });
}

std::string multi_index_name(const MultiIndex& k, int d) {
  std::string s = "(";
  for (int i = 0; i < d; ++i) s += (i ? "," : "") + std::to_string(k[i]);
  return s + ")";
}

std::vector<Unit> plan_kappa(const ExperimentConfig& c) {
  return {{ojson::object(), 0, [c](int workers) {
             std::vector<ResultRecord> out;
             const int d = c.kernel.d;
             const double alpha = c.kernel.alpha;
             const int maxdeg = static_cast<int>(opt_int(c.options, "max_degree", 4));
             const auto levy = levy_moments(d, alpha, maxdeg);
             for (const auto& [k, v] : levy.values) {
               if (total_degree(k) == 0) continue;
               auto r = exact_record(c, "levy_moment", v);
               r.annotations["k"] = multi_index_name(k, d);
               out.push_back(r);
             }
             for (auto n : opt_list<int>(c.options, "n", {1, 2, 3, 4, 5})) {
               const auto t = kappa_moments(d, alpha, maxdeg, n);
               for (const auto& [k, v] : t.values) {
                 auto r = exact_record(c, "kappa_moment", v);
                 r.annotations = {{"n", n}, {"k", multi_index_name(k, d)}};
                 out.push_back(r);
               }
             }
             LocalizedIntegralOptions lo;
             lo.mc_samples = static_cast<std::uint64_t>(opt_int(c.options, "mc_samples", 1000000));
             lo.eps = opt_real(c.options, "eps", 1e-3);
             lo.seed = c.seed;
             lo.workers = workers;
             for (auto n : opt_list<int>(c.options, "localized_n", {3, 4, 5})) {
               if (d == 1) {
                 const auto li = localized_ball_integral(d, alpha, n, lo);
                 auto t = exact_record(c, "ball_integral_transform", li.transform);
                 t.exact = false;
                 t.annotations = {{"n", n}, {"conditional", li.conditional}, {"relative_gap", li.relative_gap}};
                 out.push_back(t);
                 auto m = exact_record(c, "ball_integral_monte_carlo", li.monte_carlo);
                 m.exact = false;
                 m.stderr_ = li.mc_stderr;
                 m.n = lo.mc_samples;
                 m.annotations = {{"n", n}, {"eps", lo.eps}};
                 out.push_back(m);
               } else {
                 const auto [p, se] = localized_ball_monte_carlo(d, n, alpha, lo);
                 auto m = exact_record(c, "ball_integral_monte_carlo", p);
                 m.exact = false;
                 m.stderr_ = se;
                 m.n = lo.mc_samples;
                 m.annotations = {{"n", n}, {"eps", lo.eps}};
                 out.push_back(m);
               }
             }
             return out;
           }}};
}

Monomial random_direction_monomial(std::mt19937_64& gen, int d, int degree) {
  std::normal_distribution<double> g;
  Monomial m{d, {}};
  for (int i = 0; i < degree; ++i) {
    std::vector<double> u(d);
    double n2 = 0.0;
    for (double& x : u) {
      x = g(gen);
      n2 += x * x;
    }
    for (double& x : u) x /= std::sqrt(n2);
    m.factors.push_back(u);
  }
  return m;
}

std::vector<Unit> plan_recurrence(const ExperimentConfig& c) {
  return {{ojson::object(), 0, [c](int) {
             std::vector<ResultRecord> out;
             const int n_max = static_cast<int>(opt_int(c.options, "n_max", 5));
             const int directions = static_cast<int>(opt_int(c.options, "directions", 3));
             std::mt19937_64 gen(c.seed);
             for (double alpha : opt_list<double>(c.options, "alpha", {1.0 / 3.0, 2.0 / 3.0, 1.0})) {
               for (int d : opt_list<int>(c.options, "dims", {1, 2, 3})) {
                 const int maxdeg = d == 1 ? 4 : 2;
                 std::vector<Monomial> monomials;
                 for (int deg = 0; deg <= maxdeg; ++deg)
                   for (int axis = 0; axis < d; ++axis) monomials.push_back(Monomial::axis_power(d, axis, deg));
                 if (d > 1)
                   for (int deg = 1; deg <= maxdeg; ++deg)
                     for (int k = 0; k < directions; ++k) monomials.push_back(random_direction_monomial(gen, d, deg));
                 for (int n = 1; n <= n_max; ++n) {
                   double worst = 0.0;
                   for (const auto& p : monomials) {
                     const double lhs = (p.degree() + alpha * n) * kappa_moments(d, alpha, p.degree(), n).of(p);
                     const double res = recurrence_residual(n, p, alpha);
                     worst = std::max(worst, std::abs(res) / std::max(std::abs(lhs), 1e-300));
                   }
                   auto r = exact_record(c, "recurrence_max_relative_residual", worst);
                   r.params.d = d;
                   r.params.alpha = alpha;
                   r.annotations = {{"n", n}, {"max_degree", maxdeg}, {"monomials", monomials.size()}};
                   out.push_back(r);
                 }
               }
             }
             return out;
           }}};
}

std::vector<Unit> plan_diagrams(const ExperimentConfig& c) {
  std::vector<Unit> units;
  const int max_p = static_cast<int>(opt_int(c.options, "max_p", 7));
  for (int p = 1; p <= max_p; ++p) {
    units.push_back({{{"p", p}}, 0, [c, p](int) {
                       const auto trees = enumerate_trees(p);
                       std::set<std::string> canon;
                       for (const auto& t : trees) canon.insert(t.canonical());
                       const double expected = static_cast<double>(double_factorial(2 * p - 3));
                       std::vector<ResultRecord> out;
                       auto a = exact_record(c, "tree_count", static_cast<double>(trees.size()));
                       a.annotations = {{"p", p}, {"expected", expected}, {"distinct_canonical", canon.size()}};
                       out.push_back(a);
                       if (p <= 6) {
                         auto b = exact_record(
                             c, "constant_diagram",
                             diagram_moment(std::vector<Monomial>(p, Monomial::constant(c.kernel.d)), c.kernel.alpha));
                         b.annotations = {{"p", p}, {"expected", expected}};
                         out.push_back(b);
                       }
                       return out;
                     }});
  }
  return units;
}

struct OdeSetup {
  double a, gamma, C, f1, r_max, r_check, delta;
};

OdeSetup ode_setup(const ExperimentConfig& c) {
  return {opt_real(c.options, "a", 1.0),       opt_real(c.options, "gamma", 2.0),  opt_real(c.options, "C", 1.0),
          opt_real(c.options, "f1", 1.0),      opt_real(c.options, "r_max", 1e12), opt_real(c.options, "r_check", 1e6),
          opt_real(c.options, "delta", 0.0)};
}

std::vector<OdePoint> ode_trajectory(const OdeSetup& s) {
  const double delta = s.delta;
  const double C = s.C;
  return ode_solve(
      s.a, s.gamma, [C](double) { return C; },
      [delta](double r) { return delta / std::pow(1.0 + std::log(r), 2); }, s.f1, s.r_max);
}

double asymptote_ratio(const OdeSetup& s, double r, double f) {
  return f * std::pow(s.a * s.gamma * s.C * std::log(r), 1.0 / s.gamma) / std::pow(r, s.a);
}

std::vector<Unit> plan_ode(const ExperimentConfig& c) {
  return {{ojson::object(), 0, [c](int) {
             const auto s = ode_setup(c);
             const auto traj = ode_trajectory(s);
             std::vector<ResultRecord> out;
             const ojson ann = {{"a", s.a}, {"gamma", s.gamma}, {"C", s.C}, {"f1", s.f1}, {"delta", s.delta}};
             auto last = exact_record(c, "ode_f", traj.back().f);
             last.annotations = ann;
             last.annotations["r"] = traj.back().r;
             last.exact = false;
             out.push_back(last);
             if (s.delta == 0.0 && s.r_check <= s.r_max) {
               const auto check = ode_solve(
                   s.a, s.gamma, [&](double) { return s.C; }, [](double) { return 0.0; }, s.f1, s.r_check);
               const double exact = ode_exact(s.a, s.gamma, s.C, s.f1, s.r_check);
               auto e = exact_record(c, "ode_relative_error", std::abs(check.back().f / exact - 1.0));
               e.annotations = ann;
               e.annotations["r"] = s.r_check;
               e.exact = false;
               out.push_back(e);
             }
             auto ratio = exact_record(c, "ode_asymptote_ratio", asymptote_ratio(s, traj.back().r, traj.back().f));
             ratio.annotations = ann;
             ratio.annotations["r"] = traj.back().r;
             ratio.exact = false;
             bool monotone = true;
             double prev = -kInfinity;
             const double from = s.r_max / 1e6;
             for (const auto& pt : traj) {
               if (pt.r < std::max(from, 2.0)) continue;
               const double q = asymptote_ratio(s, pt.r, pt.f);
               monotone = monotone && q > prev;
               prev = q;
             }
             ratio.annotations["monotone_last_6_decades"] = monotone;
             out.push_back(ratio);
             return out;
           }}};
}

std::vector<Unit> plan_constants(const ExperimentConfig& c) {
  return {{ojson::object(), 0, [c](int workers) {
             const double beta_c = opt_real(c.options, "beta_c", 0.0);
             std::vector<ResultRecord> out;
             double integral = opt_real(c.options, "ball_integral", 0.0);
             ojson src;
             const auto mc = static_cast<std::uint64_t>(opt_int(c.options, "mc_samples", 1000000));
             if (integral > 0.0) {
               src = {{"source", "config"}};
             } else if (c.kernel.d == 1) {
               LocalizedIntegralOptions lo;
               lo.mc_samples = mc;
               lo.seed = c.seed;
               lo.workers = workers;
               const auto li = localized_ball_integral(1, c.kernel.alpha, 4, lo);
               integral = li.value;
               src = {{"source", "transform quadrature, Monte Carlo cross-check"},
                      {"monte_carlo", li.monte_carlo},
                      {"mc_stderr", li.mc_stderr},
                      {"relative_gap", li.relative_gap}};
             } else {
               LocalizedIntegralOptions lo;
               lo.mc_samples = mc;
               lo.seed = c.seed;
               lo.workers = workers;
               const auto [p, se] = localized_ball_monte_carlo(c.kernel.d, 4, c.kernel.alpha, lo);
               integral = p;
               src = {{"source", "Monte Carlo"}, {"mc_stderr", se}};
             }
             const auto u = universal_constants(c.kernel.alpha, beta_c, integral);
             for (auto [name, v] : std::vector<std::pair<std::string, double>>{
                      {"ball_integral_4", u.ball_integral},
                      {"C", u.C},
                      {"A_amplitude", u.A_amplitude},
                      {"volume_prefactor", u.volume_prefactor}}) {
               auto r = exact_record(c, name, v);
               r.params.beta = beta_c;
               r.exact = false;
               r.annotations = src;
               r.annotations["beta_c"] = beta_c;
               out.push_back(r);
             }
             return out;
           }}};
}

std::vector<Unit> plan_oracle(const ExperimentConfig& c) {
  const bool random = c.options.value("instances", std::string("builtin")) == "random";
  const int count = static_cast<int>(opt_int(c.options, "count", 100));
  const double tol = opt_real(c.options, "tolerance", 1e-9);
  const auto graphs = random ? random_instances(count, c.seed) : builtin_instances();
  std::vector<Unit> units;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const auto g = graphs[gi];
    units.push_back({{{"graph", g.name}}, 0, [c, g, tol](int) {
                       std::vector<ResultRecord> out;
                       for (const auto& chk : inequality_suite(g, c.beta, tol)) {
                         if (chk.status == InequalityCheck::Status::Skipped) continue;
                         auto r = exact_record(c, "inequality_margin", chk.margin);
                         r.params.beta = chk.beta;
                         r.annotations = {{"graph", chk.graph}, {"check", chk.name},   {"lhs", chk.lhs},
                                          {"rhs", chk.rhs},     {"status", to_string(chk.status)}};
                         out.push_back(r);
                       }
                       return out;
                     }});
  }
  return units;
}

std::vector<Unit> plan(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::Simulate: return plan_simulate(c);
    case ExperimentKind::BetaC: return plan_betac(c);
    case ExperimentKind::Edian: return plan_edian(c);
    case ExperimentKind::Scaling: return plan_scaling(c);
    case ExperimentKind::TwoPoint: return plan_twopoint(c);
    case ExperimentKind::ThreePoint: return plan_threepoint(c);
    case ExperimentKind::Corrections: return plan_corrections(c);
    case ExperimentKind::Kappa: return plan_kappa(c);
    case ExperimentKind::Recurrence: return plan_recurrence(c);
    case ExperimentKind::Diagrams: return plan_diagrams(c);
    case ExperimentKind::Ode: return plan_ode(c);
    case ExperimentKind::Constants: return plan_constants(c);
    case ExperimentKind::Oracle: return plan_oracle(c);
  }
  return {};
}

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

std::string hex(std::uint64_t h) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  fs::rename(tmp, path);
}

Table records_table(const std::vector<ResultRecord>& recs) {
  Table t;
  t.header = {"observable", "d", "alpha", "beta", "r", "L", "value", "stderr", "n", "seed", "exact", "annotations"};
  for (const auto& r : recs)
    t.rows.push_back({r.observable, std::to_string(r.params.d), format_number(r.params.alpha),
                      format_number(r.params.beta), format_number(r.params.r), std::to_string(r.params.L),
                      format_number(r.value), format_number(r.stderr_), std::to_string(r.n), std::to_string(r.seed),
                      r.exact ? "1" : "0", r.annotations.dump()});
  return t;
}

// Records of one (beta, r, L) group: the first beta, largest L and (if several) largest r.
std::vector<ResultRecord> first_group(const std::vector<ResultRecord>& recs, bool by_r) {
  if (recs.empty()) return {};
  const double beta = recs.front().params.beta;
  std::int64_t L = 0;
  double r = 0;
  for (const auto& x : recs)
    if (x.params.beta == beta) L = std::max(L, x.params.L);
  for (const auto& x : recs)
    if (x.params.beta == beta && x.params.L == L) r = std::max(r, x.params.r);
  std::vector<ResultRecord> out;
  for (const auto& x : recs)
    if (x.params.beta == beta && x.params.L == L && (!by_r || x.params.r == r)) out.push_back(x);
  return out;
}

std::vector<std::string> finalize(const ExperimentConfig& c, const std::vector<ResultRecord>& recs,
                                  const std::string& dir, const std::string& id, int workers) {
  std::vector<std::string> files;
  const std::string base = (fs::path(dir) / id).string();
  write_csv(base + ".csv", records_table(recs));
  files.push_back(base + ".csv");
  auto try_report = [&](ScalingTarget target, const std::vector<ResultRecord>& group, ScalingOptions so) {
    so.out_dir = dir;
    so.name = id + "_" + to_string(target);
    try {
      const auto rep = report_scaling(group, target, so);
      files.push_back(rep.csv);
      files.push_back(rep.svg);
    } catch (const std::invalid_argument&) {
      // Too few points for this target on this grid.
    }
  };
  switch (c.kind) {
    case ExperimentKind::BetaC: {
      PlotSpec plot{"max-cluster ratio u(beta, L)", "beta", "E[max cluster] / L^exponent", false, false, {}};
      std::map<std::int64_t, PlotSeries> by_L;
      for (const auto& r : recs)
        if (r.observable == "max_cluster_ratio") {
          auto& s = by_L[r.params.L];
          s.label = "L = " + std::to_string(r.params.L);
          s.x.push_back(r.params.beta);
          s.y.push_back(r.value);
          s.err.push_back(r.stderr_);
        }
      for (auto& [L, s] : by_L) plot.series.push_back(s);
      if (!plot.series.empty()) {
        write_svg(base + "_scan.svg", plot);
        files.push_back(base + "_scan.svg");
      }
      break;
    }
    case ExperimentKind::Edian: {
      PlotSpec plot{"edian M_r", "r", "M_r", true, true, {}};
      PlotSeries m{"edian", {}, {}, {}}, ref{"r^{(d+alpha)/2}", {}, {}, {}};
      for (const auto& r : first_group(recs, true))
        if (r.observable == "edian") {
          const double rb = r.annotations["r_box"].get<double>();
          m.x.push_back(rb);
          m.y.push_back(r.value);
          m.err.push_back(r.stderr_);
          ref.x.push_back(rb);
          ref.y.push_back(std::pow(rb, (c.kernel.d + c.kernel.alpha) / 2));
        }
      if (!m.x.empty()) {
        plot.series = {m, ref};
        write_svg(base + "_edian.svg", plot);
        files.push_back(base + "_edian.svg");
      }
      break;
    }
    case ExperimentKind::Scaling: {
      ScalingOptions so;
      so.beta_c = opt_real(c.options, "beta_c", 0.0);
      so.ball_integral = opt_real(c.options, "ball_integral", 0.0);
      if (so.ball_integral <= 0.0)
        so.ball_integral = ball_integral_for(c.kernel.d, c.kernel.alpha,
                                             static_cast<std::uint64_t>(opt_int(c.options, "mc_samples", 200000)),
                                             c.seed, workers);
      try_report(ScalingTarget::VertexFactor, first_group(recs, false), so);
      try_report(ScalingTarget::VolumeTail, first_group(recs, true), so);
      break;
    }
    case ExperimentKind::TwoPoint: {
      ScalingOptions so;
      so.x_min = opt_real(c.options, "fit_min", 0.0);
      so.x_max = opt_real(c.options, "fit_max", 0.0);
      try_report(ScalingTarget::TwoPoint, first_group(recs, true), so);
      break;
    }
    case ExperimentKind::ThreePoint:
      try_report(ScalingTarget::ThreePoint, first_group(recs, true), {});
      break;
    case ExperimentKind::Ode: {
      const auto s = ode_setup(c);
      const auto traj = ode_trajectory(s);
      Table t;
      t.header = {"r", "f", "exact", "asymptote_ratio"};
      PlotSeries ratio{"f (a gamma C log r)^{1/gamma} / r^a", {}, {}, {}};
      for (const auto& pt : traj) {
        const bool closed = s.delta == 0.0;
        t.rows.push_back({format_number(pt.r), format_number(pt.f),
                          closed ? format_number(ode_exact(s.a, s.gamma, s.C, s.f1, pt.r)) : "",
                          pt.r > 1.0 ? format_number(asymptote_ratio(s, pt.r, pt.f)) : ""});
        if (pt.r > 10.0) {
          ratio.x.push_back(pt.r);
          ratio.y.push_back(asymptote_ratio(s, pt.r, pt.f));
        }
      }
      write_csv(base + "_trajectory.csv", t);
      files.push_back(base + "_trajectory.csv");
      PlotSeries one{"limit 1", {ratio.x.front(), ratio.x.back()}, {1.0, 1.0}, {}};
      PlotSpec plot{"ODE asymptote ratio", "r", "ratio", true, false, {ratio, one}};
      write_svg(base + "_ratio.svg", plot);
      files.push_back(base + "_ratio.svg");
      break;
    }
    default:
      break;
  }
  return files;
}

}  // namespace

RunSummary run(const ExperimentConfig& config, const std::string& out_dir, const RunOptions& options) {
  config.validate();
  const std::uint64_t h = config.hash();
  const std::string id = config.id.empty() ? std::string(to_string(config.kind)) + "-" + hex(h).substr(0, 8) : config.id;
  fs::create_directories(out_dir);
  RunSummary sum;
  sum.jsonl = (fs::path(out_dir) / (id + ".jsonl")).string();
  sum.checkpoint = (fs::path(out_dir) / (id + ".checkpoint.json")).string();

  const auto units = plan(config);
  sum.units_total = units.size();
  std::vector<std::optional<std::vector<ResultRecord>>> done(units.size());
  if (options.resume && fs::exists(sum.checkpoint)) {
    std::ifstream in(sum.checkpoint);
    ojson cp;
    try {
      cp = ojson::parse(in);
    } catch (const std::exception&) {
      cp = nullptr;
    }
    if (cp.is_object() && cp.value("config_hash", std::string()) == hex(h) && cp.value("id", std::string()) == id &&
        cp.value("units_total", std::size_t{0}) == units.size()) {
      for (const auto& u : cp["completed"]) {
        const auto k = u.at("unit").get<std::size_t>();
        if (k >= units.size()) continue;
        std::vector<ResultRecord> recs;
        for (const auto& r : u.at("records")) recs.push_back(ResultRecord::from_json(r));
        done[k] = std::move(recs);
      }
    }
  }
  const ojson echo = config.echo();
  auto save_checkpoint = [&] {
    ojson cp;
    cp["id"] = id;
    cp["config_hash"] = hex(h);
    cp["units_total"] = units.size();
    cp["completed"] = ojson::array();
    for (std::size_t k = 0; k < units.size(); ++k) {
      if (!done[k]) continue;
      ojson u;
      u["unit"] = k;
      u["label"] = units[k].label;
      u["replicas"] = {0, units[k].replicas};
      u["records"] = ojson::array();
      for (const auto& r : *done[k]) u["records"].push_back(r.to_json());
      cp["completed"].push_back(u);
    }
    write_atomic(sum.checkpoint, cp.dump() + "\n");
  };

  std::ofstream jsonl(sum.jsonl, std::ios::binary | std::ios::trunc);
  if (!jsonl) throw std::runtime_error("cannot write " + sum.jsonl);
  std::size_t ran = 0;
  for (std::size_t k = 0; k < units.size(); ++k) {
    if (!done[k]) {
      if (interrupt_requested() || (options.stop_after_units && ran >= *options.stop_after_units)) {
        sum.interrupted = true;
        break;
      }
      auto recs = units[k].execute(std::max(1, options.workers));
      const std::string ts = options.timestamps ? now_utc() : std::string();
      for (std::size_t i = 0; i < recs.size(); ++i) {
        auto& r = recs[i];
        r.id = id + ":" + std::to_string(k) + ":" + std::to_string(i);
        r.kind = to_string(config.kind);
        r.config = echo;
        r.config["unit"] = units[k].label;
        r.timestamp = ts;
      }
      done[k] = std::move(recs);
      ++ran;
      save_checkpoint();
    } else {
      ++sum.units_resumed;
    }
    for (const auto& r : *done[k]) {
      jsonl << record_line(r) << '\n';
      sum.records.push_back(r);
    }
    jsonl.flush();
  }
  sum.units_run = ran;
  jsonl.close();
  if (sum.interrupted) return sum;
  sum.files = finalize(config, sum.records, out_dir, id, options.workers);
  std::error_code ec;
  fs::remove(sum.checkpoint, ec);
  return sum;
}

}  // namespace lrp
