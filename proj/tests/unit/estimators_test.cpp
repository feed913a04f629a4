#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "lrp/estimators.hpp"
#include "lrp/fit.hpp"
#include "lrp/oracle.hpp"

using namespace lrp;

namespace {

KernelSpec spec1(double beta) {
  KernelSpec s;
  s.d = 1;
  s.alpha = 1.0 / 3.0;
  s.beta = beta;
  return s;
}

// Weighted 8-cycle with four chords; not transitive.
SmallWeightedGraph eight_vertex() {
  SmallWeightedGraph g;
  g.name = "ring8+chords";
  g.n = 8;
  for (int i = 0; i < 8; ++i) g.edges.push_back({i, (i + 1) % 8, 0.6 + 0.1 * i});
  g.edges.push_back({0, 4, 0.9});
  g.edges.push_back({1, 6, 0.4});
  g.edges.push_back({2, 5, 1.3});
  g.edges.push_back({3, 7, 0.2});
  g.root = 0;
  return g;
}

SimulationSpec on_instance(const SmallWeightedGraph& g, double beta, std::uint64_t replicas, std::uint64_t seed) {
  SimulationSpec sim;
  sim.spec = spec1(beta);
  sim.instance = g;
  sim.replicas = replicas;
  sim.seed = seed;
  sim.workers = 4;
  return sim;
}

SimulationSpec on_torus(double beta, double r, std::int64_t L, std::uint64_t replicas) {
  SimulationSpec sim;
  sim.spec = spec1(beta);
  sim.r = r;
  sim.L = L;
  sim.replicas = replicas;
  sim.workers = 4;
  return sim;
}

bool within(const Estimate& e, double exact, double k = 3.0) {
  return std::abs(e.value - exact) <= k * e.stderr_ + 1e-12;
}

}  // namespace

TEST_SUITE("estimators") {
  TEST_CASE("batch means and jackknife basics") {
    std::vector<double> ones(64, 1.0);
    const auto e = batch_estimate(ones, 32);
    CHECK(e.value == 1.0);
    CHECK(e.stderr_ == 0.0);
    std::vector<double> v(64);
    for (int i = 0; i < 64; ++i) v[i] = i % 2;
    CHECK(batch_estimate(v, 16).stderr_ == 0.0);
    CHECK(batch_estimate(v, 32).value == doctest::Approx(0.5));
    for (int i = 0; i < 64; ++i) v[i] = i;
    CHECK(batch_estimate(v, 16).stderr_ > 0.0);
    CHECK_THROWS_AS(batch_ranges(10, 16), std::invalid_argument);
    const auto j = jackknife_estimate({v, v}, 16, [](std::span<const double> m) { return m[0] / m[1]; });
    CHECK(j.value == doctest::Approx(1.0));
    CHECK(j.stderr_ == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("trivial values at beta zero") {
    const auto sim = on_torus(0.0, 8.0, 64, 512);
    for (int p = 1; p <= 6; ++p) {
      const auto e = estimate_moment(p, sim);
      CHECK(e.value == 1.0);
      CHECK(e.stderr_ == 0.0);
      CHECK(e.n_batches == 32);
      CHECK(e.params.L == 64);
    }
    CHECK(estimate_truncated(1, on_torus(1.5, 8.0, 64, 512)).value == 1.0);
    CHECK(estimate_vertex_factor(sim).value == 1.0);
    CHECK(estimate_chemical_moment(1, 0, sim).value == 0.0);
    CHECK(estimate_chemical_moment(2, 1, sim).value == 0.0);
    CHECK(estimate_edian(8.0, on_torus(0.0, 8.0, 32, 512)).value == 2.0);
    const auto conn = estimate_connection({{0}, {3}}, {{{2}, {5}}}, sim);
    CHECK(conn.two_point[0].value == 1.0);
    CHECK(conn.two_point[1].value == 0.0);
    CHECK(conn.three_point[0].value == 0.0);
    const auto prof = estimate_correction_profile(CorrectionVariant::D1, {{1}, {4}, {-6}}, sim);
    for (const auto& d : prof.d) CHECK(d.value == 0.0);
  }

  TEST_CASE("preconditions are enforced") {
    auto sim = on_torus(0.5, 8.0, 64, 512);
    CHECK_THROWS_AS(estimate_moment(7, sim), std::invalid_argument);
    CHECK_THROWS_AS(estimate_moment(0, sim), std::invalid_argument);
    sim.batches = 8;
    CHECK_THROWS_AS(estimate_moment(1, sim), std::invalid_argument);
    sim.batches = 32;
    sim.replicas = 20;
    CHECK_THROWS_AS(estimate_moment(1, sim), std::invalid_argument);
    sim.replicas = 512;
    CHECK_THROWS_AS(estimate_connection({{17}}, {}, sim), std::invalid_argument);
    CHECK_THROWS_AS(estimate_correction(CorrectionVariant::D1, Monomial::constant(1), 8.0, sim, 40.0),
                    std::invalid_argument);
  }

  TEST_CASE("edian at large beta on a small torus is |B_r| + 1") {
    const auto e = estimate_edian(2.0, on_torus(1e6, kInfinity, 4, 256));
    CHECK(e.value == 4.0);
  }

  TEST_CASE("moment estimators match the exact oracle on an 8-vertex graph") {
    const auto g = eight_vertex();
    const double beta = 0.5;
    const auto exact = exact_expectations(g, beta, {});
    const auto sim = on_instance(g, beta, 200000, 3);
    for (int p = 1; p <= 3; ++p) CHECK(within(estimate_moment(p, sim), exact.moments[p]));
    const auto v = estimate_vertex_factor(sim);
    CHECK(within(v, exact.moments[2] / std::pow(exact.moments[1], 3)));
    CHECK(v.value <= 1.0 + 3 * v.stderr_);
    CHECK(within(estimate_truncated(3, sim), exact.trunc_mean[2]));
    CHECK(exact.trunc_levels[2] == 3);
  }

  TEST_CASE("first moment equals the untruncated truncated moment on identical replicas") {
    const auto sim = on_torus(1.4, 8.0, 64, 2048);
    const auto a = estimate_moment(1, sim);
    const auto b = estimate_truncated(std::uint64_t{1} << 40, sim);
    CHECK(std::abs(a.value - b.value) <= 1e-12);
    CHECK(std::abs(a.stderr_ - b.stderr_) <= 1e-12);
  }

  TEST_CASE("connection, correction and chemical estimators match the oracle on a 6-vertex torus") {
    const double beta = 0.8;
    const auto g = torus_instance(spec1(beta), 6, kInfinity);
    const auto exact = exact_expectations(g, beta, {});
    const auto sim = on_instance(g, beta, 100000, 5);
    const auto conn = estimate_connection({{0}, {1}, {3}}, {{{1}, {2}}, {{2}, {4}}}, sim);
    CHECK(conn.two_point[0].value == 1.0);
    CHECK(within(conn.two_point[1], exact.tau2[1]));
    CHECK(within(conn.two_point[2], exact.tau2[3]));
    CHECK(within(conn.three_point[0], exact.tau3[1][2]));
    CHECK(within(conn.three_point[1], exact.tau3[2][4]));

    const auto d1 = estimate_correction_profile(CorrectionVariant::D1, {{1}, {2}, {3}}, sim);
    const auto d2 = estimate_correction_profile(CorrectionVariant::D2, {{1}, {2}, {3}}, sim);
    const auto second = estimate_moment(2, sim);
    for (int k = 0; k < 3; ++k) {
      const int y = k + 1;
      CHECK(within(d1.d[k], exact.d1[y]));
      CHECK(within(d2.d[k], exact.d2[y]));
      CHECK(within(d1.joint[k], exact.disjoint[y]));
      CHECK(within(d1.connected[k], exact.connected_sq[y]));
      CHECK(d1.d[k].value >= -3 * d1.d[k].stderr_);
      CHECK(d1.d[k].value <= d1.connected[k].value + 3 * std::hypot(d1.d[k].stderr_, d1.connected[k].stderr_));
      CHECK(d1.joint[k].value <= second.value + 3 * std::hypot(d1.joint[k].stderr_, second.stderr_));
    }
    for (int q = 0; q <= 3; ++q) CHECK(within(estimate_chemical_moment(q, 0, sim), exact.chem_moments[q]));
  }

  TEST_CASE("chemical q = p = 0 reproduces the first moment") {
    const auto sim = on_torus(1.2, 8.0, 64, 20000);
    const auto a = estimate_chemical_moment(0, 0, sim);
    const auto b = estimate_moment(1, sim);
    CHECK(std::abs(a.value - b.value) <= 3 * std::hypot(a.stderr_, b.stderr_));
  }

  TEST_CASE("correction sum is the weighted sum of the profile") {
    auto sim = on_torus(1.0, 8.0, 32, 4096);
    const auto p = Monomial::axis_power(1, 0, 2);
    const auto total = estimate_correction(CorrectionVariant::D1, p, 8.0, sim);
    std::vector<std::vector<int>> probes;
    for (int y = -4; y <= 4; ++y) probes.push_back({y});
    const auto prof = estimate_correction_profile(CorrectionVariant::D1, probes, sim);
    double sum = 0.0;
    for (int k = 0; k < 9; ++k) sum += prof.d[k].value * std::pow((k - 4) / 8.0, 2);
    CHECK(total.value == doctest::Approx(sum).epsilon(1e-9));
  }

  TEST_CASE("two-point profile is translation averaged and consistent") {
    const auto sim = on_torus(1.0, 8.0, 32, 2048);
    const auto prof = estimate_two_point_profile({{0}, {2}, {6}}, sim);
    CHECK(prof[0].value == 1.0);
    const auto conn = estimate_connection({{2}, {6}}, {}, on_torus(1.0, 8.0, 32, 20000));
    CHECK(std::abs(prof[1].value - conn.two_point[0].value) <= 3 * std::hypot(prof[1].stderr_, conn.two_point[0].stderr_));
    CHECK(std::abs(prof[2].value - conn.two_point[1].value) <= 3 * std::hypot(prof[2].stderr_, conn.two_point[1].stderr_));
  }

  TEST_CASE("max-cluster curves on the two-vertex torus are strictly increasing") {
    BetaCOptions opt;
    opt.replicas = 4000;
    opt.beta_lo = 0.05;
    opt.beta_hi = 3.0;
    opt.scan_points = 6;
    const auto scan = max_cluster_scan(spec1(0.0), {2}, 0.01, opt);
    const double w = full_kernel(spec1(0.0), 2.0);
    for (std::size_t k = 0; k < scan.size(); ++k) {
      const double exact = (1.0 + (1.0 - std::exp(-scan[k].beta * w))) / std::pow(2.0, 2.0 / 3.0);
      CHECK(std::abs(scan[k].u[0] - exact) <= 4 * scan[k].u_stderr[0] + 1e-12);
      if (k > 0) CHECK(scan[k].u[0] > scan[k - 1].u[0]);
    }
  }

  TEST_CASE("beta_c crossing on small sizes") {
    BetaCOptions opt;
    opt.replicas = 512;
    opt.workers = 4;
    opt.beta_lo = 0.2;
    opt.beta_hi = 2.0;
    const auto est = estimate_beta_c(spec1(0.0), {64, 128, 256}, 0.005, opt);
    CHECK(est.lo <= est.value);
    CHECK(est.value <= est.hi);
    CHECK(est.value > 0.4);
    CHECK(est.value < 1.2);
    CHECK(est.monotone);
    CHECK(est.exponent == doctest::Approx(2.0 / 3.0));
    CHECK(est.method.find("max-cluster crossing") == 0);
    const auto& first = est.scan.front();
    CHECK(first.u[2] < first.u[1]);

    opt.beta_hi = 0.3;
    try {
      estimate_beta_c(spec1(0.0), {64, 128}, 0.005, opt);
      FAIL("expected no crossing");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("scanned curve") != std::string::npos);
    }
  }

  TEST_CASE("power-law and log-correction fits") {
    std::vector<FitPoint> pts;
    for (double x : {2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) pts.push_back({x, 7.0 * std::pow(x, -2.0 / 3.0), 0.0});
    const auto f = fit_power_law(pts);
    CHECK(std::abs(f.exponent + 2.0 / 3.0) < 1e-12);
    CHECK(f.amplitude == doctest::Approx(7.0).epsilon(1e-12));
    pts.clear();
    for (double x : {3.0, 10.0, 30.0, 100.0, 300.0, 1000.0})
      pts.push_back({x, 3.0 * x * x * std::pow(std::log(x), -0.5), 0.0});
    const auto g = fit_log_correction(pts, 2.0);
    CHECK(std::abs(g.exponent + 0.5) < 1e-10);
    CHECK_THROWS_AS(fit_power_law({{1, 1, 0}, {2, -1, 0}, {3, 1, 0}, {4, 1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(fit_power_law({{1, 1, 0}, {2, 1, 0}, {3, 1, 0}}), std::invalid_argument);

    std::mt19937_64 gen(7);
    std::normal_distribution<double> noise(0.0, 0.01);
    int covered = 0;
    for (int t = 0; t < 1000; ++t) {
      std::vector<FitPoint> q;
      for (double x : {2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0}) {
        const double y = 7.0 * std::pow(x, -2.0 / 3.0);
        q.push_back({x, y * (1.0 + noise(gen)), 0.01 * y});
      }
      const auto r = fit_power_law(q);
      if (std::abs(r.exponent + 2.0 / 3.0) <= 3 * r.exponent_stderr) ++covered;
    }
    CHECK(covered >= 950);
  }
}
