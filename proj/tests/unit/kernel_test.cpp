#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "lrp/kernel.hpp"

using namespace lrp;

namespace {
KernelSpec line() {
  KernelSpec s;
  s.d = 1;
  s.alpha = 1.0 / 3.0;
  return s;
}
}  // namespace

TEST_SUITE("kernel") {
  TEST_CASE("scaled sup norm") {
    CHECK(norm(std::vector<int>{0, 0}) == 0.0);
    CHECK(norm(std::vector<int>{1, 0}) == 2.0);
    CHECK(norm(std::vector<int>{-3, 2, 1}) == 6.0);
  }

  TEST_CASE("cut-off kernel closed form against quadrature") {
    const KernelSpec s = line();
    CHECK(cutoff_kernel(s, 5.0, 4.0) == 0.0);
    CHECK(cutoff_kernel(s, 4.0, 4.0) == 0.0);
    const double expected = (std::pow(2.0, -4.0 / 3) - std::pow(4.0, -4.0 / 3)) * 0.75;
    const double quad = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [](double t) { return std::pow(t, -7.0 / 3); }, 2.0, 4.0, 10, 1e-14);
    CHECK(cutoff_kernel(s, 2.0, 4.0) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(quad == doctest::Approx(expected).epsilon(1e-12));
    CHECK_THROWS(cutoff_kernel(s, NAN, 4.0));
    CHECK_THROWS(cutoff_kernel(s, INFINITY, 4.0));
  }

  TEST_CASE("cut-off kernel monotone in r and below the full kernel") {
    const KernelSpec s = line();
    for (double dist : {2.0, 4.0, 10.0, 30.0}) {
      double prev = 0.0;
      for (double r : {1.0, 2.0, 3.0, 5.0, 10.0, 40.0, 1e3, kInfinity}) {
        const double j = cutoff_kernel(s, dist, r);
        CHECK(j >= prev);
        CHECK(j <= full_kernel(s, dist));
        prev = j;
      }
      CHECK(cutoff_kernel(s, dist, kInfinity) == full_kernel(s, dist));
    }
  }

  TEST_CASE("edge probability") {
    const KernelSpec s = line();
    CHECK(edge_probability(s, 2.0, 8.0, 0.0) == 0.0);
    CHECK(edge_probability(s, 10.0, 8.0, 1.0) == 0.0);
    const double expected = 1.0 - std::exp(-0.75 * std::pow(2.0, -4.0 / 3));
    CHECK(edge_probability(s, 2.0, kInfinity, 1.0) == doctest::Approx(expected).epsilon(1e-14));
    double prev = 0.0;
    for (double beta : {0.1, 0.5, 1.0, 3.0}) {
      const double p = edge_probability(s, 2.0, 6.0, beta);
      CHECK(p > prev);
      CHECK(p < 1.0);
      prev = p;
    }
  }

  TEST_CASE("activation radius") {
    const KernelSpec s = line();
    const double t = 0.1;
    const double r = activation_radius_from_level(s, 2.0, t);
    CHECK(r == doctest::Approx(std::pow(std::pow(2.0, -4.0 / 3) - (4.0 / 3) * 0.1, -0.75)).epsilon(1e-14));
    CHECK(r == doctest::Approx(2.718).epsilon(1e-3));
    const double u = -std::expm1(-t);
    CHECK(activation_radius(s, 2.0, 1.0, u) == doctest::Approx(r).epsilon(1e-12));
    CHECK(edge_probability(s, 2.0, r, 1.0) == doctest::Approx(u).epsilon(1e-12));
    CHECK(activation_radius(s, 2.0, 1.0, 0.5) == kInfinity);
    CHECK_THROWS(activation_radius(s, 2.0, 1.0, 0.0));
    CHECK_THROWS(activation_radius(s, 2.0, 1.0, 1.0));
    // Open at (beta, r) iff r >= r*.
    for (double dist : {2.0, 6.0}) {
      for (double uu : {0.001, 0.01, 0.05, 0.2}) {
        for (double beta : {0.5, 1.0, 2.0}) {
          const double rs = activation_radius(s, dist, beta, uu);
          CHECK(rs >= dist);
          for (double rr : {2.0, 3.0, 6.0, 10.0, 100.0}) {
            const bool open = uu <= edge_probability(s, dist, rr, beta);
            if (std::abs(rr - rs) > 1e-9) CHECK(open == (rr >= rs));
          }
        }
      }
    }
  }

  TEST_CASE("ball size and points") {
    KernelSpec s = line();
    CHECK(ball_size(s, 4.0) == 5);
    auto pts = ball_points(s, 4.0);
    REQUIRE(pts.size() == 5);
    CHECK(pts.front()[0] == -2);
    CHECK(pts.back()[0] == 2);
    CHECK(ball_size(s, 1000.0) == 1001);
    for (double r : {1e2, 1e3, 1e4}) CHECK(std::abs(ball_size(s, r) / r - 1.0) <= 0.02);
    KernelSpec s2 = s;
    s2.d = 2;
    CHECK(ball_size(s2, 2.0) == 9);
    CHECK(ball_points(s2, 2.0).size() == 9);
    for (double r : {1e2, 1e3}) CHECK(std::abs(ball_size(s2, r) / (r * r) - 1.0) <= 0.03);
  }

  TEST_CASE("shell counts and total weight") {
    CHECK(shell_count(1, 3) == 2);
    CHECK(shell_count(2, 1) == 8);
    CHECK(shell_count(3, 1) == 26);
    const KernelSpec s = line();
    const double c = 2.0 * 0.75 * std::pow(2.0, -4.0 / 3);
    // Euler-Maclaurin tail of sum_{k>n} k^{-4/3}.
    auto tail = [](double n) { return 3.0 * std::pow(n, -1.0 / 3) - 0.5 * std::pow(n, -4.0 / 3); };
    const double full = c * boost::math::zeta(4.0 / 3);
    for (double n : {1e3, 1e5, 1e7}) {
      const double partial = total_weight(s, kInfinity, static_cast<std::int64_t>(n));
      CHECK(partial == doctest::Approx(full - c * tail(n)).epsilon(1e-7));
    }
    CHECK(full == doctest::Approx(2.1434).epsilon(1e-4));
  }
}
