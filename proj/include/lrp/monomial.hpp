#pragma once

#include <array>
#include <map>
#include <span>
#include <vector>

namespace lrp {

// P(x) = prod_i <x, u_i> with unit vectors u_i in R^d; no factors means P = 1.
struct Monomial {
  int d = 1;
  std::vector<std::vector<double>> factors;

  int degree() const { return static_cast<int>(factors.size()); }
  double evaluate(std::span<const double> x) const;
  void validate() const;

  static Monomial constant(int d);
  static Monomial axis_power(int d, int axis, int power);
};

inline constexpr int kMaxAnalyticDim = 3;
using MultiIndex = std::array<int, kMaxAnalyticDim>;

int total_degree(const MultiIndex& k);

// Sparse polynomial in coordinates (d <= 3).
using Polynomial = std::map<MultiIndex, double>;

Polynomial expand(const Monomial& p);
Polynomial multiply(const Polynomial& a, const Polynomial& b);
double evaluate(const Polynomial& p, std::span<const double> x);
// Drops coefficients below tol * max |coefficient|.
void prune(Polynomial& p, double tol = 1e-14);

// Divisors Q | P indexed by subsets of the factors, merged when Q and P/Q
// coincide as functions; multiplicities N(Q|P).
struct Divisor {
  Monomial q;
  Monomial quotient;
  int multiplicity = 1;
};
std::vector<Divisor> monomial_divisors(const Monomial& p);

}  // namespace lrp
