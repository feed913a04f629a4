#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lrp/graph.hpp"

namespace lrp {

struct Observable {
  enum class Kind { Constant, Moment, Truncated, TruncatedSquare, Connection, Connection3 };
  Kind kind = Kind::Moment;
  int p = 1;
  std::uint64_t m = 1;
  int x = 0;
  int y = 0;

  static Observable constant() { return {Kind::Constant}; }
  static Observable moment(int p) { return {Kind::Moment, p}; }
  static Observable truncated(std::uint64_t m) { return {Kind::Truncated, 1, m}; }
  static Observable truncated_square(std::uint64_t m) { return {Kind::TruncatedSquare, 2, m}; }
  static Observable connection(int x) { return {Kind::Connection, 0, 1, x}; }
  static Observable connection3(int x, int y) { return {Kind::Connection3, 0, 1, x, y}; }
};

struct GladkovTerm {
  std::uint32_t w_mask = 0;
  double joint = 0.0;         // E[|K_o| |K_o ∩ W|]
  double intersection = 0.0;  // E|K_o ∩ W|
};

// Exact expectations for the root o unless stated otherwise.
struct ExactReport {
  double beta = 0.0;
  double mass = 0.0;
  std::vector<double> moments;                 // E|K|^p, p = 0..5
  std::vector<std::uint64_t> trunc_levels;
  std::vector<double> trunc_mean;              // E min{|K|,m}
  std::vector<double> trunc_square;            // E min{|K|,m}^2
  std::vector<double> size_at;                 // E|K_v|
  std::vector<double> second_at;               // E|K_v|^2
  std::vector<double> tau2;                    // P(o <-> v)
  std::vector<std::vector<double>> tau3;       // P(o, x, y in one cluster)
  std::vector<double> disjoint;                // E[|K_o||K_y| 1(o !<-> y)]
  std::vector<double> disjoint_sq;             // E[|K_o||K_y|^2 1(o !<-> y)]
  std::vector<double> connected_sq;            // E[|K_o|^2 1(o <-> y)]
  std::vector<double> connected_cube;          // E[|K_o|^3 1(o <-> y)]
  std::vector<double> product;                 // E[|K_o||K_y|]
  std::vector<double> product_sq;              // E[|K_o||K_y|^2]
  std::vector<double> d1;                      // E|K_o| E|K_y| - disjoint
  std::vector<double> d2;                      // E|K_o| E|K_y|^2 - disjoint_sq
  std::vector<double> chem_moments;            // E Σ_{x∈K} d_chem(o,x)^q, q = 0..3
  std::vector<GladkovTerm> gladkov;
  std::vector<double> values;                  // requested observables, in order
};

class ExactEnumerator {
 public:
  explicit ExactEnumerator(const SmallWeightedGraph& g);

  const SmallWeightedGraph& graph() const { return g_; }
  std::size_t configurations() const { return std::size_t{1} << g_.edges.size(); }

  ExactReport report(double beta, const std::vector<Observable>& observables = {},
                     const std::vector<std::uint64_t>& trunc_levels = {1, 2, 3, 4, 8, 32},
                     const std::vector<std::uint32_t>& w_masks = {}) const;

  double expectation(double beta, const Observable& f) const;
  // Russo: sum_e J_e sum_{omega_e = 0} P(omega) [f(omega ∪ e) - f(omega)].
  double derivative(double beta, const Observable& f) const;
  // Derivatives of E|K|, E|K|^2 and E min{|K|,m} for each m, in one pass.
  struct SizeDerivatives {
    double mean = 0.0;
    double second = 0.0;
    std::vector<double> truncated;
  };
  SizeDerivatives size_derivatives(double beta, const std::vector<std::uint64_t>& levels) const;

  std::uint16_t component(std::size_t omega, int v) const { return comp_[omega * n_ + v]; }
  std::uint8_t chemical(std::size_t omega, int v) const { return chem_[omega * n_ + v]; }
  void probabilities(double beta, std::vector<double>& out) const;

 private:
  double evaluate(const Observable& f, std::size_t omega) const;

  SmallWeightedGraph g_;
  int n_;
  std::vector<std::uint16_t> comp_;
  std::vector<std::uint8_t> chem_;
};

ExactReport exact_expectations(const SmallWeightedGraph& g, double beta, const std::vector<Observable>& observables);
double exact_beta_derivative(const SmallWeightedGraph& g, double beta, const Observable& f);

struct InequalityCheck {
  enum class Status { Pass, Fail, Skipped };
  std::string graph;
  std::string name;
  double beta = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  Status status = Status::Pass;
  std::string reason;
};

const char* to_string(InequalityCheck::Status s);

std::vector<InequalityCheck> inequality_suite(const SmallWeightedGraph& g, const std::vector<double>& betas,
                                              double tolerance = 1e-9);

// Instances.
SmallWeightedGraph single_edge(double w = 1.0);
SmallWeightedGraph triangle(double w = 1.0);
SmallWeightedGraph cycle_graph(int n, double w = 1.0);
SmallWeightedGraph complete_graph(int n, double w = 1.0);
// Every pair of the torus graph joined with its kernel weight; transitive.
SmallWeightedGraph torus_instance(const KernelSpec& spec, std::int64_t L, double r);
// Open-boundary segment {0..n-1} with J_r weights; not transitive.
SmallWeightedGraph box_instance(const KernelSpec& spec, int n, double r, int root);
std::vector<SmallWeightedGraph> random_instances(int count, std::uint64_t seed);
std::vector<SmallWeightedGraph> builtin_instances();

long long double_factorial(int n);

}  // namespace lrp
