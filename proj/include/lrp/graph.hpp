#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lrp/kernel.hpp"

namespace lrp {

// Candidate neighbours of v are indexed j = 0..k-1 with weights w_j > 0;
// cumulative(v)[j] = w_0 + ... + w_j. The edge to candidate j is open at
// inverse temperature beta with probability 1 - exp(-beta w_j).
class Graph {
 public:
  virtual ~Graph() = default;
  virtual std::uint32_t vertex_count() const = 0;
  virtual std::span<const double> cumulative(std::uint32_t v) const = 0;
  virtual std::uint32_t neighbour(std::uint32_t v, std::uint32_t j) const = 0;
  virtual double weight(std::uint32_t v, std::uint32_t j) const = 0;
  // Kernel distance of candidate j, or NaN on graphs without geometry.
  virtual double distance(std::uint32_t v, std::uint32_t j) const = 0;
  // Weight of candidate j under a smaller cut-off r (equals weight() on graphs without geometry).
  virtual double weight_at(std::uint32_t v, std::uint32_t j, double r) const = 0;
  virtual bool has_geometry() const { return false; }
  virtual int dimension() const { return 0; }
  // Minimal-image displacement v - u; only meaningful when has_geometry().
  virtual void displacement(std::uint32_t u, std::uint32_t v, int* out) const;
  // Largest total weight at a vertex.
  double max_total_weight() const;
};

struct TorusBox {
  int d = 1;
  std::int64_t L = 64;

  std::int64_t volume() const;
  void validate(double r) const;
};

// Torus (Z/LZ)^d with minimal-image distances. For finite r the kernel is
// J_r and L >= 2 floor(r/2) + 2 is required. For r = +inf the full kernel is
// used at minimal-image distance on the whole torus.
class TorusGraph final : public Graph {
 public:
  TorusGraph(const KernelSpec& spec, double r, const TorusBox& box);

  std::uint32_t vertex_count() const override { return static_cast<std::uint32_t>(volume_); }
  std::span<const double> cumulative(std::uint32_t) const override { return cumulative_; }
  std::uint32_t neighbour(std::uint32_t v, std::uint32_t j) const override;
  double weight(std::uint32_t, std::uint32_t j) const override { return weights_[j]; }
  double distance(std::uint32_t, std::uint32_t j) const override { return distances_[j]; }
  double weight_at(std::uint32_t, std::uint32_t j, double r) const override;
  bool has_geometry() const override { return true; }
  int dimension() const override { return box_.d; }
  void displacement(std::uint32_t u, std::uint32_t v, int* out) const override;

  const KernelSpec& spec() const { return spec_; }
  const TorusBox& box() const { return box_; }
  double radius() const { return r_; }
  std::uint32_t index(std::span<const int> x) const;
  void coordinates(std::uint32_t v, int* out) const;
  std::uint32_t translate(std::uint32_t v, std::span<const int> shift) const;
  double total_weight() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  std::size_t candidate_count() const { return weights_.size(); }
  std::span<const int> candidate_offset(std::uint32_t j) const {
    return {offsets_.data() + static_cast<std::size_t>(j) * box_.d, static_cast<std::size_t>(box_.d)};
  }

 private:
  KernelSpec spec_;
  double r_;
  TorusBox box_;
  std::int64_t volume_;
  std::vector<std::int64_t> strides_;
  std::vector<int> offsets_;
  std::vector<double> weights_;
  std::vector<double> distances_;
  std::vector<double> cumulative_;
};

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double weight = 1.0;
};

// Explicit small weighted graph (used for exact enumeration).
struct SmallWeightedGraph {
  std::string name;
  int n = 0;
  std::vector<WeightedEdge> edges;
  int root = 0;
  bool transitive = false;

  void validate() const;
  double total_weight_at(int v) const;
  double max_total_weight() const;
};

class ExplicitGraph final : public Graph {
 public:
  explicit ExplicitGraph(const SmallWeightedGraph& g);

  std::uint32_t vertex_count() const override { return static_cast<std::uint32_t>(adjacency_.size()); }
  std::span<const double> cumulative(std::uint32_t v) const override { return cumulative_[v]; }
  std::uint32_t neighbour(std::uint32_t v, std::uint32_t j) const override { return adjacency_[v][j]; }
  double weight(std::uint32_t v, std::uint32_t j) const override { return weights_[v][j]; }
  double distance(std::uint32_t, std::uint32_t) const override;
  double weight_at(std::uint32_t v, std::uint32_t j, double) const override { return weights_[v][j]; }

 private:
  std::vector<std::vector<std::uint32_t>> adjacency_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<double>> cumulative_;
};

}  // namespace lrp
