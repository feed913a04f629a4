#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace lrp {

// Union by size with path halving.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0) { reset(n); }

  void reset(std::size_t n) {
    parent_.resize(n);
    size_.assign(n, 1);
    std::iota(parent_.begin(), parent_.end(), 0u);
    components_ = n;
    largest_ = n > 0 ? 1 : 0;
  }

  std::uint32_t find(std::uint32_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    if (size_[a] > largest_) largest_ = size_[a];
    --components_;
    return true;
  }

  std::uint32_t component_size(std::uint32_t v) { return size_[find(v)]; }
  std::size_t components() const { return components_; }
  std::uint32_t largest() const { return largest_; }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::size_t components_ = 0;
  std::uint32_t largest_ = 0;
};

}  // namespace lrp
