#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lrp {

struct Params {
  int d = 1;
  double alpha = 1.0 / 3.0;
  double beta = 0.0;
  double r = 0.0;
  std::int64_t L = 0;
};

struct Estimate {
  std::string observable;
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t n_replicas = 0;
  int n_batches = 0;
  std::uint64_t seed = 0;
  Params params;
};

// Contiguous batch ranges; sizes differ by at most one.
std::vector<std::pair<std::size_t, std::size_t>> batch_ranges(std::size_t n, int batches);

// Batch means over per-replica values (in replica-index order).
// Var(mean) = B/(B-1) * sum_k (n_k/n)^2 (b_k - m)^2.
Estimate batch_estimate(std::span<const double> values, int batches);

// Ratio-type statistic f(means of the columns) with a jackknife over batches.
Estimate jackknife_estimate(const std::vector<std::vector<double>>& columns, int batches,
                            const std::function<double(std::span<const double>)>& f);

inline constexpr int kMinBatches = 16;

}  // namespace lrp
