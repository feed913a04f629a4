#include "lrp/estimate.hpp"

#include <cmath>
#include <stdexcept>

namespace lrp {

std::vector<std::pair<std::size_t, std::size_t>> batch_ranges(std::size_t n, int batches) {
  if (batches < 1) throw std::invalid_argument("batches must be positive");
  if (n < static_cast<std::size_t>(batches))
    throw std::invalid_argument("need at least one replica per batch (" + std::to_string(n) + " replicas, " +
                                std::to_string(batches) + " batches)");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (int b = 0; b < batches; ++b) out.emplace_back(n * b / batches, n * (b + 1) / batches);
  return out;
}

Estimate batch_estimate(std::span<const double> values, int batches) {
  const auto ranges = batch_ranges(values.size(), batches);
  const double n = static_cast<double>(values.size());
  long double total = 0.0;
  std::vector<double> means;
  for (const auto& [lo, hi] : ranges) {
    long double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += values[i];
    total += s;
    means.push_back(static_cast<double>(s / static_cast<long double>(hi - lo)));
  }
  Estimate e;
  e.value = static_cast<double>(total / n);
  double var = 0.0;
  for (std::size_t k = 0; k < ranges.size(); ++k) {
    const double w = (ranges[k].second - ranges[k].first) / n;
    var += w * w * (means[k] - e.value) * (means[k] - e.value);
  }
  var *= static_cast<double>(batches) / (batches - 1);
  bool identical = true;
  for (double m : means) identical = identical && m == means.front();
  e.stderr_ = identical ? 0.0 : std::sqrt(var);
  e.n_replicas = values.size();
  e.n_batches = batches;
  return e;
}

Estimate jackknife_estimate(const std::vector<std::vector<double>>& columns, int batches,
                            const std::function<double(std::span<const double>)>& f) {
  if (columns.empty()) throw std::invalid_argument("jackknife: no columns");
  const std::size_t n = columns.front().size();
  const auto ranges = batch_ranges(n, batches);
  const std::size_t c = columns.size();
  std::vector<long double> total(c, 0.0);
  std::vector<std::vector<long double>> sums(ranges.size(), std::vector<long double>(c, 0.0));
  for (std::size_t k = 0; k < ranges.size(); ++k)
    for (std::size_t j = 0; j < c; ++j) {
      for (std::size_t i = ranges[k].first; i < ranges[k].second; ++i) sums[k][j] += columns[j][i];
      total[j] += sums[k][j];
    }
  std::vector<double> means(c);
  for (std::size_t j = 0; j < c; ++j) means[j] = static_cast<double>(total[j] / n);
  Estimate e;
  e.value = f(means);
  std::vector<double> loo(ranges.size());
  double avg = 0.0;
  for (std::size_t k = 0; k < ranges.size(); ++k) {
    const double m = static_cast<double>(n - (ranges[k].second - ranges[k].first));
    std::vector<double> partial(c);
    for (std::size_t j = 0; j < c; ++j) partial[j] = static_cast<double>((total[j] - sums[k][j]) / m);
    loo[k] = f(partial);
    avg += loo[k] / ranges.size();
  }
  double var = 0.0;
  for (double v : loo) var += (v - avg) * (v - avg);
  var *= static_cast<double>(batches - 1) / batches;
  e.stderr_ = std::sqrt(var);
  e.n_replicas = n;
  e.n_batches = batches;
  return e;
}

}  // namespace lrp
