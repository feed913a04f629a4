#include "lrp/kernel.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace lrp {

void KernelSpec::validate() const {
  if (d < 1) throw std::invalid_argument("kernel: dimension must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("kernel: alpha must be positive");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("kernel: beta must be nonnegative");
  if (norm_scale != 2.0) throw std::invalid_argument("kernel: norm_scale is fixed to 2");
}

double norm(std::span<const int> x) {
  int m = 0;
  for (int xi : x) m = std::max(m, std::abs(xi));
  return 2.0 * m;
}

double full_kernel(const KernelSpec& spec, double dist) {
  if (!std::isfinite(dist) || !(dist > 0.0)) throw std::invalid_argument("kernel: distance must be positive and finite");
  const double s = spec.exponent();
  return std::pow(dist, -s) / s;
}

double cutoff_kernel(const KernelSpec& spec, double dist, double r) {
  if (!std::isfinite(dist) || std::isnan(r)) throw std::invalid_argument("kernel: non-finite input");
  if (!(dist > 0.0) || !(r > 0.0)) throw std::invalid_argument("kernel: distance and radius must be positive");
  if (dist >= r) return 0.0;
  const double s = spec.exponent();
  if (std::isinf(r)) return std::pow(dist, -s) / s;
  return (std::pow(dist, -s) - std::pow(r, -s)) / s;
}

double edge_probability(const KernelSpec& spec, double dist, double r, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("kernel: beta must be nonnegative");
  if (beta == 0.0) return 0.0;
  return -std::expm1(-beta * cutoff_kernel(spec, dist, r));
}

double activation_radius_from_level(const KernelSpec& spec, double dist, double t) {
  const double s = spec.exponent();
  const double rest = std::pow(dist, -s) - s * t;
  if (!(rest > 0.0)) return kInfinity;
  return std::pow(rest, -1.0 / s);
}

double activation_radius(const KernelSpec& spec, double dist, double beta, double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("kernel: u must lie in (0,1)");
  if (!(beta > 0.0)) throw std::invalid_argument("kernel: beta must be positive");
  if (!(dist > 0.0) || !std::isfinite(dist)) throw std::invalid_argument("kernel: distance must be positive");
  return activation_radius_from_level(spec, dist, -std::log1p(-u) / beta);
}

std::int64_t lattice_radius(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("kernel: radius must be finite and nonnegative");
  return static_cast<std::int64_t>(std::floor(r / 2.0));
}

std::int64_t ball_size(const KernelSpec& spec, double r) {
  const std::int64_t side = 2 * lattice_radius(r) + 1;
  std::int64_t n = 1;
  for (int i = 0; i < spec.d; ++i) n *= side;
  return n;
}

std::vector<std::vector<int>> ball_points(const KernelSpec& spec, double r) {
  const int rho = static_cast<int>(lattice_radius(r));
  std::vector<std::vector<int>> points;
  std::vector<int> x(spec.d, -rho);
  while (true) {
    points.push_back(x);
    int i = spec.d - 1;
    while (i >= 0 && x[i] == rho) x[i--] = -rho;
    if (i < 0) break;
    ++x[i];
  }
  return points;
}

std::int64_t shell_count(int d, std::int64_t k) {
  if (k == 0) return 1;
  std::int64_t outer = 1, inner = 1;
  for (int i = 0; i < d; ++i) {
    outer *= 2 * k + 1;
    inner *= 2 * k - 1;
  }
  return outer - inner;
}

double total_weight(const KernelSpec& spec, double r, std::int64_t max_shell) {
  double sum = 0.0;
  for (std::int64_t k = 1; k <= max_shell; ++k) {
    if (2.0 * k >= r) break;
    sum += static_cast<double>(shell_count(spec.d, k)) * cutoff_kernel(spec, 2.0 * k, r);
  }
  return sum;
}

}  // namespace lrp
