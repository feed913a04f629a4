#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace lrp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct KernelSpec {
  int d = 1;
  double alpha = 1.0 / 3.0;
  double beta = 0.0;
  double norm_scale = 2.0;

  double exponent() const { return d + alpha; }
  void validate() const;
};

// Scaled sup norm 2*max|x_i|; the unit ball [-1/2,1/2]^d has volume one.
double norm(std::span<const int> x);

// Full kernel J(t) = t^{-s}/s with s = d + alpha.
double full_kernel(const KernelSpec& spec, double dist);

// J_r(t) = (t^{-s} - r^{-s})/s for t <= r, zero otherwise. r may be +inf.
double cutoff_kernel(const KernelSpec& spec, double dist, double r);

double edge_probability(const KernelSpec& spec, double dist, double r, double beta);

// Least r with edge_probability(dist, r, beta) >= u, or +inf.
double activation_radius(const KernelSpec& spec, double dist, double beta, double u);

// Same, parametrised by the exponential level t = -log(1-u)/beta.
double activation_radius_from_level(const KernelSpec& spec, double dist, double t);

// Lattice half-width floor(r/2); r = +inf is not allowed.
std::int64_t lattice_radius(double r);

std::int64_t ball_size(const KernelSpec& spec, double r);
std::vector<std::vector<int>> ball_points(const KernelSpec& spec, double r);

// Number of lattice points at norm exactly 2k.
std::int64_t shell_count(int d, std::int64_t k);

// Sum over x != 0 of J(0,x), truncated after max_shell shells.
double total_weight(const KernelSpec& spec, double r, std::int64_t max_shell);

}  // namespace lrp
