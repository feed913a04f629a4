#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lrp/monomial.hpp"
#include "lrp/rng.hpp"

namespace lrp {

// Moments ∫ x^k dμ indexed by multi-degree k (|k| <= max_degree); odd entries are 0.
struct MomentTable {
  int d = 1;
  int max_degree = 0;
  std::map<MultiIndex, double> values;
  double at(const MultiIndex& k) const;
  double of(const Monomial& p) const;
  double of(const Polynomial& p) const;
};

inline constexpr int kMaxMomentDegree = 8;

// Moments of Π_1 with density α/(d+α) (‖x‖^{-d-α} - 1) on [-1/2,1/2]^d (even degrees >= 2).
MomentTable levy_moments(int d, double alpha, int max_degree);
// Moments of Π_1 restricted to ‖x‖ < eps.
double levy_truncated_moment(int d, double alpha, const MultiIndex& k, double eps);
// Π_1({‖x‖ >= eps}).
double levy_intensity(int d, double alpha, double eps);

// Moments of κ^{*n} from the series (1 - Λ(θ))^{-n}, Λ(θ) = Σ m(k) θ^k / k!.
MomentTable kappa_moments(int d, double alpha, int max_degree, int n = 1);

double ball_moment(const Monomial& q);
double conv_ball_moment(int n, const Monomial& p, double alpha);
double recurrence_residual(int n, const Monomial& p, double alpha);

// d = 1: ψ(ξ) = ∫ (1 - cos ξx) dΠ_1(x) and κ̂ = 1/(1+ψ).
double psi(double alpha, double xi);
inline double kappa_transform(double alpha, double xi) { return 1.0 / (1.0 + psi(alpha, xi)); }

class KappaSampler {
 public:
  KappaSampler(int d, double alpha, double eps);
  // X_T with T ~ Gamma(n, 1); jumps below eps are dropped.
  void sample(Rng& rng, int n, double* out) const;
  double intensity() const { return lambda_; }
  int dimension() const { return d_; }

 private:
  int d_;
  double alpha_;
  double eps_;
  double lambda_;
};

struct LocalizedIntegralOptions {
  std::uint64_t mc_samples = 1000000;
  double eps = 1e-3;
  std::uint64_t seed = 1;
  int workers = 1;
  double gate = 0.01;
  int half_periods = 4000;
};

struct LocalizedIntegral {
  int n = 0;
  double value = 0.0;      // transform route
  double transform = 0.0;
  double monte_carlo = 0.0;
  double mc_stderr = 0.0;
  double relative_gap = 0.0;
  bool conditional = false;  // n α <= d: κ^{*n} has a non-integrable transform
};

double localized_ball_transform(int n, double alpha, int half_periods = 4000);
// Monte Carlo estimate of P(X ∈ region) for X ~ κ^{*n}; region "ball" or "all".
std::pair<double, double> localized_ball_monte_carlo(int d, int n, double alpha, const LocalizedIntegralOptions& opt,
                                                     bool whole_space = false);
// ∫_B κ^{*n}, n ∈ {3,4,5}, d = 1, both routes; throws if they disagree beyond the gate.
LocalizedIntegral localized_ball_integral(int d, double alpha, int n, const LocalizedIntegralOptions& opt = {});

// Trees with leaves 0..n (n+1 leaves) and degree-3 internal vertices n+1..2n-1.
struct DiagramTree {
  int n = 1;
  std::vector<std::pair<int, int>> edges;
  std::string canonical() const;
};
std::vector<DiagramTree> enumerate_trees(int n);

// Σ_T E Π_i P_i(X_i), X_i the sum of independent κ steps on the path from leaf 0 to leaf i.
double diagram_moment(const std::vector<Monomial>& p, double alpha);

struct UniversalConstants {
  double ball_integral = 0.0;  // ∫_B κ^{*4}
  double C = 0.0;
  double A_amplitude = 0.0;
  double volume_prefactor = 0.0;
};
UniversalConstants universal_constants(double alpha, double beta_c, double ball_integral);

struct OdePoint {
  double r = 0.0;
  double f = 0.0;
};
struct OdeOptions {
  double rtol = 1e-11;
  double atol = 1e-13;
  int record_per_decade = 4;
};
// f' = (a/r)(1 - C(r) (r^{-a} f)^γ + δ(r)) f from r = 1, integrated in (log r, log f).
std::vector<OdePoint> ode_solve(double a, double gamma, const std::function<double(double)>& c_of_r,
                                const std::function<double(double)>& delta_of_r, double f_at_1, double r_max,
                                const OdeOptions& options = {});
double ode_exact(double a, double gamma, double c, double f_at_1, double r);

}  // namespace lrp
