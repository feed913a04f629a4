#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lrp/analytics.hpp"
#include "lrp/parallel.hpp"

namespace lrp {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 2.0)) throw std::invalid_argument("analytics: alpha must lie in (0, 2)");
}

void check_dim(int d) {
  if (d < 1 || d > kMaxAnalyticDim) throw std::invalid_argument("analytics: d must be 1, 2 or 3");
}

bool all_even(const MultiIndex& k) { return k[0] % 2 == 0 && k[1] % 2 == 0 && k[2] % 2 == 0; }

// ∫_{[-t/2,t/2]^d} x^k dx / t^{|k|+d}.
double cube_coefficient(int d, const MultiIndex& k) {
  double c = 1.0;
  for (int j = 0; j < d; ++j) {
    if (k[j] % 2) return 0.0;
    c *= std::pow(0.5, k[j]) / (k[j] + 1);
  }
  return c;
}

template <class F>
void for_each_index(int d, int max_degree, F&& f) {
  MultiIndex k{0, 0, 0};
  for (k[0] = 0; k[0] <= max_degree; ++k[0])
    for (k[1] = 0; k[1] <= (d > 1 ? max_degree - k[0] : 0); ++k[1])
      for (k[2] = 0; k[2] <= (d > 2 ? max_degree - k[0] - k[1] : 0); ++k[2]) f(k);
}

double multi_factorial(const MultiIndex& k) {
  return boost::math::factorial<double>(k[0]) * boost::math::factorial<double>(k[1]) *
         boost::math::factorial<double>(k[2]);
}

using Series = std::map<MultiIndex, double>;

Series truncated_product(const Series& a, const Series& b, int max_degree) {
  Series out;
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) {
      MultiIndex k{ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2]};
      if (total_degree(k) <= max_degree) out[k] += ca * cb;
    }
  return out;
}

}  // namespace

double MomentTable::at(const MultiIndex& k) const {
  if (total_degree(k) > max_degree)
    throw std::out_of_range("moment table: degree " + std::to_string(total_degree(k)) + " beyond table maximum " +
                            std::to_string(max_degree));
  auto it = values.find(k);
  return it == values.end() ? 0.0 : it->second;
}

double MomentTable::of(const Polynomial& p) const {
  double s = 0.0;
  for (const auto& [k, c] : p) s += c * at(k);
  return s;
}

double MomentTable::of(const Monomial& p) const { return of(expand(p)); }

MomentTable levy_moments(int d, double alpha, int max_degree) {
  check_dim(d);
  check_alpha(alpha);
  if (max_degree < 0 || max_degree > 2 * kMaxMomentDegree) throw std::invalid_argument("levy moments: bad degree");
  MomentTable t;
  t.d = d;
  t.max_degree = max_degree;
  for_each_index(d, max_degree, [&](const MultiIndex& k) {
    const int deg = total_degree(k);
    if (deg == 0 || !all_even(k)) return;
    if (!(deg > alpha)) throw std::invalid_argument("levy moments: degree <= alpha diverges");
    // ∫ x^k f(‖x‖) dx = c(k) (|k|+d) ∫_0^1 f(t) t^{|k|+d-1} dt.
    t.values[k] = alpha * cube_coefficient(d, k) / (deg - alpha);
  });
  return t;
}

double levy_truncated_moment(int d, double alpha, const MultiIndex& k, double eps) {
  check_dim(d);
  check_alpha(alpha);
  const int deg = total_degree(k);
  if (!all_even(k)) return 0.0;
  eps = std::min(eps, 1.0);
  if (deg == 0) throw std::invalid_argument("levy truncated moment: degree 0 diverges");
  return cube_coefficient(d, k) * (deg + d) * alpha / (d + alpha) *
         (std::pow(eps, deg - alpha) / (deg - alpha) - std::pow(eps, deg + d) / (deg + d));
}

double levy_intensity(int d, double alpha, double eps) {
  check_dim(d);
  check_alpha(alpha);
  if (!(eps > 0.0)) throw std::invalid_argument("levy intensity: eps must be positive");
  if (eps >= 1.0) return 0.0;
  return d / (d + alpha) * (std::pow(eps, -alpha) - 1.0) - alpha / (d + alpha) * (1.0 - std::pow(eps, d));
}

MomentTable kappa_moments(int d, double alpha, int max_degree, int n) {
  if (max_degree < 0 || max_degree > kMaxMomentDegree)
    throw std::invalid_argument("kappa moments: degree must be in 0..8");
  if (n < 1) throw std::invalid_argument("kappa moments: n must be positive");
  const MomentTable levy = levy_moments(d, alpha, max_degree);
  Series lambda;
  for (const auto& [k, m] : levy.values) lambda[k] = m / multi_factorial(k);
  // (1 - Λ)^{-n} = Σ_j C(n+j-1, j) Λ^j; Λ starts at degree 2.
  Series total{{MultiIndex{0, 0, 0}, 1.0}};
  Series power{{MultiIndex{0, 0, 0}, 1.0}};
  for (int j = 1; 2 * j <= max_degree; ++j) {
    power = truncated_product(power, lambda, max_degree);
    const double c = boost::math::binomial_coefficient<double>(n + j - 1, j);
    for (const auto& [k, v] : power) total[k] += c * v;
  }
  MomentTable t;
  t.d = d;
  t.max_degree = max_degree;
  for (const auto& [k, v] : total) t.values[k] = v * multi_factorial(k);
  return t;
}

double ball_moment(const Monomial& q) {
  q.validate();
  double s = 0.0;
  for (const auto& [k, c] : expand(q)) s += c * cube_coefficient(q.d, k);
  return s;
}

double conv_ball_moment(int n, const Monomial& p, double alpha) {
  const MomentTable t = kappa_moments(p.d, alpha, std::max(p.degree(), 0), n);
  double s = 0.0;
  for (const auto& div : monomial_divisors(p)) s += div.multiplicity * t.of(div.quotient) * ball_moment(div.q);
  return s;
}

double recurrence_residual(int n, const Monomial& p, double alpha) {
  if (n < 1) throw std::invalid_argument("recurrence: n must be positive");
  check_alpha(alpha);
  const double lhs = (p.degree() + alpha * n) * kappa_moments(p.d, alpha, p.degree(), n).of(p);
  return lhs - alpha * n * conv_ball_moment(n + 1, p, alpha);
}

namespace {

// ∫_a^∞ e^{iw} w^{-mu} dw = i e^{ia} a^{-mu} Σ_k (-i)^k (mu)_k a^{-k}, for large a.
std::complex<double> oscillatory_tail(double mu, double a) {
  const std::complex<double> I(0.0, 1.0);
  std::complex<double> sum = 0.0, term = 1.0;
  double last = 1e300;
  for (int k = 0; k < 200; ++k) {
    const double mag = std::abs(term);
    if (mag > last) break;
    sum += term;
    if (mag < 1e-18 * std::abs(sum)) break;
    last = mag;
    term *= -I * (mu + k) / a;
  }
  return I * std::exp(I * a) * std::pow(a, -mu) * sum;
}

constexpr double kSeriesLimit = 5.0;
constexpr double kTailLimit = 40.0;

// G(a) = ∫_0^a (1 - cos w) w^{-1-α} dw.
double g_small(double alpha, double a) {
  double s = 0.0, pw = a * a, fact = 2.0;
  for (int k = 1; k < 60; ++k) {
    const double term = pw / (fact * (2 * k - alpha));
    s += (k % 2 ? term : -term);
    if (term < 1e-18 * std::abs(s)) break;
    pw *= a * a;
    fact *= (2.0 * k + 1) * (2.0 * k + 2);
  }
  return s * std::pow(a, -alpha);
}

double g_infinity(double alpha) {
  return std::numbers::pi / (2.0 * std::tgamma(1.0 + alpha) * std::sin(std::numbers::pi * alpha / 2.0));
}

double g_function(double alpha, double a) {
  if (a <= kSeriesLimit) return g_small(alpha, a);
  if (a >= kTailLimit) {
    const double mu = 1.0 + alpha;
    const double tail = std::pow(a, -alpha) / alpha - oscillatory_tail(mu, a).real();
    return g_infinity(alpha) - tail;
  }
  auto f = [alpha](double w) {
    const double s = std::sin(w / 2);
    return 2.0 * s * s * std::pow(w, -1.0 - alpha);
  };
  return g_small(alpha, kSeriesLimit) +
         boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, kSeriesLimit, a, 10, 1e-15);
}

}  // namespace

double psi(double alpha, double xi) {
  check_alpha(alpha);
  xi = std::abs(xi);
  if (xi == 0.0) return 0.0;
  const double pref = 2.0 * alpha / (1.0 + alpha);
  const double a = xi / 2.0;
  const double singular = pref * std::pow(2.0, -1.0 - alpha) * std::pow(xi, alpha) * g_function(alpha, a);
  // ∫_0^{1/2} (1 - cos ξx) dx = 1/2 - sin(ξ/2)/ξ, computed without cancellation for small ξ.
  double flat;
  if (xi < 1e-2) {
    const double x2 = a * a;
    flat = 0.5 * (x2 / 6.0 - x2 * x2 / 120.0 + x2 * x2 * x2 / 5040.0);
  } else {
    flat = 0.5 - std::sin(a) / xi;
  }
  return singular - pref * flat;
}

KappaSampler::KappaSampler(int d, double alpha, double eps) : d_(d), alpha_(alpha), eps_(eps) {
  check_dim(d);
  check_alpha(alpha);
  if (!(eps > 0.0)) throw std::invalid_argument("kappa sampler: eps must be positive");
  lambda_ = levy_intensity(d, alpha, eps);
}

void KappaSampler::sample(Rng& rng, int n, double* out) const {
  for (int i = 0; i < d_; ++i) out[i] = 0.0;
  if (lambda_ <= 0.0) return;
  std::gamma_distribution<double> time(n, 1.0);
  std::poisson_distribution<long> count(time(rng) * lambda_);
  const long jumps = count(rng);
  const double lo = std::pow(eps_, -alpha_);
  for (long j = 0; j < jumps; ++j) {
    // Radius density ∝ t^{-α-1} - t^{d-1} on [eps, 1]: invert t^{-α-1}, then thin by 1 - t^{d+α}.
    double t;
    do {
      const double u = rng.uniform();
      t = std::pow(lo - u * (lo - 1.0), -1.0 / alpha_);
    } while (rng.uniform() > 1.0 - std::pow(t, d_ + alpha_));
    // Uniform point on the surface of the cube of side t.
    const int face = static_cast<int>(rng.below(2 * d_));
    for (int i = 0; i < d_; ++i) {
      const double c = i == face / 2 ? (face % 2 ? 0.5 * t : -0.5 * t) : (rng.uniform() - 0.5) * t;
      out[i] += c;
    }
  }
}

double localized_ball_transform(int n, double alpha, int half_periods) {
  check_alpha(alpha);
  if (n < 1) throw std::invalid_argument("localized integral: n must be positive");
  if (half_periods < 10) throw std::invalid_argument("localized integral: too few half periods");
  // ∫_B κ^{*n} = (2/π) ∫_0^∞ (1 + ψ(2u))^{-n} sin(u)/u du.
  auto f = [&](double u) {
    const double s = u < 1e-8 ? 1.0 : std::sin(u) / u;
    return std::pow(1.0 + psi(alpha, 2.0 * u), -n) * s;
  };
  using GL = boost::math::quadrature::gauss<double, 30>;
  long double sum = 0.0;
  for (int k = 0; k < half_periods; ++k) {
    const double lo = k * std::numbers::pi, hi = (k + 1) * std::numbers::pi;
    sum += k < 24 ? boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 8, 1e-15)
                  : GL::integrate(f, lo, hi);
  }
  // Tail: 1 + ψ(2u) ≈ c u^α, c = (2α/(1+α)) 2^{-1} G(∞).
  const double U = half_periods * std::numbers::pi;
  const double c = alpha / (1.0 + alpha) * g_infinity(alpha);
  const double mu = 1.0 + n * alpha;
  sum += std::pow(c, -n) * oscillatory_tail(mu, U).imag();
  return static_cast<double>(2.0 / std::numbers::pi * sum);
}

std::pair<double, double> localized_ball_monte_carlo(int d, int n, double alpha, const LocalizedIntegralOptions& opt,
                                                     bool whole_space) {
  const KappaSampler sampler(d, alpha, opt.eps);
  const std::uint64_t N = opt.mc_samples;
  if (N < 2) throw std::invalid_argument("localized integral: need at least two samples");
  std::vector<std::uint8_t> hit(N);
  parallel_for(
      N, opt.workers,
      [&](std::size_t i, int) {
        Rng rng = Rng::keyed(opt.seed, (static_cast<std::uint64_t>(StreamTag::Kappa) << 16) | n, i, 0);
        double x[kMaxAnalyticDim];
        sampler.sample(rng, n, x);
        bool in = true;
        for (int j = 0; j < d && !whole_space; ++j) in = in && std::abs(x[j]) <= 0.5;
        hit[i] = in;
      },
      4096);
  double count = 0.0;
  for (auto h : hit) count += h;
  const double p = count / N;
  return {p, std::sqrt(std::max(p * (1 - p), 0.0) / (N - 1))};
}

LocalizedIntegral localized_ball_integral(int d, double alpha, int n, const LocalizedIntegralOptions& opt) {
  check_alpha(alpha);
  if (alpha > 1.99) throw std::invalid_argument("localized integral: alpha -> 2 limit not supported");
  if (d != 1) throw std::invalid_argument("localized integral: the transform route is implemented for d = 1 only");
  if (n < 3 || n > 5) throw std::invalid_argument("localized integral: n must be 3, 4 or 5");
  LocalizedIntegral out;
  out.n = n;
  out.conditional = n * alpha <= d;
  out.transform = localized_ball_transform(n, alpha, opt.half_periods);
  std::tie(out.monte_carlo, out.mc_stderr) = localized_ball_monte_carlo(d, n, alpha, opt);
  out.value = out.transform;
  out.relative_gap = std::abs(out.transform - out.monte_carlo) / std::abs(out.transform);
  if (!(out.relative_gap <= opt.gate)) {
    std::ostringstream msg;
    msg << "localized integral n=" << n << ": transform " << out.transform << " and Monte Carlo " << out.monte_carlo
        << " (stderr " << out.mc_stderr << ") differ by " << 100 * out.relative_gap << "%";
    throw std::runtime_error(msg.str());
  }
  return out;
}

UniversalConstants universal_constants(double alpha, double beta_c, double ball_integral) {
  if (!(alpha > 0.0) || !(beta_c > 0.0) || !(ball_integral > 0.0))
    throw std::invalid_argument("universal constants: inputs must be positive");
  UniversalConstants u;
  u.ball_integral = ball_integral;
  u.C = 2.0 * ball_integral;
  u.A_amplitude = 1.0 / std::sqrt(12.0 * beta_c * ball_integral);
  u.volume_prefactor = alpha / beta_c * std::sqrt(2.0 / std::numbers::pi) *
                       std::pow(6.0 * beta_c / alpha * ball_integral, 0.25);
  return u;
}

}  // namespace lrp
