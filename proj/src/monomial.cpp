#include "lrp/monomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lrp {

double Monomial::evaluate(std::span<const double> x) const {
  double v = 1.0;
  for (const auto& u : factors) {
    double dot = 0.0;
    for (int i = 0; i < d; ++i) dot += u[i] * x[i];
    v *= dot;
  }
  return v;
}

void Monomial::validate() const {
  if (d < 1) throw std::invalid_argument("monomial: dimension must be positive");
  for (const auto& u : factors) {
    if (static_cast<int>(u.size()) != d) throw std::invalid_argument("monomial: direction has wrong dimension");
    double n2 = 0.0;
    for (double c : u) n2 += c * c;
    if (std::abs(n2 - 1.0) > 1e-12) throw std::invalid_argument("monomial: directions must be unit vectors");
  }
}

Monomial Monomial::constant(int d) { return Monomial{d, {}}; }

Monomial Monomial::axis_power(int d, int axis, int power) {
  Monomial m{d, {}};
  std::vector<double> u(d, 0.0);
  u[axis] = 1.0;
  for (int i = 0; i < power; ++i) m.factors.push_back(u);
  return m;
}

int total_degree(const MultiIndex& k) { return k[0] + k[1] + k[2]; }

Polynomial expand(const Monomial& p) {
  if (p.d > kMaxAnalyticDim) throw std::invalid_argument("polynomial expansion supports d <= 3");
  Polynomial poly{{MultiIndex{0, 0, 0}, 1.0}};
  for (const auto& u : p.factors) {
    Polynomial lin;
    for (int i = 0; i < p.d; ++i) {
      if (u[i] == 0.0) continue;
      MultiIndex k{0, 0, 0};
      k[i] = 1;
      lin[k] = u[i];
    }
    poly = multiply(poly, lin);
  }
  return poly;
}

Polynomial multiply(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) {
      MultiIndex k{ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2]};
      out[k] += ca * cb;
    }
  return out;
}

double evaluate(const Polynomial& p, std::span<const double> x) {
  double s = 0.0;
  for (const auto& [k, c] : p) {
    double term = c;
    for (std::size_t i = 0; i < x.size() && i < 3; ++i) term *= std::pow(x[i], k[i]);
    s += term;
  }
  return s;
}

void prune(Polynomial& p, double tol) {
  double biggest = 0.0;
  for (const auto& [k, c] : p) biggest = std::max(biggest, std::abs(c));
  for (auto it = p.begin(); it != p.end();) {
    if (std::abs(it->second) <= tol * biggest) it = p.erase(it);
    else ++it;
  }
}

namespace {

bool same_function(const Polynomial& a, const Polynomial& b) {
  double scale = 1.0;
  for (const auto& [k, c] : a) scale = std::max(scale, std::abs(c));
  for (const auto& [k, c] : b) scale = std::max(scale, std::abs(c));
  auto get = [](const Polynomial& p, const MultiIndex& k) {
    auto it = p.find(k);
    return it == p.end() ? 0.0 : it->second;
  };
  for (const auto& [k, c] : a)
    if (std::abs(c - get(b, k)) > 1e-12 * scale) return false;
  for (const auto& [k, c] : b)
    if (std::abs(c - get(a, k)) > 1e-12 * scale) return false;
  return true;
}

}  // namespace

std::vector<Divisor> monomial_divisors(const Monomial& p) {
  p.validate();
  const int n = p.degree();
  if (n > 16) throw std::invalid_argument("monomial: degree too large for divisor enumeration");
  std::vector<Divisor> out;
  std::vector<std::pair<Polynomial, Polynomial>> keys;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Monomial q{p.d, {}}, rest{p.d, {}};
    for (int i = 0; i < n; ++i) ((mask >> i) & 1 ? q : rest).factors.push_back(p.factors[i]);
    Polynomial eq = expand(q), er = expand(rest);
    prune(eq);
    prune(er);
    bool merged = false;
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (same_function(keys[k].first, eq) && same_function(keys[k].second, er)) {
        ++out[k].multiplicity;
        merged = true;
        break;
      }
    }
    if (!merged) {
      out.push_back({q, rest, 1});
      keys.emplace_back(std::move(eq), std::move(er));
    }
  }
  return out;
}

}  // namespace lrp
