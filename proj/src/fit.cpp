#include "lrp/fit.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lrp {

namespace {

// Weighted straight-line fit v = a + b u. With all weights equal to one the
// parameter errors come from the residual scatter.
FitResult line_fit(const std::vector<double>& u, const std::vector<double>& v, const std::vector<double>& w,
                   bool weighted) {
  double S = 0, Su = 0, Sv = 0, Suu = 0, Suv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    S += w[i];
    Su += w[i] * u[i];
    Sv += w[i] * v[i];
    Suu += w[i] * u[i] * u[i];
    Suv += w[i] * u[i] * v[i];
  }
  const double det = S * Suu - Su * Su;
  if (!(std::abs(det) > 0.0)) throw std::invalid_argument("fit: degenerate abscissae");
  const double b = (S * Suv - Su * Sv) / det;
  const double a = (Suu * Sv - Su * Suv) / det;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) chi2 += w[i] * (v[i] - a - b * u[i]) * (v[i] - a - b * u[i]);
  const int dof = static_cast<int>(u.size()) - 2;
  const double scale = weighted ? 1.0 : (dof > 0 ? chi2 / dof : 0.0);
  FitResult r;
  r.exponent = b;
  r.amplitude = std::exp(a);
  r.exponent_stderr = std::sqrt(scale * S / det);
  r.amplitude_stderr = r.amplitude * std::sqrt(scale * Suu / det);
  r.chi2 = chi2;
  r.dof = dof;
  return r;
}

void check_points(const std::vector<FitPoint>& points) {
  if (points.size() < 4) throw std::invalid_argument("fit: need at least 4 points, got " + std::to_string(points.size()));
  for (const auto& p : points) {
    if (!(p.x > 0.0) || !(p.y > 0.0) || !std::isfinite(p.x) || !std::isfinite(p.y))
      throw std::invalid_argument("fit: x and y must be positive and finite");
    if (!(p.sigma >= 0.0)) throw std::invalid_argument("fit: negative sigma");
  }
}

bool all_weighted(const std::vector<FitPoint>& points) {
  for (const auto& p : points)
    if (!(p.sigma > 0.0)) return false;
  return true;
}

}  // namespace

FitResult fit_power_law(const std::vector<FitPoint>& points) {
  check_points(points);
  const bool weighted = all_weighted(points);
  std::vector<double> u, v, w;
  for (const auto& p : points) {
    u.push_back(std::log(p.x));
    v.push_back(std::log(p.y));
    w.push_back(weighted ? std::pow(p.y / p.sigma, 2) : 1.0);
  }
  return line_fit(u, v, w, weighted);
}

FitResult fit_log_correction(const std::vector<FitPoint>& points, double fixed_exponent) {
  check_points(points);
  for (const auto& p : points)
    if (!(p.x > 1.0)) throw std::invalid_argument("fit: log-correction fit requires x > 1");
  const bool weighted = all_weighted(points);
  std::vector<double> u, v, w;
  for (const auto& p : points) {
    u.push_back(std::log(std::log(p.x)));
    v.push_back(std::log(p.y) - fixed_exponent * std::log(p.x));
    w.push_back(weighted ? std::pow(p.y / p.sigma, 2) : 1.0);
  }
  return line_fit(u, v, w, weighted);
}

}  // namespace lrp
