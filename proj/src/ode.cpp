#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lrp/analytics.hpp"

namespace lrp {

double ode_exact(double a, double gamma, double c, double f_at_1, double r) {
  if (!(a > 0.0) || !(gamma > 0.0) || !(c > 0.0) || !(f_at_1 > 0.0) || !(r >= 1.0))
    throw std::invalid_argument("ode_exact: need a, gamma, C, f(1) > 0 and r >= 1");
  return std::pow(r, a) * std::pow(std::pow(f_at_1, -gamma) + a * gamma * c * std::log(r), -1.0 / gamma);
}

std::vector<OdePoint> ode_solve(double a, double gamma, const std::function<double(double)>& c_of_r,
                                const std::function<double(double)>& delta_of_r, double f_at_1, double r_max,
                                const OdeOptions& options) {
  if (!(a > 0.0) || !(gamma > 0.0) || !(f_at_1 > 0.0) || !(r_max >= 1.0))
    throw std::invalid_argument("ode_solve: need a, gamma, f(1) > 0 and r_max >= 1");
  using State = std::array<double, 1>;
  namespace ode = boost::numeric::odeint;
  // u = log r, g = log f: g' = a (1 - C(r) exp(γ (g - a u)) + δ(r)).
  auto rhs = [&](const State& x, State& dx, double u) {
    const double r = std::exp(u);
    dx[0] = a * (1.0 - c_of_r(r) * std::exp(gamma * (x[0] - a * u)) + delta_of_r(r));
  };
  auto stepper = ode::make_controlled(options.atol, options.rtol, ode::runge_kutta_dopri5<State>());
  State x{std::log(f_at_1)};
  double u = 0.0, dt = 1e-3;
  const double u_end = std::log(r_max);
  std::vector<OdePoint> out{{1.0, f_at_1}};
  const int per_decade = std::max(1, options.record_per_decade);
  const double record_step = std::log(10.0) / per_decade;
  while (u < u_end) {
    const double target = std::min(u_end, u + record_step);
    while (u < target) {
      double h = std::min(dt, target - u);
      const bool clamped = h < dt;
      const auto result = stepper.try_step(rhs, x, u, h);
      if (result == ode::success) {
        if (!clamped) dt = h;
      } else {
        dt = h;
        if (dt < 1e-14 * (1.0 + std::abs(u))) {
          std::ostringstream msg;
          msg << "ode_solve: step size underflow at r = " << std::exp(u) << " (last valid point r = " << out.back().r
              << ", f = " << out.back().f << ")";
          throw std::runtime_error(msg.str());
        }
      }
      if (!std::isfinite(x[0])) throw std::runtime_error("ode_solve: solution left the finite range");
    }
    out.push_back({u >= u_end ? r_max : std::exp(u), std::exp(x[0])});
  }
  return out;
}

}  // namespace lrp
