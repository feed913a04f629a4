#pragma once

#include <vector>

namespace lrp {

struct FitPoint {
  double x = 0.0;
  double y = 0.0;
  double sigma = 0.0;  // absolute error of y; 0 means unweighted
};

struct FitResult {
  double exponent = 0.0;   // slope (power or log-power)
  double amplitude = 0.0;
  double exponent_stderr = 0.0;
  double amplitude_stderr = 0.0;
  double chi2 = 0.0;
  int dof = 0;
};

// log y = log A + b log x, weights 1/(sigma/y)^2.
FitResult fit_power_law(const std::vector<FitPoint>& points);

// log(y x^{-fixed}) = log A + c log log x; requires x > 1.
FitResult fit_log_correction(const std::vector<FitPoint>& points, double fixed_exponent);

}  // namespace lrp
