#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lrp/analytics.hpp"
#include "lrp/harness.hpp"

namespace fs = std::filesystem;

namespace lrp {

const char* to_string(ScalingTarget t) {
  switch (t) {
    case ScalingTarget::VolumeTail: return "volume_tail";
    case ScalingTarget::TwoPoint: return "two_point";
    case ScalingTarget::ThreePoint: return "three_point";
    case ScalingTarget::VertexFactor: return "vertex_factor";
  }
  return "?";
}

std::optional<ScalingTarget> parse_target(const std::string& s) {
  for (auto t : {ScalingTarget::VolumeTail, ScalingTarget::TwoPoint, ScalingTarget::ThreePoint,
                 ScalingTarget::VertexFactor})
    if (s == to_string(t)) return t;
  return std::nullopt;
}

double ball_integral_for(int d, double alpha, std::uint64_t mc_samples, std::uint64_t seed, int workers) {
  LocalizedIntegralOptions lo;
  lo.mc_samples = mc_samples;
  lo.seed = seed;
  lo.workers = workers;
  if (d == 1) return localized_ball_integral(1, alpha, 4, lo).value;
  return localized_ball_monte_carlo(d, 4, alpha, lo).first;
}

namespace {

struct TargetInfo {
  std::vector<std::string> observables;
  const char* x_name;
  const char* y_name;
};

TargetInfo info(ScalingTarget t) {
  switch (t) {
    case ScalingTarget::VolumeTail: return {{"volume_tail"}, "n", "P(|K| >= n)"};
    case ScalingTarget::TwoPoint: return {{"tau2", "tau2_translation_averaged"}, "||x||", "tau(0,x)"};
    case ScalingTarget::ThreePoint:
      return {{"tau3_ratio"}, "d_min", "tau3 / sqrt(tau2 tau2 tau2)"};
    case ScalingTarget::VertexFactor: return {{"vertex_factor"}, "r", "V_r = E|K|^2 / (E|K|)^3"};
  }
  return {};
}

double x_of(ScalingTarget t, const ResultRecord& r) {
  switch (t) {
    case ScalingTarget::VolumeTail: return r.annotations.at("n").get<double>();
    case ScalingTarget::TwoPoint: return r.annotations.at("distance").get<double>();
    case ScalingTarget::ThreePoint: return r.annotations.at("d_min").get<double>();
    case ScalingTarget::VertexFactor: return r.params.r;
  }
  return 0.0;
}

}  // namespace

ScalingReport report_scaling(const std::vector<ResultRecord>& results, ScalingTarget target,
                             const ScalingOptions& opt) {
  const auto ti = info(target);
  std::vector<ResultRecord> pts;
  for (const auto& r : results)
    for (const auto& o : ti.observables)
      if (r.observable == o) pts.push_back(r);
  const std::string who = std::string("report_scaling(") + to_string(target) + ")";
  if (pts.empty()) {
    std::string need;
    for (const auto& o : ti.observables) need += (need.empty() ? "" : " or ") + o;
    throw std::invalid_argument(who + ": no '" + need + "' records in the input");
  }
  std::set<std::tuple<int, double, double, std::int64_t>> groups;
  std::set<double> rs;
  for (const auto& p : pts) {
    groups.insert({p.params.d, p.params.alpha, p.params.beta, p.params.L});
    rs.insert(p.params.r);
  }
  if (groups.size() > 1)
    throw std::invalid_argument(who + ": records span several (d, alpha, beta, L) groups; filter them first");
  if (target != ScalingTarget::VertexFactor && rs.size() > 1)
    throw std::invalid_argument(who + ": records span several cut-offs r; filter them first");
  std::sort(pts.begin(), pts.end(), [&](const auto& a, const auto& b) { return x_of(target, a) < x_of(target, b); });

  const int d = pts.front().params.d;
  const double alpha = pts.front().params.alpha;
  const double beta_c = opt.beta_c > 0.0 ? opt.beta_c : pts.front().params.beta;
  auto in_window = [&](double x) {
    return (opt.x_min <= 0.0 || x >= opt.x_min) && (opt.x_max <= 0.0 || x <= opt.x_max) && std::isfinite(x);
  };
  std::vector<FitPoint> fit_pts;
  std::vector<double> all_x;
  for (const auto& p : pts) {
    const double x = x_of(target, p);
    all_x.push_back(x);
    const bool log_ok = target == ScalingTarget::VertexFactor || target == ScalingTarget::ThreePoint ? x > 1.0 : x > 0.0;
    if (in_window(x) && p.value > 0.0 && log_ok) fit_pts.push_back({x, p.value, p.stderr_});
  }
  if (fit_pts.size() < 3) {
    std::ostringstream msg;
    msg << who << ": need at least 3 points with positive value";
    if (opt.x_min > 0.0 || opt.x_max > 0.0) msg << " in [" << opt.x_min << ", " << opt.x_max << "]";
    msg << "; have " << fit_pts.size() << " usable of x = {";
    for (std::size_t i = 0; i < all_x.size(); ++i) msg << (i ? ", " : "") << all_x[i];
    msg << "}";
    throw std::invalid_argument(msg.str());
  }

  ScalingReport rep;
  rep.target = target;
  rep.points = pts;
  std::function<double(double)> predicted;
  std::string predicted_label;
  switch (target) {
    case ScalingTarget::VolumeTail: {
      rep.fit = fit_power_law(fit_pts);
      rep.fit_kind = "power";
      rep.predicted_exponent = -0.5;
      if (opt.ball_integral > 0.0 && beta_c > 0.0) {
        const auto u = universal_constants(alpha, beta_c, opt.ball_integral);
        const double pref = u.volume_prefactor;
        predicted = [pref](double n) { return n > 1.0 ? pref * std::pow(std::log(n), 0.25) / std::sqrt(n) : NAN; };
        predicted_label = "predicted prefactor (log n)^{1/4} n^{-1/2}";
      }
      break;
    }
    case ScalingTarget::TwoPoint: {
      rep.fit = fit_power_law(fit_pts);
      rep.fit_kind = "power";
      rep.predicted_exponent = -(d - alpha);
      // Only the exponent is predicted; the amplitude is matched to the fit at the window's geometric centre.
      const double xc = std::sqrt(fit_pts.front().x * fit_pts.back().x);
      const double yc = rep.fit.amplitude * std::pow(xc, rep.fit.exponent);
      const double b = rep.predicted_exponent;
      predicted = [xc, yc, b](double x) { return yc * std::pow(x / xc, b); };
      predicted_label = "slope -(d - alpha), amplitude matched";
      break;
    }
    case ScalingTarget::ThreePoint: {
      rep.fit = fit_log_correction(fit_pts, 0.0);
      rep.fit_kind = "log-power";
      rep.predicted_exponent = -0.5;
      const double xc = std::sqrt(fit_pts.front().x * fit_pts.back().x);
      const double yc = rep.fit.amplitude * std::pow(std::log(xc), rep.fit.exponent);
      predicted = [xc, yc](double x) { return yc * std::sqrt(std::log(1 + xc) / std::log(1 + x)); };
      predicted_label = "log(1 + d_min)^{-1/2}, amplitude matched";
      break;
    }
    case ScalingTarget::VertexFactor: {
      rep.fit = fit_log_correction(fit_pts, 0.0);
      rep.fit_kind = "log-power";
      rep.predicted_exponent = -0.5;
      if (opt.ball_integral > 0.0 && beta_c > 0.0) {
        const double A = universal_constants(alpha, beta_c, opt.ball_integral).A_amplitude;
        predicted = [A](double r) { return r > 1.0 ? A / std::sqrt(std::log(r)) : NAN; };
        predicted_label = "predicted A (log r)^{-1/2}";
      }
      break;
    }
  }

  fs::create_directories(opt.out_dir);
  const std::string stem = opt.name.empty() ? pts.front().id.substr(0, pts.front().id.find(':')) + "_" +
                                                  to_string(target)
                                            : opt.name;
  rep.csv = (fs::path(opt.out_dir) / (stem + ".csv")).string();
  rep.svg = (fs::path(opt.out_dir) / (stem + ".svg")).string();

  auto fitted = [&](double x) {
    if (rep.fit_kind == "power") return rep.fit.amplitude * std::pow(x, rep.fit.exponent);
    return x > 1.0 ? rep.fit.amplitude * std::pow(std::log(x), rep.fit.exponent) : NAN;
  };
  Table t;
  t.header = {"x", "value", "stderr", "fitted", "predicted", "in_fit", "fit_kind", "fit_exponent",
              "fit_exponent_stderr", "predicted_exponent", "label", "beta_c"};
  PlotSeries meas{"measured", {}, {}, {}}, fit_line{"fit", {}, {}, {}}, pred_line{predicted_label, {}, {}, {}};
  std::ostringstream fitlab;
  fitlab.precision(4);
  fitlab << "fit " << (rep.fit_kind == "power" ? "exponent " : "log-power ") << rep.fit.exponent << " +- "
         << rep.fit.exponent_stderr;
  fit_line.label = fitlab.str();
  for (const auto& p : pts) {
    const double x = x_of(target, p);
    const bool used = std::any_of(fit_pts.begin(), fit_pts.end(), [&](const FitPoint& f) { return f.x == x; });
    const double pv = predicted ? predicted(x) : NAN;
    t.rows.push_back({format_number(x), format_number(p.value), format_number(p.stderr_), format_number(fitted(x)),
                      predicted ? format_number(pv) : "", used ? "1" : "0", rep.fit_kind,
                      format_number(rep.fit.exponent), format_number(rep.fit.exponent_stderr),
                      format_number(rep.predicted_exponent), rep.label, format_number(beta_c)});
    meas.x.push_back(x);
    meas.y.push_back(p.value);
    meas.err.push_back(p.stderr_);
    if (used) {
      fit_line.x.push_back(x);
      fit_line.y.push_back(fitted(x));
    }
    if (predicted && std::isfinite(pv)) {
      pred_line.x.push_back(x);
      pred_line.y.push_back(pv);
    }
  }
  write_csv(rep.csv, t);
  PlotSpec plot;
  plot.title = std::string(to_string(target)) + " (diagnostic only; log corrections not asserted)";
  plot.x_label = ti.x_name;
  plot.y_label = ti.y_name;
  plot.log_y = target != ScalingTarget::ThreePoint;
  plot.series = {meas, fit_line};
  if (!pred_line.x.empty()) plot.series.push_back(pred_line);
  write_svg(rep.svg, plot);
  return rep;
}

}  // namespace lrp
