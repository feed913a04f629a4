#include <csignal>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lrp/harness.hpp"

namespace {

void on_signal(int) { lrp::request_interrupt(); }

int env_workers() {
  const char* v = std::getenv("LRP_WORKERS");
  if (!v || !*v) return 0;
  try {
    const int w = std::stoi(v);
    return w > 0 ? w : 0;
  } catch (const std::exception&) {
    std::cerr << "lrp: ignoring LRP_WORKERS=" << v << " (not a positive integer)\n";
    return 0;
  }
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out;
  bool dry_run = false;
  bool no_resume = false;
  bool no_timestamps = false;
  std::vector<std::string> set;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "config file (key = value, [sections])");
  app->add_option("--seed", c.seed, "master seed (overrides the config)");
  app->add_option("--workers", c.workers, "worker threads (default: LRP_WORKERS, then the config, then 1)")
      ->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "output directory (overrides the config)");
  app->add_option("--set", c.set, "override a config key, e.g. --set grid.beta=[0.5,0.6]");
  app->add_flag("--dry-run", c.dry_run, "validate the config and print the plan");
  app->add_flag("--no-resume", c.no_resume, "ignore an existing checkpoint");
  app->add_flag("--no-timestamps", c.no_timestamps, "omit record timestamps");
}

lrp::ExperimentConfig build_config(const Common& c, const std::string& sub) {
  lrp::ParsedConfig pc;
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    if (!in) throw lrp::ConfigError(c.config, 0, "", "cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    pc = lrp::parse_config_text(ss.str(), c.config);
  } else {
    pc.source = "<command line>";
  }
  if (sub != "run") {
    if (pc.tree.contains("kind") && pc.tree["kind"] != sub)
      throw lrp::ConfigError(pc.source, pc.line_of("kind"), "kind",
                             "config is for '" + pc.tree["kind"].dump() + "', subcommand is '" + sub + "'");
    pc.tree["kind"] = sub;
  }
  for (const auto& kv : c.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw lrp::ConfigError("--set", 0, kv, "expected key=value");
    const auto one = lrp::parse_config_text(kv, "--set " + kv);
    std::function<void(lrp::ojson&, const lrp::ojson&)> merge = [&](lrp::ojson& dst, const lrp::ojson& src) {
      for (const auto& [k, v] : src.items()) {
        if (v.is_object() && dst.contains(k) && dst[k].is_object()) merge(dst[k], v);
        else dst[k] = v;
      }
    };
    merge(pc.tree, one.tree);
  }
  if (c.seed) pc.tree["seed"] = *c.seed;
  auto cfg = lrp::config_from_parsed(pc);
  if (!c.out.empty()) cfg.out = c.out;
  const bool config_workers = pc.tree.contains("workers");
  if (c.workers) cfg.workers = *c.workers;
  else if (!config_workers && env_workers() > 0) cfg.workers = env_workers();
  return cfg;
}

void print_record(const lrp::ResultRecord& r) {
  std::cout << "  " << r.observable;
  if (!r.annotations.empty()) std::cout << ' ' << r.annotations.dump();
  if (r.kind != "kappa" && r.kind != "recurrence" && r.kind != "diagrams" && r.kind != "ode" &&
      r.kind != "constants" && r.kind != "oracle")
    std::cout << " [beta=" << r.params.beta << " r=" << lrp::format_number(r.params.r) << " L=" << r.params.L << "]";
  std::cout << " = " << lrp::format_number(r.value);
  if (!r.exact && r.stderr_ > 0) std::cout << " +- " << lrp::format_number(r.stderr_);
  std::cout << '\n';
}

int run_kind(const Common& c, const std::string& sub) {
  const auto cfg = build_config(c, sub);
  if (c.dry_run) {
    std::cout << "config ok: kind = " << lrp::to_string(cfg.kind) << ", workers = " << cfg.workers
              << ", out = " << cfg.out << "\n"
              << cfg.echo().dump(2) << '\n';
    return 0;
  }
  lrp::RunOptions opt;
  opt.workers = cfg.workers;
  opt.resume = !c.no_resume;
  opt.timestamps = !c.no_timestamps;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const auto sum = lrp::run(cfg, cfg.out, opt);
  const std::size_t shown = std::min<std::size_t>(sum.records.size(), 60);
  for (std::size_t i = 0; i < shown; ++i) print_record(sum.records[i]);
  if (shown < sum.records.size()) std::cout << "  ... " << sum.records.size() - shown << " more\n";
  std::cout << "records: " << sum.records.size() << " -> " << sum.jsonl << " (units " << sum.units_run << " run, "
            << sum.units_resumed << " resumed of " << sum.units_total << ")\n";
  for (const auto& f : sum.files) std::cout << "wrote " << f << '\n';
  if (sum.interrupted) {
    std::cerr << "lrp: interrupted; partial results kept in " << sum.jsonl << " and " << sum.checkpoint
              << " (rerun the same command to resume)\n";
    return 130;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lrp: long-range percolation experiments"};
  app.require_subcommand(1);
  Common common;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  auto* run = app.add_subcommand("run", "run the experiment named by the config's kind");
  add_common(run, common);
  subs.push_back({"run", run});
  for (const auto& name : lrp::kind_names()) {
    auto* s = app.add_subcommand(name, "run a '" + name + "' experiment");
    add_common(s, common);
    subs.push_back({name, s});
  }

  std::string input, target, out_dir = ".";
  double beta_c = 0.0, ball = 0.0, x_min = 0.0, x_max = 0.0;
  auto* report = app.add_subcommand("report", "fit and plot a scaling diagnostic from a JSONL results file");
  report->add_option("--input", input, "JSONL results file")->required();
  report->add_option("--target", target, "volume_tail | two_point | three_point | vertex_factor")->required();
  report->add_option("--beta-c", beta_c, "critical point for the predicted curves");
  report->add_option("--ball-integral", ball, "value of the kappa^{*4} ball integral (computed if omitted)");
  report->add_option("--x-min", x_min, "fit window lower end");
  report->add_option("--x-max", x_max, "fit window upper end");
  report->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (report->parsed()) {
      const auto t = lrp::parse_target(target);
      if (!t) throw std::invalid_argument("unknown target '" + target + "'");
      auto recs = lrp::read_jsonl(input);
      lrp::ScalingOptions so;
      so.beta_c = beta_c;
      so.x_min = x_min;
      so.x_max = x_max;
      so.out_dir = out_dir;
      so.ball_integral = ball;
      if ((*t == lrp::ScalingTarget::VolumeTail || *t == lrp::ScalingTarget::VertexFactor) && ball <= 0.0 &&
          !recs.empty())
        so.ball_integral = lrp::ball_integral_for(recs.front().params.d, recs.front().params.alpha, 200000, 1, 1);
      const auto rep = lrp::report_scaling(recs, *t, so);
      std::cout << lrp::to_string(rep.target) << " (" << rep.label << "): " << rep.fit_kind << " fit exponent "
                << rep.fit.exponent << " +- " << rep.fit.exponent_stderr << ", predicted " << rep.predicted_exponent
                << "\nwrote " << rep.csv << "\nwrote " << rep.svg << '\n';
      return 0;
    }
    for (const auto& [name, s] : subs)
      if (s->parsed()) return run_kind(common, name);
  } catch (const lrp::ConfigError& e) {
    std::cerr << "lrp: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "lrp: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
