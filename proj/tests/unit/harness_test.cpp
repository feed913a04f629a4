#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lrp/harness.hpp"

using namespace lrp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lrp_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::string> lines_without_timestamps(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto j = ojson::parse(line);
    j.erase("timestamp");
    out.push_back(j.dump());
  }
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int config_error_line(const std::string& text) {
  try {
    parse_config(text, "t.cfg");
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

ResultRecord synthetic(const std::string& obs, double x, double y, double se, const char* xkey) {
  ResultRecord r;
  r.id = "syn:0:0";
  r.kind = "twopoint";
  r.params = {1, 1.0 / 3.0, 0.6, kInfinity, 4096};
  r.observable = obs;
  r.value = y;
  r.stderr_ = se;
  r.n = 1000;
  r.batches = 32;
  if (xkey) r.annotations[xkey] = x;
  return r;
}

int run_cli(const std::string& args, std::string* output = nullptr) {
  const std::string out = (fs::temp_directory_path() / "lrp_cli_out.txt").string();
  const int rc = std::system((args + " > " + out + " 2>&1").c_str());
  if (output) *output = slurp(out);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("config parser: sections, dotted keys, comments and value forms") {
    const auto c = parse_config(R"(# experiment
id = demo-1
kind = twopoint
seed = 12345678901234567
kernel.d = 1
[kernel]
alpha = "1/3"   # fraction string
[grid]
beta = 0.59
r = [16, inf]
L = [128, 256]
replicas = 4096
batches = 32
[twopoint]
x = [8, 16, 32]
fit_min = 8
)");
    CHECK(c.id == "demo-1");
    CHECK(c.kind == ExperimentKind::TwoPoint);
    CHECK(c.seed == 12345678901234567ull);
    CHECK(c.kernel.alpha == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(parse_config("kind = simulate\n[kernel]\nalpha = 2/3\n").kernel.alpha == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(c.beta == std::vector<double>{0.59});
    REQUIRE(c.r.size() == 2);
    CHECK(std::isinf(c.r[1]));
    CHECK(c.grid().size() == 4);
    CHECK(c.options["x"].size() == 3);
    CHECK(c.echo()["grid"]["r"][1] == "inf");
    CHECK_FALSE(c.echo().contains("workers"));
    CHECK_FALSE(c.echo().contains("out"));
  }

  TEST_CASE("config diagnostics carry line and field") {
    CHECK(config_error_line("kind = simulate\n[grid]\nbeta = []\n") == 3);
    CHECK(config_error_line("kind = simulate\n\n[grid]\nbta = 1\n") == 4);
    CHECK(config_error_line("kind = simulate\nseed = 1\nseed = 2\n") == 3);
    CHECK(config_error_line("kind = simulate\n[ode]\na = 1\n") == 2);
    CHECK(config_error_line("kind = nope\n") == 1);
    CHECK(config_error_line("seed = 1\n") == 0);
    CHECK(config_error_line("kind = simulate\nthis line is wrong\n") == 2);
    CHECK(config_error_line("kind = simulate\n[grid]\nL = [64, 1]\n") == 3);
    CHECK(config_error_line("kind = ode\n[ode]\n\ngamma = -2\n") == 4);
    CHECK(config_error_line("kind = simulate\n[grid]\nreplicas = 8\n") == 3);
    try {
      parse_config("kind = simulate\n[grid]\nbeta = [0.5, \"x\"]\n", "t.cfg");
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      CHECK(e.field() == "grid.beta[1]");
      CHECK(std::string(e.what()).find("t.cfg:3") != std::string::npos);
    }
  }

  TEST_CASE("config hash ignores workers and output path") {
    auto a = parse_config("kind = simulate\nworkers = 1\nout = a\n");
    auto b = parse_config("kind = simulate\nworkers = 8\nout = b\n");
    auto c = parse_config("kind = simulate\nseed = 2\n");
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
  }

  TEST_CASE("records round-trip through JSON with every contract field") {
    ResultRecord r = synthetic("tau2", 8, 0.25, 0.01, "distance");
    r.seed = 99;
    r.config = parse_config("kind = twopoint\n").echo();
    r.timestamp = "2026-01-01T00:00:00Z";
    const ojson j = r.to_json();
    for (const char* k : {"id", "kind", "params", "observable", "value", "stderr", "n", "seed", "batches"})
      CHECK(j.contains(k));
    for (const char* k : {"d", "alpha", "beta", "r", "L"}) CHECK(j["params"].contains(k));
    CHECK(j["params"]["r"] == "inf");
    const auto back = ResultRecord::from_json(ojson::parse(j.dump()));
    CHECK(record_line(back) == record_line(r));
    CHECK(std::isinf(back.params.r));
  }

  TEST_CASE("CSV quoting and SVG rendering") {
    const auto dir = scratch("csv");
    Table t{{"a", "b"}, {{"1", "x,y"}, {"2", "say \"hi\""}}};
    write_csv((dir / "t.csv").string(), t);
    CHECK(slurp((dir / "t.csv").string()) == "a,b\n1,\"x,y\"\n2,\"say \"\"hi\"\"\"\n");
    CHECK_THROWS_AS(write_csv((dir / "u.csv").string(), Table{{"a"}, {{"1", "2"}}}), std::logic_error);

    PlotSpec p{"t", "x", "y", true, true, {{"m", {1, 10, 100}, {1, 0.1, 0.01}, {0.1, 0.01, 0.001}}, {"ref", {1, 100}, {1, 0.01}, {}}}};
    const std::string svg = render_svg(p);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("(log scale)") != std::string::npos);
    std::size_t circles = 0;
    for (std::size_t pos = 0; (pos = svg.find("<circle", pos)) != std::string::npos; ++pos) ++circles;
    CHECK(circles == 3);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
    p.series[0].err.pop_back();
    CHECK_THROWS_AS(render_svg(p), std::invalid_argument);
  }

  TEST_CASE("report_scaling: synthetic power law and vertex-factor trend") {
    const auto dir = scratch("report");
    std::vector<ResultRecord> recs;
    for (double x : {2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) recs.push_back(synthetic("tau2", x, std::pow(x, -2.0 / 3.0), 0.0, "distance"));
    ScalingOptions so;
    so.out_dir = dir.string();
    so.name = "two";
    const auto rep = report_scaling(recs, ScalingTarget::TwoPoint, so);
    CHECK(std::abs(rep.fit.exponent + 2.0 / 3.0) <= 1e-12);
    CHECK(rep.predicted_exponent == doctest::Approx(-2.0 / 3.0));
    CHECK(rep.label == "diagnostic");
    CHECK(fs::exists(rep.svg));
    CHECK(fs::exists(rep.csv));
    CHECK(slurp(rep.svg).find("diagnostic") != std::string::npos);

    std::vector<ResultRecord> v;
    for (double r : {8.0, 16.0, 64.0, 256.0, 1024.0}) {
      auto x = synthetic("vertex_factor", r, 0.3 / std::sqrt(std::log(r)), 0.001, nullptr);
      x.params.r = r;
      v.push_back(x);
    }
    so.name = "vf";
    so.ball_integral = 0.6;
    const auto rv = report_scaling(v, ScalingTarget::VertexFactor, so);
    CHECK(rv.fit_kind == "log-power");
    CHECK(rv.fit.exponent == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(slurp(rv.svg).find("predicted A") != std::string::npos);

    std::vector<ResultRecord> few(recs.begin(), recs.begin() + 2);
    try {
      report_scaling(few, ScalingTarget::TwoPoint, so);
      FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("x = {2, 4}") != std::string::npos);
    }
    CHECK_THROWS_AS(report_scaling(recs, ScalingTarget::VolumeTail, so), std::invalid_argument);
    auto mixed = recs;
    mixed[0].params.L = 2048;
    CHECK_THROWS_AS(report_scaling(mixed, ScalingTarget::TwoPoint, so), std::invalid_argument);
    so.x_min = 100;
    CHECK_THROWS_AS(report_scaling(recs, ScalingTarget::TwoPoint, so), std::invalid_argument);
  }

  TEST_CASE("ode pipeline emits trajectory CSV and asymptote record") {
    const auto dir = scratch("ode");
    const auto s = run(parse_config("kind = ode\n"), dir.string());
    bool found = false;
    for (const auto& r : s.records)
      if (r.observable == "ode_asymptote_ratio") {
        found = true;
        CHECK(std::abs(r.value - 1.0) < 0.1);
        CHECK(r.annotations["monotone_last_6_decades"] == true);
      } else if (r.observable == "ode_relative_error") {
        CHECK(r.value <= 1e-6);
      }
    CHECK(found);
    bool trajectory = false;
    for (const auto& f : s.files) trajectory = trajectory || f.find("_trajectory.csv") != std::string::npos;
    CHECK(trajectory);
    CHECK_FALSE(fs::exists(s.checkpoint));
  }

  TEST_CASE("oracle pipeline: built-in instance margins are nonnegative") {
    const auto dir = scratch("oracle");
    const auto s = run(parse_config("kind = oracle\n[grid]\nbeta = [0.1, 0.5, 1, 2]\n"), dir.string());
    CHECK(s.records.size() > 50);
    for (const auto& r : s.records) CHECK(r.value >= -1e-9 * std::max(1.0, std::abs(r.annotations["rhs"].get<double>())));
  }

  TEST_CASE("replay determinism and checkpoint resume") {
    const std::string cfg = R"(kind = simulate
seed = 5
[grid]
beta = [0.2, 0.4, 0.6]
r = 8
L = 32
replicas = 512
)";
    const auto c = parse_config(cfg);
    const auto d1 = scratch("det1"), d2 = scratch("det2"), d3 = scratch("det3");
    RunOptions one;
    RunOptions four;
    four.workers = 4;
    const auto a = run(c, d1.string(), one);
    const auto b = run(c, d2.string(), four);
    CHECK(lines_without_timestamps(a.jsonl) == lines_without_timestamps(b.jsonl));
    RunOptions plain = one;
    plain.timestamps = false;
    const auto p1 = run(c, d1.string(), plain);
    const auto p2 = run(c, d2.string(), plain);
    CHECK(slurp(p1.jsonl) == slurp(p2.jsonl));

    RunOptions partial = plain;
    partial.stop_after_units = 2;
    const auto half = run(c, d3.string(), partial);
    CHECK(half.interrupted);
    CHECK(half.units_run == 2);
    CHECK(fs::exists(half.checkpoint));
    const auto partial_lines = lines_without_timestamps(half.jsonl);
    CHECK(partial_lines.size() == 2 * 5);
    const auto rest = run(c, d3.string(), plain);
    CHECK_FALSE(rest.interrupted);
    CHECK(rest.units_resumed == 2);
    CHECK(rest.units_run == 1);
    CHECK(slurp(rest.jsonl) == slurp(p1.jsonl));

    // Interrupt before the first unit: nothing runs, checkpoint of a different config is ignored.
    const auto other = parse_config(cfg + "batches = 16\n");
    request_interrupt();
    const auto none = run(other, d3.string(), plain);
    clear_interrupt();
    CHECK(none.interrupted);
    CHECK(none.units_run == 0);
    const auto fresh = run(other, d3.string(), plain);
    CHECK(fresh.units_resumed == 0);
  }

  TEST_CASE("cli: dry run, LRP_WORKERS default and diagnostics") {
    const std::string bin = LRP_BINARY;
    std::string out;
    CHECK(run_cli("LRP_WORKERS=3 " + bin + " simulate --dry-run", &out) == 0);
    CHECK(out.find("workers = 3") != std::string::npos);
    CHECK(run_cli("LRP_WORKERS=3 " + bin + " simulate --dry-run --workers 2", &out) == 0);
    CHECK(out.find("workers = 2") != std::string::npos);
    CHECK(run_cli(bin + " simulate --dry-run --set grid.beta=[]", &out) == 2);
    CHECK(out.find("grid.beta") != std::string::npos);
    const auto dir = scratch("cli");
    CHECK(run_cli(bin + " diagrams --out " + dir.string() + " --set diagrams.max_p=4", &out) == 0);
    CHECK(out.find("tree_count") != std::string::npos);
    {
      std::ofstream cfg(dir / "k.cfg");
      cfg << "kind = ode\n";
    }
    CHECK(run_cli(bin + " kappa --config " + (dir / "k.cfg").string(), &out) == 2);
  }
}
