#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrp/estimate.hpp"
#include "lrp/fit.hpp"
#include "lrp/kernel.hpp"

namespace lrp {

using ojson = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, int line, std::string field, const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

// key = value lines, [section] headers and dotted keys; values are JSON, bare words are strings.
struct ParsedConfig {
  std::string source;
  ojson tree = ojson::object();
  std::map<std::string, int> lines;  // dotted key -> line
  int line_of(const std::string& key) const;
};
ParsedConfig parse_config_text(const std::string& text, const std::string& source = "<config>");

enum class ExperimentKind {
  Simulate,
  BetaC,
  Edian,
  Scaling,
  TwoPoint,
  ThreePoint,
  Corrections,
  Kappa,
  Recurrence,
  Diagrams,
  Ode,
  Constants,
  Oracle
};
const char* to_string(ExperimentKind k);
std::optional<ExperimentKind> parse_kind(const std::string& s);
const std::vector<std::string>& kind_names();

struct GridPoint {
  double beta = 0.0;
  double r = kInfinity;
  std::int64_t L = 64;
  std::uint64_t replicas = 1024;
};

struct ExperimentConfig {
  std::string id;
  ExperimentKind kind = ExperimentKind::Simulate;
  KernelSpec kernel;
  std::vector<double> beta{0.5};
  std::vector<double> r{kInfinity};
  std::vector<std::int64_t> L{64};
  std::vector<std::uint64_t> replicas{1024};
  int batches = 32;
  std::uint64_t seed = 1;
  std::string out = "results";
  int workers = 1;
  ojson options = ojson::object();  // the kind's own section

  // Everything that determines the results (no workers, no output path).
  ojson echo() const;
  std::uint64_t hash() const;
  std::vector<GridPoint> grid() const;
  void validate() const;
};

ExperimentConfig config_from_parsed(const ParsedConfig& parsed);
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);
// Defaults for a kind with no config file.
ExperimentConfig default_config(ExperimentKind kind);

struct ResultRecord {
  std::string id;
  std::string kind;
  Params params;
  std::string observable;
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  int batches = 0;
  bool exact = false;
  std::string timestamp;
  ojson config;
  ojson annotations = ojson::object();

  ojson to_json() const;
  static ResultRecord from_json(const ojson& j);
};

std::string record_line(const ResultRecord& r);
std::vector<ResultRecord> read_jsonl(const std::string& path);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
void write_csv(const std::string& path, const Table& table);
std::string format_number(double v);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // empty: drawn as a line without markers
};
struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = true;
  bool log_y = true;
  std::vector<PlotSeries> series;
};
std::string render_svg(const PlotSpec& plot);
void write_svg(const std::string& path, const PlotSpec& plot);

struct RunOptions {
  int workers = 1;
  bool resume = true;
  bool timestamps = true;
  std::optional<std::size_t> stop_after_units;  // simulates an interruption
};

struct RunSummary {
  std::string jsonl;
  std::string checkpoint;
  std::vector<std::string> files;
  std::vector<ResultRecord> records;
  std::size_t units_total = 0;
  std::size_t units_run = 0;
  std::size_t units_resumed = 0;
  bool interrupted = false;
};

// Streams records to <out_dir>/<id>.jsonl; completed units are kept in <id>.checkpoint.json.
RunSummary run(const ExperimentConfig& config, const std::string& out_dir, const RunOptions& options = {});

void request_interrupt();
bool interrupt_requested();
void clear_interrupt();

enum class ScalingTarget { VolumeTail, TwoPoint, ThreePoint, VertexFactor };
const char* to_string(ScalingTarget t);
std::optional<ScalingTarget> parse_target(const std::string& s);

struct ScalingOptions {
  double beta_c = 0.0;         // 0: take beta from the records
  double ball_integral = 0.0;  // ∫_B κ^{*4}; 0: computed for (d, alpha)
  double x_min = 0.0;          // fit window, 0 = unbounded
  double x_max = 0.0;
  std::string out_dir = ".";
  std::string name;  // file stem, default <id>_<target>
};

struct ScalingReport {
  ScalingTarget target = ScalingTarget::TwoPoint;
  FitResult fit;
  double predicted_exponent = 0.0;
  std::string fit_kind;  // "power" or "log-power"
  std::string csv;
  std::string svg;
  std::string label = "diagnostic";
  std::vector<ResultRecord> points;
};

ScalingReport report_scaling(const std::vector<ResultRecord>& results, ScalingTarget target,
                             const ScalingOptions& options);

// ∫_B κ^{*4} by both routes when d = 1, Monte Carlo otherwise.
double ball_integral_for(int d, double alpha, std::uint64_t mc_samples, std::uint64_t seed, int workers);

}  // namespace lrp
