#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lrp/harness.hpp"

namespace lrp {

namespace {

ojson real_json(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double json_real(const ojson& j) {
  if (j.is_null()) return std::nan("");
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    throw std::invalid_argument("record: bad number " + s);
  }
  return j.get<double>();
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

ojson ResultRecord::to_json() const {
  ojson j;
  j["id"] = id;
  j["kind"] = kind;
  j["params"] = {{"d", params.d}, {"alpha", params.alpha}, {"beta", params.beta}, {"r", real_json(params.r)},
                 {"L", params.L}};
  j["observable"] = observable;
  j["value"] = real_json(value);
  j["stderr"] = real_json(stderr_);
  j["n"] = n;
  j["seed"] = seed;
  j["batches"] = batches;
  j["exact"] = exact;
  j["annotations"] = annotations;
  j["config"] = config;
  if (!timestamp.empty()) j["timestamp"] = timestamp;
  return j;
}

ResultRecord ResultRecord::from_json(const ojson& j) {
  ResultRecord r;
  r.id = j.at("id").get<std::string>();
  r.kind = j.at("kind").get<std::string>();
  const auto& p = j.at("params");
  r.params.d = p.at("d").get<int>();
  r.params.alpha = p.at("alpha").get<double>();
  r.params.beta = p.at("beta").get<double>();
  r.params.r = json_real(p.at("r"));
  r.params.L = p.at("L").get<std::int64_t>();
  r.observable = j.at("observable").get<std::string>();
  r.value = json_real(j.at("value"));
  r.stderr_ = json_real(j.at("stderr"));
  r.n = j.at("n").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.batches = j.at("batches").get<int>();
  r.exact = j.value("exact", false);
  if (j.contains("annotations")) r.annotations = j["annotations"];
  if (j.contains("config")) r.config = j["config"];
  if (j.contains("timestamp")) r.timestamp = j["timestamp"].get<std::string>();
  return r;
}

std::string record_line(const ResultRecord& r) { return r.to_json().dump(); }

std::vector<ResultRecord> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<ResultRecord> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(ResultRecord::from_json(ojson::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

void write_csv(const std::string& path, const Table& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  auto row = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_field(r[i]);
    out << '\n';
  };
  row(table.header);
  for (const auto& r : table.rows) {
    if (r.size() != table.header.size()) throw std::logic_error("write_csv: row width differs from header");
    row(r);
  }
}

}  // namespace lrp
