#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "lrp/analytics.hpp"
#include "lrp/harness.hpp"

namespace lrp {

ConfigError::ConfigError(std::string source, int line, std::string field, const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                         (field.empty() ? std::string() : ": field '" + field + "'") + ": " + message),
      line_(line),
      field_(std::move(field)) {}

int ParsedConfig::line_of(const std::string& key) const {
  auto it = lines.find(key.substr(0, key.find('[')));
  if (it != lines.end()) return it->second;
  // Section header line for a missing child key.
  for (const auto& [k, l] : lines)
    if (key.rfind(k + ".", 0) == 0) return l;
  return 0;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

bool valid_key(const std::string& k) {
  static const std::regex re("[A-Za-z_][A-Za-z0-9_]*(\\.[A-Za-z_][A-Za-z0-9_]*)*");
  return std::regex_match(k, re);
}

void insert(ParsedConfig& pc, const std::string& key, ojson value, int line) {
  if (pc.lines.count(key)) throw ConfigError(pc.source, line, key, "duplicate key (first set on line " +
                                                                        std::to_string(pc.lines[key]) + ")");
  ojson* node = &pc.tree;
  std::string path;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    path += (path.empty() ? "" : ".") + part;
    if (dot == std::string::npos) {
      if (node->contains(part)) throw ConfigError(pc.source, line, key, "conflicts with a section of the same name");
      (*node)[part] = std::move(value);
      break;
    }
    if (!node->contains(part)) {
      (*node)[part] = ojson::object();
      if (!pc.lines.count(path)) pc.lines[path] = line;
    } else if (!(*node)[part].is_object()) {
      throw ConfigError(pc.source, line, key, "'" + path + "' is a value, not a section");
    }
    node = &(*node)[part];
    start = dot + 1;
  }
  pc.lines[key] = line;
}

// Quotes bare tokens (inf, 1/3, words) inside arrays so the value parses as JSON.
std::string quote_bare_tokens(const std::string& v) {
  std::string out;
  bool in_string = false;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    bool literal = token == "true" || token == "false" || token == "null";
    if (!literal) {
      try {
        (void)ojson::parse(token);
        literal = true;
      } catch (const nlohmann::json::parse_error&) {
      }
    }
    out += literal ? token : "\"" + token + "\"";
    token.clear();
  };
  for (std::size_t i = 0; i < v.size(); ++i) {
    const char ch = v[i];
    if (in_string) {
      out += ch;
      if (ch == '"' && v[i - 1] != '\\') in_string = false;
      continue;
    }
    if (ch == '"') {
      flush();
      in_string = true;
      out += ch;
    } else if (std::string("[]{},:").find(ch) != std::string::npos || std::isspace(static_cast<unsigned char>(ch))) {
      flush();
      out += ch;
    } else {
      token += ch;
    }
  }
  flush();
  return out;
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text, const std::string& source) {
  ParsedConfig pc;
  pc.source = source;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  static const std::regex bare("[A-Za-z_][A-Za-z0-9_.+\\-]*");
  static const std::regex fraction("[+-]?[0-9]+(\\.[0-9]*)?/[0-9]+(\\.[0-9]*)?");
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(source, line, "", "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!valid_key(section)) throw ConfigError(source, line, section, "invalid section name");
      if (!pc.lines.count(section)) {
        ojson* node = &pc.tree;
        std::string path;
        std::size_t start = 0;
        while (true) {
          const std::size_t dot = section.find('.', start);
          const std::string part = section.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
          path += (path.empty() ? "" : ".") + part;
          if (!node->contains(part)) (*node)[part] = ojson::object();
          if (!(*node)[part].is_object()) throw ConfigError(source, line, path, "is a value, not a section");
          if (!pc.lines.count(path)) pc.lines[path] = line;
          node = &(*node)[part];
          if (dot == std::string::npos) break;
          start = dot + 1;
        }
      }
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "", "expected 'key = value' or '[section]'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(source, line, key, "invalid key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (value.empty()) throw ConfigError(source, line, full, "missing value");
    ojson v;
    try {
      v = ojson::parse(value);
    } catch (const nlohmann::json::parse_error& e) {
      if (std::regex_match(value, bare) || std::regex_match(value, fraction)) {
        v = value;
      } else if (value.front() == '[') {
        try {
          v = ojson::parse(quote_bare_tokens(value));
        } catch (const nlohmann::json::parse_error&) {
          throw ConfigError(source, line, full, "invalid value '" + value + "'");
        }
      } else {
        throw ConfigError(source, line, full, "invalid value '" + value + "'");
      }
    }
    insert(pc, full, std::move(v), line);
  }
  return pc;
}

namespace {

struct KindInfo {
  ExperimentKind kind;
  const char* name;
};

constexpr KindInfo kKinds[] = {
    {ExperimentKind::Simulate, "simulate"},       {ExperimentKind::BetaC, "betac"},
    {ExperimentKind::Edian, "edian"},             {ExperimentKind::Scaling, "scaling"},
    {ExperimentKind::TwoPoint, "twopoint"},       {ExperimentKind::ThreePoint, "threepoint"},
    {ExperimentKind::Corrections, "corrections"}, {ExperimentKind::Kappa, "kappa"},
    {ExperimentKind::Recurrence, "recurrence"},   {ExperimentKind::Diagrams, "diagrams"},
    {ExperimentKind::Ode, "ode"},                 {ExperimentKind::Constants, "constants"},
    {ExperimentKind::Oracle, "oracle"},
};

enum class OptType { Real, Int, Bool, String, RealList, IntList, Pairs };

struct OptSpec {
  const char* name;
  OptType type;
};

const std::vector<OptSpec>& option_schema(ExperimentKind k) {
  static const std::map<ExperimentKind, std::vector<OptSpec>> schema = {
      {ExperimentKind::Simulate, {{"truncations", OptType::IntList}, {"max_moment", OptType::Int}}},
      {ExperimentKind::BetaC,
       {{"tol", OptType::Real}, {"beta_lo", OptType::Real}, {"beta_hi", OptType::Real}, {"z", OptType::Real}}},
      {ExperimentKind::Edian, {{"r_box", OptType::RealList}}},
      {ExperimentKind::Scaling,
       {{"tail_n", OptType::IntList},
        {"beta_c", OptType::Real},
        {"ball_integral", OptType::Real},
        {"mc_samples", OptType::Int}}},
      {ExperimentKind::TwoPoint,
       {{"x", OptType::IntList}, {"fit_min", OptType::Real}, {"fit_max", OptType::Real}}},
      {ExperimentKind::ThreePoint, {{"pairs", OptType::Pairs}}},
      {ExperimentKind::Corrections, {{"variant", OptType::String}, {"probes", OptType::IntList}}},
      {ExperimentKind::Kappa,
       {{"n", OptType::IntList},
        {"max_degree", OptType::Int},
        {"localized_n", OptType::IntList},
        {"mc_samples", OptType::Int},
        {"eps", OptType::Real}}},
      {ExperimentKind::Recurrence,
       {{"n_max", OptType::Int}, {"alpha", OptType::RealList}, {"dims", OptType::IntList}, {"directions", OptType::Int}}},
      {ExperimentKind::Diagrams, {{"max_p", OptType::Int}}},
      {ExperimentKind::Ode,
       {{"a", OptType::Real},
        {"gamma", OptType::Real},
        {"C", OptType::Real},
        {"f1", OptType::Real},
        {"r_max", OptType::Real},
        {"r_check", OptType::Real},
        {"delta", OptType::Real}}},
      {ExperimentKind::Constants,
       {{"beta_c", OptType::Real}, {"mc_samples", OptType::Int}, {"ball_integral", OptType::Real}}},
      {ExperimentKind::Oracle, {{"instances", OptType::String}, {"count", OptType::Int}, {"tolerance", OptType::Real}}},
  };
  return schema.at(k);
}

// Numbers, "inf" and "p/q" fractions.
std::optional<double> as_real(const ojson& v) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) return std::nullopt;
  const std::string s = v.get<std::string>();
  if (s == "inf" || s == "+inf") return kInfinity;
  const std::size_t slash = s.find('/');
  try {
    std::size_t pos = 0;
    if (slash == std::string::npos) {
      const double x = std::stod(s, &pos);
      if (pos == s.size()) return x;
      return std::nullopt;
    }
    const double p = std::stod(s.substr(0, slash), &pos);
    if (pos != slash) return std::nullopt;
    const std::string qs = s.substr(slash + 1);
    const double q = std::stod(qs, &pos);
    if (pos != qs.size() || q == 0.0) return std::nullopt;
    return p / q;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::optional<std::int64_t> as_int(const ojson& v) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  auto x = as_real(v);
  if (!x || !std::isfinite(*x) || std::floor(*x) != *x || std::abs(*x) > 9.0e15) return std::nullopt;
  return static_cast<std::int64_t>(*x);
}

class Reader {
 public:
  explicit Reader(const ParsedConfig& pc) : pc_(pc) {}

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError(pc_.source, pc_.line_of(key), key, msg);
  }

  const ojson* find(const std::string& key) const {
    const ojson* node = &pc_.tree;
    std::size_t start = 0;
    while (true) {
      const std::size_t dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (!node->is_object() || !node->contains(part)) return nullptr;
      node = &(*node)[part];
      if (dot == std::string::npos) return node;
      start = dot + 1;
    }
  }

  double real(const std::string& key, const ojson& v) const {
    auto x = as_real(v);
    if (!x) fail(key, "expected a number, got " + v.dump());
    return *x;
  }
  std::int64_t integer(const std::string& key, const ojson& v) const {
    auto x = as_int(v);
    if (!x) fail(key, "expected an integer, got " + v.dump());
    return *x;
  }
  template <class F>
  auto list(const std::string& key, const ojson& v, F&& item) const {
    using T = decltype(item(key, v));
    std::vector<T> out;
    if (v.is_array()) {
      if (v.empty()) fail(key, "grid must be non-empty");
      for (std::size_t i = 0; i < v.size(); ++i) out.push_back(item(key + "[" + std::to_string(i) + "]", v[i]));
    } else {
      out.push_back(item(key, v));
    }
    return out;
  }

 private:
  const ParsedConfig& pc_;
};

ojson normalize_option(const Reader& rd, const std::string& key, OptType type, const ojson& v) {
  auto real = [&](const std::string& k, const ojson& x) { return rd.real(k, x); };
  auto integer = [&](const std::string& k, const ojson& x) { return rd.integer(k, x); };
  switch (type) {
    case OptType::Real: {
      const double x = rd.real(key, v);
      return std::isfinite(x) ? ojson(x) : ojson("inf");
    }
    case OptType::Int:
      return rd.integer(key, v);
    case OptType::Bool:
      if (!v.is_boolean()) rd.fail(key, "expected true or false, got " + v.dump());
      return v;
    case OptType::String:
      if (!v.is_string()) rd.fail(key, "expected a string, got " + v.dump());
      return v;
    case OptType::RealList:
      return rd.list(key, v, real);
    case OptType::IntList:
      return rd.list(key, v, integer);
    case OptType::Pairs: {
      if (!v.is_array() || v.empty()) rd.fail(key, "expected a non-empty list of [x, y] pairs");
      ojson out = ojson::array();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string k = key + "[" + std::to_string(i) + "]";
        if (!v[i].is_array() || v[i].size() != 2) rd.fail(k, "expected a pair [x, y]");
        out.push_back({rd.integer(k, v[i][0]), rd.integer(k, v[i][1])});
      }
      return out;
    }
  }
  return v;
}

void check_allowed(const Reader& rd, const ojson& obj, const std::string& prefix, const std::vector<std::string>& keys) {
  for (const auto& [k, v] : obj.items()) {
    bool ok = false;
    for (const auto& a : keys) ok = ok || a == k;
    if (!ok) rd.fail(prefix.empty() ? k : prefix + "." + k, "unknown field");
  }
}

}  // namespace

const char* to_string(ExperimentKind k) {
  for (const auto& info : kKinds)
    if (info.kind == k) return info.name;
  return "?";
}

std::optional<ExperimentKind> parse_kind(const std::string& s) {
  for (const auto& info : kKinds)
    if (s == info.name) return info.kind;
  return std::nullopt;
}

const std::vector<std::string>& kind_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& info : kKinds) n.push_back(info.name);
    return n;
  }();
  return names;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  if (kind == ExperimentKind::Oracle) c.beta = {0.1, 0.5, 1.0, 2.0};
  if (kind == ExperimentKind::BetaC) {
    c.L = {64, 128, 256};
    c.replicas = {2000};
  }
  return c;
}

ExperimentConfig config_from_parsed(const ParsedConfig& pc) {
  Reader rd(pc);
  const ojson& t = pc.tree;
  check_allowed(rd, t, "",
                {"id", "kind", "seed", "workers", "out", "batches", "kernel", "grid", "simulate", "betac", "edian",
                 "scaling", "twopoint", "threepoint", "corrections", "kappa", "recurrence", "diagrams", "ode",
                 "constants", "oracle"});
  const ojson* kind = rd.find("kind");
  if (!kind) rd.fail("kind", "missing (one of simulate, betac, edian, scaling, twopoint, threepoint, corrections, "
                             "kappa, recurrence, diagrams, ode, constants, oracle)");
  if (!kind->is_string() || !parse_kind(kind->get<std::string>())) rd.fail("kind", "unknown kind " + kind->dump());
  ExperimentConfig c = default_config(*parse_kind(kind->get<std::string>()));

  if (const ojson* v = rd.find("id")) {
    if (!v->is_string() || v->get<std::string>().empty()) rd.fail("id", "expected a non-empty string");
    static const std::regex re("[A-Za-z0-9_.\\-]+");
    if (!std::regex_match(v->get<std::string>(), re)) rd.fail("id", "may only contain letters, digits, '_', '.', '-'");
    c.id = v->get<std::string>();
  }
  if (const ojson* v = rd.find("seed")) {
    if (v->is_number_unsigned()) c.seed = v->get<std::uint64_t>();
    else {
      const auto s = rd.integer("seed", *v);
      if (s < 0) rd.fail("seed", "must be nonnegative");
      c.seed = static_cast<std::uint64_t>(s);
    }
  }
  if (const ojson* v = rd.find("workers")) {
    c.workers = static_cast<int>(rd.integer("workers", *v));
    if (c.workers < 1) rd.fail("workers", "must be at least 1");
  }
  if (const ojson* v = rd.find("out")) {
    if (!v->is_string()) rd.fail("out", "expected a string");
    c.out = v->get<std::string>();
  }
  if (const ojson* v = rd.find("kernel")) {
    if (!v->is_object()) rd.fail("kernel", "expected a section");
    check_allowed(rd, *v, "kernel", {"d", "alpha"});
    if (const ojson* d = rd.find("kernel.d")) c.kernel.d = static_cast<int>(rd.integer("kernel.d", *d));
    if (const ojson* a = rd.find("kernel.alpha")) c.kernel.alpha = rd.real("kernel.alpha", *a);
    try {
      c.kernel.validate();
    } catch (const std::exception& e) {
      rd.fail("kernel", e.what());
    }
  }
  auto batches_at = [&](const std::string& key) {
    if (const ojson* b = rd.find(key)) {
      c.batches = static_cast<int>(rd.integer(key, *b));
      if (c.batches < kMinBatches) rd.fail(key, "at least " + std::to_string(kMinBatches) + " batches required");
    }
  };
  batches_at("batches");
  if (const ojson* g = rd.find("grid")) {
    if (!g->is_object()) rd.fail("grid", "expected a section");
    check_allowed(rd, *g, "grid", {"beta", "r", "L", "replicas", "batches"});
    if (const ojson* v = rd.find("grid.beta")) {
      c.beta = rd.list("grid.beta", *v, [&](const std::string& k, const ojson& x) {
        const double b = rd.real(k, x);
        if (!(b >= 0.0) || !std::isfinite(b)) rd.fail(k, "beta must be finite and nonnegative");
        return b;
      });
    }
    if (const ojson* v = rd.find("grid.r")) {
      c.r = rd.list("grid.r", *v, [&](const std::string& k, const ojson& x) {
        const double r = rd.real(k, x);
        if (!(r >= 1.0)) rd.fail(k, "r must be at least 1 (or \"inf\")");
        return r;
      });
    }
    if (const ojson* v = rd.find("grid.L")) {
      c.L = rd.list("grid.L", *v, [&](const std::string& k, const ojson& x) {
        const auto L = rd.integer(k, x);
        if (L < 2) rd.fail(k, "L must be at least 2");
        return L;
      });
    }
    if (const ojson* v = rd.find("grid.replicas")) {
      c.replicas = rd.list("grid.replicas", *v, [&](const std::string& k, const ojson& x) {
        const auto n = rd.integer(k, x);
        if (n < 1) rd.fail(k, "replicas must be positive");
        return static_cast<std::uint64_t>(n);
      });
    }
    batches_at("grid.batches");
  }
  for (const auto& name : kind_names()) {
    const ojson* sec = rd.find(name);
    if (!sec) continue;
    if (!sec->is_object()) rd.fail(name, "expected a section");
    if (name != to_string(c.kind)) rd.fail(name, std::string("section does not apply to kind '") + to_string(c.kind) + "'");
    const auto& schema = option_schema(c.kind);
    for (const auto& [k, v] : sec->items()) {
      const OptSpec* spec = nullptr;
      for (const auto& s : schema)
        if (k == s.name) spec = &s;
      if (!spec) {
        std::string known;
        for (const auto& s : schema) known += std::string(known.empty() ? "" : ", ") + s.name;
        rd.fail(name + "." + k, "unknown field (known: " + known + ")");
      }
      c.options[k] = normalize_option(rd, name + "." + k, spec->type, v);
    }
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    const std::size_t colon = msg.find(": ");
    const std::string field = colon == std::string::npos ? "" : msg.substr(0, colon);
    throw ConfigError(pc.source, pc.line_of(field), field, colon == std::string::npos ? msg : msg.substr(colon + 2));
  }
  return c;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  return config_from_parsed(parse_config_text(text, source));
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "", "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

namespace {

bool uses_torus(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Simulate:
    case ExperimentKind::Edian:
    case ExperimentKind::Scaling:
    case ExperimentKind::TwoPoint:
    case ExperimentKind::ThreePoint:
    case ExperimentKind::Corrections:
      return true;
    default:
      return false;
  }
}

ojson real_json(double x) { return std::isfinite(x) ? ojson(x) : ojson("inf"); }

double opt_real(const ojson& o, const char* k, double def) {
  if (!o.contains(k)) return def;
  return *as_real(o[k]);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (beta.empty()) throw std::invalid_argument("grid.beta: grid must be non-empty");
  if (r.empty()) throw std::invalid_argument("grid.r: grid must be non-empty");
  if (L.empty()) throw std::invalid_argument("grid.L: grid must be non-empty");
  if (replicas.empty()) throw std::invalid_argument("grid.replicas: grid must be non-empty");
  if (batches < kMinBatches) throw std::invalid_argument("batches: at least 16 batches required");
  for (auto n : replicas)
    if (n < static_cast<std::uint64_t>(batches))
      throw std::invalid_argument("grid.replicas: each grid entry must be at least the batch count");
  kernel.validate();
  for (auto Lv : L)
    for (double rv : r)
      if (std::isfinite(rv) && Lv < 2 * lattice_radius(rv) + 2 && uses_torus(kind))
        throw std::invalid_argument("grid.L: L = " + std::to_string(Lv) + " is below 2 floor(r/2) + 2 for r = " +
                                    format_number(rv));
  switch (kind) {
    case ExperimentKind::BetaC: {
      std::vector<std::int64_t> s = L;
      std::sort(s.begin(), s.end());
      if (std::adjacent_find(s.begin(), s.end()) != s.end() || s.size() < 2)
        throw std::invalid_argument("grid.L: betac needs at least two distinct sizes");
      const double tol = opt_real(options, "tol", 0.01);
      if (!(tol > 0.0)) throw std::invalid_argument("betac.tol: must be positive");
      if (!(opt_real(options, "beta_lo", 0.2) < opt_real(options, "beta_hi", 2.0)))
        throw std::invalid_argument("betac.beta_lo: must be below betac.beta_hi");
      break;
    }
    case ExperimentKind::Edian:
      if (options.contains("r_box"))
        for (const auto& v : options["r_box"])
          if (!(*as_real(v) >= 1.0)) throw std::invalid_argument("edian.r_box: must be at least 1");
      break;
    case ExperimentKind::Corrections:
      if (options.contains("variant")) {
        const auto v = options["variant"].get<std::string>();
        if (v != "D1" && v != "D2" && v != "both")
          throw std::invalid_argument("corrections.variant: expected \"D1\", \"D2\" or \"both\"");
      }
      break;
    case ExperimentKind::Kappa:
      if (options.contains("max_degree") &&
          (options["max_degree"].get<int>() < 0 || options["max_degree"].get<int>() > kMaxMomentDegree))
        throw std::invalid_argument("kappa.max_degree: must be in 0..8");
      if (options.contains("localized_n"))
        for (const auto& v : options["localized_n"])
          if (v.get<int>() < 3 || v.get<int>() > 5) throw std::invalid_argument("kappa.localized_n: must be in 3..5");
      if (options.contains("n"))
        for (const auto& v : options["n"])
          if (v.get<int>() < 1) throw std::invalid_argument("kappa.n: must be positive");
      break;
    case ExperimentKind::Recurrence:
      if (options.contains("dims"))
        for (const auto& v : options["dims"])
          if (v.get<int>() < 1 || v.get<int>() > kMaxAnalyticDim)
            throw std::invalid_argument("recurrence.dims: must be in 1..3");
      if (options.contains("n_max") && options["n_max"].get<int>() < 1)
        throw std::invalid_argument("recurrence.n_max: must be positive");
      break;
    case ExperimentKind::Diagrams:
      if (options.contains("max_p") && (options["max_p"].get<int>() < 1 || options["max_p"].get<int>() > 8))
        throw std::invalid_argument("diagrams.max_p: must be in 1..8");
      break;
    case ExperimentKind::Ode:
      for (const char* k : {"a", "gamma", "C", "f1"})
        if (options.contains(k) && !(opt_real(options, k, 1.0) > 0.0))
          throw std::invalid_argument(std::string("ode.") + k + ": must be positive");
      if (!(opt_real(options, "r_max", 1e12) > 1.0)) throw std::invalid_argument("ode.r_max: must exceed 1");
      break;
    case ExperimentKind::Constants:
      if (!options.contains("beta_c")) throw std::invalid_argument("constants.beta_c: required (e.g. from a betac run)");
      if (!(opt_real(options, "beta_c", 0.0) > 0.0)) throw std::invalid_argument("constants.beta_c: must be positive");
      break;
    case ExperimentKind::Oracle:
      if (options.contains("instances")) {
        const auto v = options["instances"].get<std::string>();
        if (v != "builtin" && v != "random")
          throw std::invalid_argument("oracle.instances: expected \"builtin\" or \"random\"");
      }
      break;
    default:
      break;
  }
}

ojson ExperimentConfig::echo() const {
  ojson j;
  j["kind"] = to_string(kind);
  j["seed"] = seed;
  j["kernel"] = {{"d", kernel.d}, {"alpha", kernel.alpha}};
  ojson g;
  g["beta"] = beta;
  g["r"] = ojson::array();
  for (double x : r) g["r"].push_back(real_json(x));
  g["L"] = L;
  g["replicas"] = replicas;
  g["batches"] = batches;
  j["grid"] = g;
  j["options"] = options;
  return j;
}

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : echo().dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<GridPoint> ExperimentConfig::grid() const {
  std::vector<GridPoint> out;
  for (double b : beta)
    for (double rv : r)
      for (auto Lv : L)
        for (auto n : replicas) out.push_back({b, rv, Lv, n});
  return out;
}

}  // namespace lrp
