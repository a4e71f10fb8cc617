#include "szego/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "szego/errors.hpp"
#include "szego/format.hpp"
#include "szego/parallel.hpp"

namespace szego::cli {

using nlohmann::json;

// ---------------------------------------------------------------------------
// TOML subset

namespace {

class TomlParser {
 public:
  explicit TomlParser(const std::string& text) : s_(text) {}

  json parse() {
    json root = json::object();
    json* current = &root;
    std::set<std::string> headers;
    while (true) {
      skip_blank();
      if (eof()) break;
      if (peek() == '[') {
        advance();
        if (!eof() && peek() == '[') fail("arrays of tables are not supported");
        skip_ws();
        const std::vector<std::string> keys = parse_key();
        skip_ws();
        if (eof() || peek() != ']') fail("expected ']' after table name");
        advance();
        std::string name;
        for (const auto& k : keys) name += (name.empty() ? "" : ".") + k;
        if (!headers.insert(name).second) fail("table [" + name + "] defined twice");
        current = &root;
        for (const auto& k : keys) {
          json& next = (*current)[k];
          if (next.is_null()) next = json::object();
          if (!next.is_object()) fail("key '" + k + "' is not a table");
          current = &next;
        }
      } else {
        const std::vector<std::string> keys = parse_key();
        skip_ws();
        if (eof() || peek() != '=') fail("expected '=' after key");
        advance();
        skip_ws();
        assign(*current, keys, parse_value());
      }
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, static_cast<int>(i_ - line_start_) + 1);
  }
  bool eof() const { return i_ >= s_.size(); }
  char peek() const { return s_[i_]; }
  void advance() {
    if (s_[i_] == '\n') {
      ++line_;
      line_start_ = i_ + 1;
    }
    ++i_;
  }
  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) advance();
  }
  void skip_comment() {
    if (!eof() && peek() == '#')
      while (!eof() && peek() != '\n') advance();
  }
  // whitespace, newlines and comments
  void skip_blank() {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }
  void end_of_line() {
    skip_ws();
    skip_comment();
    if (!eof() && peek() == '\r') advance();
    if (!eof() && peek() != '\n') fail("expected end of line");
  }

  static bool bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::vector<std::string> parse_key() {
    std::vector<std::string> keys;
    while (true) {
      skip_ws();
      if (eof()) fail("expected a key");
      if (peek() == '"' || peek() == '\'') {
        keys.push_back(parse_string());
      } else {
        const std::size_t start = i_;
        while (!eof() && bare_char(peek())) advance();
        if (i_ == start) fail("expected a key");
        keys.push_back(s_.substr(start, i_ - start));
      }
      skip_ws();
      if (eof() || peek() != '.') break;
      advance();
    }
    return keys;
  }

  void assign(json& table, const std::vector<std::string>& keys, json value) {
    json* t = &table;
    for (std::size_t k = 0; k + 1 < keys.size(); ++k) {
      json& next = (*t)[keys[k]];
      if (next.is_null()) next = json::object();
      if (!next.is_object()) fail("key '" + keys[k] + "' is not a table");
      t = &next;
    }
    if (t->contains(keys.back())) fail("duplicate key '" + keys.back() + "'");
    (*t)[keys.back()] = std::move(value);
  }

  std::string parse_string() {
    const char quote = peek();
    advance();
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = peek();
      advance();
      if (c == quote) break;
      if (c == '\\' && quote == '"') {
        if (eof()) fail("unterminated string");
        const char e = peek();
        advance();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unknown escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  json parse_value() {
    if (eof()) fail("expected a value");
    const char c = peek();
    if (c == '"' || c == '\'') return parse_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    return parse_scalar();
  }

  json parse_array() {
    advance();
    json arr = json::array();
    while (true) {
      skip_blank();
      if (eof()) fail("unterminated array");
      if (peek() == ']') {
        advance();
        return arr;
      }
      arr.push_back(parse_value());
      skip_blank();
      if (eof()) fail("unterminated array");
      if (peek() == ',') {
        advance();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  json parse_inline_table() {
    advance();
    json t = json::object();
    skip_ws();
    if (!eof() && peek() == '}') {
      advance();
      return t;
    }
    while (true) {
      const std::vector<std::string> keys = parse_key();
      skip_ws();
      if (eof() || peek() != '=') fail("expected '=' in inline table");
      advance();
      skip_ws();
      assign(t, keys, parse_value());
      skip_ws();
      if (eof()) fail("unterminated inline table");
      if (peek() == '}') {
        advance();
        return t;
      }
      if (peek() != ',') fail("expected ',' or '}' in inline table");
      advance();
    }
  }

  json parse_scalar() {
    const std::size_t start = i_;
    const int col = static_cast<int>(i_ - line_start_) + 1;
    while (!eof() && (bare_char(peek()) || peek() == '.' || peek() == '+')) advance();
    std::string tok = s_.substr(start, i_ - start);
    if (tok.empty()) fail("expected a value");
    if (tok == "true") return true;
    if (tok == "false") return false;
    tok.erase(std::remove(tok.begin(), tok.end(), '_'), tok.end());
    const bool integral = tok.find_first_not_of("+-0123456789") == std::string::npos;
    char* end = nullptr;
    if (integral) {
      errno = 0;
      const long long v = std::strtoll(tok.c_str(), &end, 10);
      if (*end == '\0' && errno == 0) return v;
    } else {
      const double v = std::strtod(tok.c_str(), &end);
      if (*end == '\0') return v;
    }
    throw ParseError("invalid value '" + tok + "'", line_, col);
  }

  const std::string& s_;
  std::size_t i_ = 0;
  int line_ = 1;
  std::size_t line_start_ = 0;
};

}  // namespace

ConfigFormat format_for_path(const std::string& path) {
  return std::filesystem::path(path).extension() == ".json" ? ConfigFormat::Json : ConfigFormat::Toml;
}

json parse_toml(const std::string& text) { return TomlParser(text).parse(); }

json parse_config_text(const std::string& text, ConfigFormat format) {
  if (format == ConfigFormat::Toml) return parse_toml(text);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset to line and column
    const std::size_t pos = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
    int line = 1;
    std::size_t start = 0;
    for (std::size_t k = 0; k < pos; ++k)
      if (text[k] == '\n') {
        ++line;
        start = k + 1;
      }
    throw ParseError("invalid JSON", line, static_cast<int>(pos - start) + 1);
  }
}

// ---------------------------------------------------------------------------
// RunConfig

namespace {

/// Typed access to one config table; finish() rejects keys nobody read.
class Table {
 public:
  Table(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("'" + where() + "' must be a table");
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const std::string& name() const { return path_; }

  void get(const std::string& key, double& out) {
    if (const json* v = raw(key)) {
      if (!v->is_number()) type_error(key, "a number");
      out = v->get<double>();
    }
  }
  void get(const std::string& key, int& out) {
    if (const json* v = raw(key)) {
      if (!v->is_number_integer()) type_error(key, "an integer");
      out = v->get<int>();
    }
  }
  void get(const std::string& key, std::size_t& out) {
    if (const json* v = raw(key)) {
      if (!v->is_number_integer() || (!v->is_number_unsigned() && v->get<long long>() < 0))
        type_error(key, "a non-negative integer");
      out = v->get<std::size_t>();
    }
  }
  void get(const std::string& key, bool& out) {
    if (const json* v = raw(key)) {
      if (!v->is_boolean()) type_error(key, "a boolean");
      out = v->get<bool>();
    }
  }
  void get(const std::string& key, std::string& out) {
    if (const json* v = raw(key)) {
      if (!v->is_string()) type_error(key, "a string");
      out = v->get<std::string>();
    }
  }
  void get(const std::string& key, std::vector<double>& out) {
    if (const json* v = raw(key)) {
      if (!v->is_array()) type_error(key, "an array of numbers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) type_error(key, "an array of numbers");
        out.push_back(x.get<double>());
      }
    }
  }
  void get(const std::string& key, std::vector<std::string>& out) {
    if (const json* v = raw(key)) {
      if (!v->is_array()) type_error(key, "an array of strings");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_string()) type_error(key, "an array of strings");
        out.push_back(x.get<std::string>());
      }
    }
  }
  /// [lo, hi] pair.
  void get_range(const std::string& key, double& lo, double& hi) {
    if (const json* v = raw(key)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
        type_error(key, "a [lo, hi] pair");
      lo = (*v)[0].get<double>();
      hi = (*v)[1].get<double>();
      if (!(lo <= hi)) throw ConfigError("'" + key_path(key) + "': lo must not exceed hi");
    }
  }

  std::optional<Table> sub(const std::string& key) {
    if (const json* v = raw(key)) return Table(*v, key_path(key));
    return std::nullopt;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + key_path(it.key()) + "'");
  }

  [[noreturn]] void type_error(const std::string& key, const std::string& what) const {
    throw ConfigError("key '" + key_path(key) + "' must be " + what);
  }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Polynomial polynomial_from_terms(const json& terms, int dim, const std::string& path) {
  if (!terms.is_array() || terms.empty()) throw ConfigError("'" + path + "' must be a non-empty array of terms");
  TermMap map;
  int n = dim;
  for (const auto& rec : terms) {
    if (!rec.is_array() || rec.size() < 2 || !rec[0].is_number())
      throw ConfigError("'" + path + "': each term is [coefficient, e_1, ..., e_n]");
    const int width = static_cast<int>(rec.size()) - 1;
    if (n == 0) n = width;
    if (width != n) throw ConfigError("'" + path + "': expected " + std::to_string(n) + " exponents per term");
    Exponent e;
    for (int k = 1; k <= width; ++k) {
      if (!rec[k].is_number_integer() || rec[k].get<int>() < 0)
        throw ConfigError("'" + path + "': exponents must be non-negative integers");
      e.push_back(rec[k].get<int>());
    }
    map[e] += rec[0].get<double>();
  }
  return Polynomial(n, map);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// { dim?, terms | text | file }
Polynomial polynomial_from_table(Table t, const std::string& base_dir) {
  int dim = 0;
  t.get("dim", dim);
  const json* terms = t.raw("terms");
  std::string text, file;
  t.get("text", text);
  t.get("file", file);
  t.finish();
  const bool has_text = t.has("text");
  const int given = (terms != nullptr) + has_text + !file.empty();
  if (given != 1) throw ConfigError("'" + t.name() + "' needs exactly one of terms, text, file");
  Polynomial p;
  if (terms) {
    p = polynomial_from_terms(*terms, dim, t.key_path("terms"));
  } else {
    if (!file.empty()) {
      const std::filesystem::path fp(file);
      text = read_file(fp.is_absolute() ? file : (std::filesystem::path(base_dir) / fp).string());
    }
    p = Polynomial::from_text(text, dim);
  }
  if (p.is_zero()) throw ParseError("empty polynomial in '" + t.name() + "'", 1, 1);
  return p;
}

json polynomial_json(const Polynomial& p) {
  json terms = json::array();
  for (const auto& t : p.terms()) {
    json rec = json::array({t.coefficient});
    for (int e : t.exponent) rec.push_back(e);
    terms.push_back(rec);
  }
  return {{"dim", p.dim()}, {"terms", terms}};
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"coeff_bound", "bnw", "appendix", "decay"};
  return names;
}

RunConfig run_config_from_json(const json& j, const std::string& base_dir) {
  RunConfig c;
  Table root(j, "");
  root.get("seed", c.seed);
  root.get("threads", c.threads);
  root.get("refine", c.refine);
  if (auto t = root.sub("polynomial")) c.polynomial = polynomial_from_table(*t, base_dir);

  if (const json* pairs = root.raw("pairs")) {
    if (!pairs->is_array()) throw ConfigError("key 'pairs' must be an array of [point, point]");
    for (const auto& pr : *pairs) {
      if (!pr.is_array() || pr.size() != 2 || !pr[0].is_string() || !pr[1].is_string())
        throw ConfigError("each entry of 'pairs' is two strings \"x=[..] y=[..] t=..\"");
      c.pairs.push_back({parse_boundary_point(pr[0].get<std::string>()),
                         parse_boundary_point(pr[1].get<std::string>())});
    }
  }
  bool sampler_seed = false;
  if (auto t = root.sub("sampler")) {
    SamplerSpec s;
    t->get("count", s.count);
    sampler_seed = t->has("seed");
    t->get("seed", s.seed);
    t->get_range("x", s.x_lo, s.x_hi);
    t->get_range("y", s.y_lo, s.y_hi);
    t->get_range("t", s.t_lo, s.t_hi);
    t->finish();
    if (s.count < 1) throw ConfigError("'sampler.count' must be positive");
    c.sampler = s;
  }
  if (c.sampler && !sampler_seed) c.sampler->seed = c.seed;

  QuadratureConfig& q = c.quadrature;
  if (auto t = root.sub("quadrature")) {
    t->get("j_min", q.j_min);
    t->get("j_max", q.j_max);
    t->get("tau_points_per_cell", q.tau_points_per_cell);
    t->get("eta_radius", q.eta_radius);
    t->get("eta_grid", q.eta_grid);
    t->get("v_tol", q.v_tol);
    t->get("oscillation_safety", q.oscillation_safety);
    t->get("rescale", q.rescale);
    t->get("parallel", q.parallel);
    std::string inner = q.inner == InnerMethod::Transform ? "transform" : "laplace";
    t->get("inner", inner);
    if (inner == "transform") {
      q.inner = InnerMethod::Transform;
    } else if (inner == "laplace") {
      q.inner = InnerMethod::Laplace;
    } else {
      throw ConfigError("key 'quadrature.inner' must be \"transform\" or \"laplace\"");
    }
    t->get("inner_tol", q.inner_tol);
    t->get("theta_tol", q.theta.tol);
    t->get("ellipsoid_directions", q.ellipsoid.directions);
    t->get("ellipsoid_check_points", q.ellipsoid.check_points);
    std::string method = to_string(q.volume.method);
    t->get("volume_method", method);
    q.volume.method = volume_method_from_string(method);
    t->get("volume_samples", q.volume.samples);
    t->get("volume_radial_order", q.volume.radial_order);
    t->get("volume_grid_points", q.volume.grid_points);
    t->finish();
  }
  q.seed = c.seed;
  q.volume.seed = c.seed;
  q.validate();

  if (auto t = root.sub("poly_check")) {
    t->get("radius", c.poly_check.radius);
    t->get("samples", c.poly_check.samples);
    t->finish();
    if (!(c.poly_check.radius > 0.0) || c.poly_check.samples == 0)
      throw ConfigError("'poly_check' needs a positive radius and sample count");
  }

  VerifyConfig& v = c.verify;
  if (auto t = root.sub("verify")) {
    t->get("suites", c.suites);
    t->get("radius", c.coefficient_radius);
    if (const json* corpus = t->raw("corpus")) {
      if (!corpus->is_array()) throw ConfigError("key 'verify.corpus' must be an array of tables");
      for (std::size_t k = 0; k < corpus->size(); ++k) {
        const std::string path = "verify.corpus[" + std::to_string(k) + "]";
        if (!(*corpus)[k].is_object()) throw ConfigError("'" + path + "' must be a table");
        json entry = (*corpus)[k];
        if (!entry.contains("name") || !entry["name"].is_string())
          throw ConfigError("'" + path + "' needs a string name");
        const std::string name = entry["name"].get<std::string>();
        entry.erase("name");
        c.corpus.emplace_back(name, polynomial_from_table(Table(entry, path), base_dir));
      }
    }
    t->get("sphere_order", v.sphere_order);
    t->get("sample_points", v.sample_points);
    t->get("bnw_points", v.bnw_points);
    t->get("bnw_t_max", v.bnw_t_max);
    t->get("mc_samples", v.volume.samples);
    t->get("lambdas", v.lambdas);
    t->get("levels", v.levels);
    t->get("decay_lo", v.decay_lo);
    t->get("decay_hi", v.decay_hi);
    t->get("decay_points", v.decay_points);
    t->get("dominance", v.dominance);
    t->get("perturbation", v.perturbation);
    t->finish();
  }
  v.seed = c.seed;
  v.volume.seed = c.seed;
  for (const auto& s : c.suites)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw ConfigError("unknown suite '" + s + "'");

  if (auto t = root.sub("output")) {
    t->get("csv", c.csv_out);
    t->get("refined_csv", c.refined_csv_out);
    t->get("json", c.json_out);
    t->finish();
  }
  root.finish();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  const json j = parse_config_text(read_file(path), format_for_path(path));
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return run_config_from_json(j, dir.empty() ? "." : dir);
}

json RunConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["threads"] = threads;
  j["refine"] = refine;
  if (polynomial) j["polynomial"] = polynomial_json(*polynomial);
  if (!pairs.empty()) {
    json arr = json::array();
    for (const auto& p : pairs) arr.push_back({format_boundary_point(p.p), format_boundary_point(p.q)});
    j["pairs"] = arr;
  }
  if (sampler) {
    j["sampler"] = {{"count", sampler->count},
                    {"seed", sampler->seed},
                    {"x", {sampler->x_lo, sampler->x_hi}},
                    {"y", {sampler->y_lo, sampler->y_hi}},
                    {"t", {sampler->t_lo, sampler->t_hi}}};
  }
  const QuadratureConfig& q = quadrature;
  j["quadrature"] = {{"j_min", q.j_min},
                     {"j_max", q.j_max},
                     {"tau_points_per_cell", q.tau_points_per_cell},
                     {"eta_radius", q.eta_radius},
                     {"eta_grid", q.eta_grid},
                     {"v_tol", q.v_tol},
                     {"oscillation_safety", q.oscillation_safety},
                     {"rescale", q.rescale},
                     {"parallel", q.parallel},
                     {"inner", q.inner == InnerMethod::Transform ? "transform" : "laplace"},
                     {"inner_tol", q.inner_tol},
                     {"theta_tol", q.theta.tol},
                     {"ellipsoid_directions", q.ellipsoid.directions},
                     {"ellipsoid_check_points", q.ellipsoid.check_points},
                     {"volume_method", to_string(q.volume.method)},
                     {"volume_samples", q.volume.samples},
                     {"volume_radial_order", q.volume.radial_order},
                     {"volume_grid_points", q.volume.grid_points}};
  j["poly_check"] = {{"radius", poly_check.radius}, {"samples", poly_check.samples}};
  json corpus_arr = json::array();
  for (const auto& [name, p] : corpus) {
    json e = polynomial_json(p);
    e["name"] = name;
    corpus_arr.push_back(e);
  }
  j["verify"] = {{"suites", suites},
                 {"radius", coefficient_radius},
                 {"corpus", corpus_arr},
                 {"sphere_order", verify.sphere_order},
                 {"sample_points", verify.sample_points},
                 {"bnw_points", verify.bnw_points},
                 {"bnw_t_max", verify.bnw_t_max},
                 {"mc_samples", verify.volume.samples},
                 {"lambdas", verify.lambdas},
                 {"levels", verify.levels},
                 {"decay_lo", verify.decay_lo},
                 {"decay_hi", verify.decay_hi},
                 {"decay_points", verify.decay_points},
                 {"dominance", verify.dominance},
                 {"perturbation", verify.perturbation}};
  j["output"] = {{"csv", csv_out}, {"refined_csv", refined_csv_out}, {"json", json_out}};
  return j;
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.seed) {
    cfg.seed = *o.seed;
    if (cfg.sampler) cfg.sampler->seed = *o.seed;
    cfg.quadrature.seed = cfg.quadrature.volume.seed = *o.seed;
    cfg.verify.seed = cfg.verify.volume.seed = *o.seed;
  }
  if (o.threads) cfg.threads = *o.threads;
  if (o.refine) cfg.refine = true;
  if (!o.out.empty()) cfg.csv_out = cfg.json_out = o.out;
  for (const auto& s : o.suites)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw ConfigError("unknown suite '" + s + "'");
  if (!o.suites.empty()) cfg.suites = o.suites;
}

// ---------------------------------------------------------------------------
// commands

namespace {

const Polynomial& require_polynomial(const RunConfig& cfg) {
  if (!cfg.polynomial) throw ConfigError("config has no [polynomial]");
  return *cfg.polynomial;
}

std::vector<PointPair> pairs_for(const RunConfig& cfg, int n) {
  std::vector<PointPair> pairs = cfg.pairs;
  if (cfg.sampler) {
    const auto drawn = sample_pairs(n, *cfg.sampler);
    pairs.insert(pairs.end(), drawn.begin(), drawn.end());
  }
  if (pairs.empty()) throw ConfigError("config has neither pairs nor [sampler]");
  for (const auto& p : pairs)
    if (p.p.dim() != n || p.q.dim() != n || p.p.y.size() != n || p.q.y.size() != n)
      throw ConfigError("point dimension does not match the polynomial (n = " + std::to_string(n) + ")");
  return pairs;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

std::string degree_text(const CombinedDegree& m) {
  std::string s = "(";
  for (int i = 0; i < m.dim(); ++i) s += (i ? "," : "") + std::to_string(m.m[i]);
  return s + ")";
}

}  // namespace

int cmd_poly_check(const RunConfig& cfg, std::ostream& data, std::ostream&) {
  const Polynomial& p = require_polynomial(cfg);
  std::ostringstream os;
  os << "polynomial: " << p.dim() << " variables, " << p.size() << " terms\n";
  if (const auto m = combined_degree(p)) {
    os << "combined degree " << degree_text(*m) << '\n';
  } else {
    os << "rejected: " << combined_degree_rejection(p) << '\n';
  }
  const ConvexityReport r = check_convexity(p, cfg.poly_check.radius, cfg.poly_check.samples, cfg.seed);
  os << "strictly convex: " << (r.strictly_convex ? "yes" : "no") << ", min Hessian eigenvalue "
     << fmt17(r.min_eigenvalue) << " over " << r.sampled_points << " samples in the ball of radius "
     << fmt17(cfg.poly_check.radius) << '\n';
  data << os.str();
  return kExitOk;
}

int cmd_kernel_eval(const RunConfig& cfg, std::ostream& data, std::ostream& info) {
  const Polynomial& b = require_polynomial(cfg);
  const std::vector<PointPair> pairs = pairs_for(cfg, b.dim());
  const QuadratureConfig q = cfg.refine ? cfg.quadrature.refined() : cfg.quadrature;
  const SweepTable t = main_theorem_sweep(b, pairs, q);
  data << t.to_csv();
  int errors = 0;
  for (const auto& r : t.rows) errors += !r.error.empty();
  info << "kernel eval: " << t.rows.size() << " pairs, " << errors << " with errors\n";
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& data, std::ostream& info) {
  const Polynomial& b = require_polynomial(cfg);
  const std::vector<PointPair> pairs = pairs_for(cfg, b.dim());
  if (!cfg.refine) {
    const SweepTable t = main_theorem_sweep(b, pairs, cfg.quadrature);
    data << t.to_csv();
    info << "max ratio " << fmt17(t.max_ratio) << '\n';
    return kExitOk;
  }
  const SweepStability s = sweep_with_refinement(b, pairs, cfg.quadrature);
  data << s.base.to_csv();
  if (!cfg.refined_csv_out.empty()) write_file(cfg.refined_csv_out, s.refined.to_csv());
  info << "max ratio " << fmt17(s.base.max_ratio) << '\n'
       << "refined max ratio " << fmt17(s.refined.max_ratio) << '\n'
       << "change factor " << fmt17(s.change) << ", stable under refinement: " << (s.stable ? "yes" : "no") << '\n';
  return s.stable ? kExitOk : kExitFailure;
}

int cmd_verify(const RunConfig& cfg, std::ostream& data, std::ostream& info) {
  const Corpus corpus = cfg.corpus.empty() ? Corpus::default_corpus(cfg.seed) : Corpus::make(cfg.corpus, cfg.seed);
  const std::vector<std::string> suites = cfg.suites.empty() ? suite_names() : cfg.suites;
  std::vector<SuiteReport> reports;
  for (const auto& s : suites) {
    if (s == "coeff_bound") {
      reports.push_back(coeff_bound_suite(corpus, cfg.coefficient_radius, cfg.verify));
    } else if (s == "bnw") {
      reports.push_back(bnw_suite(corpus, cfg.verify));
    } else if (s == "appendix") {
      reports.push_back(appendix_suite(corpus, cfg.verify));
    } else if (s == "decay") {
      reports.push_back(decay_suite(corpus, cfg.verify));
    } else {
      throw ConfigError("unknown suite '" + s + "'");
    }
  }
  bool ok = true;
  std::ostringstream os;
  os << "{\"corpus_hash\":\"" << corpus.hash() << "\",\"reports\":[";
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const SuiteReport& r = reports[k];
    os << (k ? "," : "") << r.to_json();
    const bool pass = r.passed() && r.constants_finite();
    ok = ok && pass;
    info << r.suite << ": " << (pass ? "pass" : "FAIL") << " (" << r.cases << " cases, " << r.failures.size()
         << " failures)\n";
    for (const auto& f : r.failures) info << "  " << f.case_name << ": " << f.detail << '\n';
    if (r.suite == "bnw")
      for (const char* key : {"C_M", "C_M_derivative"})
        if (r.constants.count(key)) info << "  " << key << " = " << fmt17(r.constants.at(key)) << '\n';
    if (r.suite == "coeff_bound" && r.constants.count("max_ratio"))
      info << "  max_ratio = " << fmt17(r.constants.at("max_ratio")) << '\n';
  }
  os << "]}\n";
  data << os.str();
  return ok ? kExitOk : kExitFailure;
}

}  // namespace szego::cli
