#include "trisolve/config.hpp"

#include "trisolve/errors.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace trisolve {

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : std::runtime_error("config line " + std::to_string(line) + (field.empty() ? "" : ", field '" + field + "'") +
                         ": " + message),
      line_(line), field_(std::move(field)) {}

namespace {

class ValueParser {
public:
  ValueParser(const std::string& text, int line, std::string field)
      : text_(text), line_(line), field_(std::move(field)) {}

  ConfigValue parse_all() {
    ConfigValue v = parse_value();
    skip_ws();
    if (pos_ != text_.size())
      fail("unexpected trailing characters '" + text_.substr(pos_) + "'");
    return v;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(line_, field_, msg); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c)
      fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string parse_key() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                                   text_[pos_] == '-'))
      ++pos_;
    if (start == pos_)
      fail("expected a key");
    return text_.substr(start, pos_ - start);
  }

  ConfigValue parse_value() {
    ConfigValue v;
    v.line = line_;
    const char c = peek();
    if (c == '[') {
      ++pos_;
      ConfigValue::List list;
      if (peek() == ']') {
        ++pos_;
      } else {
        for (;;) {
          list.push_back(parse_value());
          const char d = peek();
          ++pos_;
          if (d == ']')
            break;
          if (d != ',')
            fail("expected ',' or ']' in list");
        }
      }
      v.data = std::move(list);
    } else if (c == '{') {
      ++pos_;
      ConfigValue::Table table;
      if (peek() == '}') {
        ++pos_;
      } else {
        for (;;) {
          const std::string key = parse_key();
          expect('=');
          if (table.count(key))
            fail("duplicate key '" + key + "' in table");
          table[key] = parse_value();
          const char d = peek();
          ++pos_;
          if (d == '}')
            break;
          if (d != ',')
            fail("expected ',' or '}' in table");
        }
      }
      v.data = std::move(table);
    } else if (c == '"') {
      ++pos_;
      const std::size_t end = text_.find('"', pos_);
      if (end == std::string::npos)
        fail("unterminated string");
      v.data = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
    } else if (c == '\0') {
      fail("missing value");
    } else {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != '}' &&
             !std::isspace(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      const std::string token = text_.substr(start, pos_ - start);
      std::size_t used = 0;
      double number = 0.0;
      bool numeric = false;
      try {
        number = std::stod(token, &used);
        numeric = used == token.size();
      } catch (const std::exception&) {
        numeric = false;
      }
      if (numeric) {
        v.data = number;
      } else if (std::isalpha(static_cast<unsigned char>(token[0]))) {
        v.data = token;
        v.bare = true;
      } else {
        fail("cannot parse value '" + token + "'");
      }
    }
    return v;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_;
  std::string field_;
};

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"')
      in_string = !in_string;
    else if (line[i] == '#' && !in_string)
      return line.substr(0, i);
  }
  return line;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// typed accessors with field diagnostics
double as_number(const ConfigValue& v, const std::string& field) {
  if (!v.is_number())
    throw ConfigError(v.line, field, "expected a number");
  return std::get<double>(v.data);
}

int as_int(const ConfigValue& v, const std::string& field) {
  const double d = as_number(v, field);
  if (d != std::floor(d) || std::abs(d) > 1e9)
    throw ConfigError(v.line, field, "expected an integer");
  return static_cast<int>(d);
}

std::string as_string(const ConfigValue& v, const std::string& field) {
  if (!v.is_string())
    throw ConfigError(v.line, field, "expected a string");
  return std::get<std::string>(v.data);
}

std::vector<double> as_numbers(const ConfigValue& v, const std::string& field) {
  if (!v.is_list())
    throw ConfigError(v.line, field, "expected a list of numbers");
  std::vector<double> out;
  for (const auto& item : std::get<ConfigValue::List>(v.data))
    out.push_back(as_number(item, field));
  return out;
}

std::vector<int> as_ints(const ConfigValue& v, const std::string& field) {
  if (!v.is_list())
    throw ConfigError(v.line, field, "expected a list of integers");
  std::vector<int> out;
  for (const auto& item : std::get<ConfigValue::List>(v.data))
    out.push_back(as_int(item, field));
  return out;
}

const ConfigValue::Table& as_table(const ConfigValue& v, const std::string& field) {
  if (!v.is_table())
    throw ConfigError(v.line, field, "expected an inline table { ... }");
  return std::get<ConfigValue::Table>(v.data);
}

void require_keys(const ConfigValue::Table& t, const std::set<std::string>& allowed, int line,
                  const std::string& field) {
  for (const auto& [k, _] : t)
    if (!allowed.count(k))
      throw ConfigError(line, field + "." + k, "unknown key");
}

FieldConfig parse_field(const ConfigValue& v, const std::string& field) {
  FieldConfig fc;
  if (v.is_number()) {
    fc.kind = CoefficientField::Kind::constant;
    fc.value = as_number(v, field);
    return fc;
  }
  const auto& t = as_table(v, field);
  if (t.count("base")) {
    require_keys(t, {"base", "slope"}, v.line, field);
    fc.kind = CoefficientField::Kind::affine;
    fc.value = as_number(t.at("base"), field + ".base");
    if (!t.count("slope"))
      throw ConfigError(v.line, field + ".slope", "affine field needs a slope list");
    fc.slope = as_numbers(t.at("slope"), field + ".slope");
    return fc;
  }
  if (t.count("values")) {
    require_keys(t, {"values", "divisions"}, v.line, field);
    fc.kind = CoefficientField::Kind::sampled;
    fc.values = as_numbers(t.at("values"), field + ".values");
    if (!t.count("divisions"))
      throw ConfigError(v.line, field + ".divisions", "sampled field needs grid divisions");
    fc.divisions = as_ints(t.at("divisions"), field + ".divisions");
    return fc;
  }
  throw ConfigError(v.line, field, "field must be a number, {base, slope} or {divisions, values}");
}

NonlinearityConfig parse_nonlinearity(const ConfigValue& v, const std::string& field) {
  const auto& t = as_table(v, field);
  NonlinearityConfig nc;
  auto spatial = [&](const char* key) {
    if (t.count(key))
      nc.spatial = parse_field(t.at(key), field + "." + key);
  };
  if (t.count("expr")) {
    require_keys(t, {"expr", "q", "C", "beta"}, v.line, field);
    nc.kind = NonlinearityConfig::Kind::analytic;
    nc.expr = as_string(t.at("expr"), field + ".expr");
    bool known = false;
    for (const auto& name : Nonlinearity::catalog())
      known = known || name == nc.expr;
    if (!known)
      throw ConfigError(v.line, field + ".expr", "unknown analytic form '" + nc.expr + "'");
    if (!t.count("q"))
      throw ConfigError(v.line, field + ".q", "analytic nonlinearity needs a declared growth exponent q");
    if (!t.count("C"))
      throw ConfigError(v.line, field + ".C", "analytic nonlinearity needs a declared growth constant C");
    nc.q = as_number(t.at("q"), field + ".q");
    nc.C = as_number(t.at("C"), field + ".C");
    spatial("beta");
    return nc;
  }
  if (t.count("poly")) {
    require_keys(t, {"poly", "beta"}, v.line, field);
    nc.kind = NonlinearityConfig::Kind::polynomial;
    nc.poly = as_numbers(t.at("poly"), field + ".poly");
    if (nc.poly.empty())
      throw ConfigError(v.line, field + ".poly", "polynomial needs at least one coefficient");
    spatial("beta");
    return nc;
  }
  require_keys(t, {"a", "b", "c", "beta"}, v.line, field);
  nc.kind = NonlinearityConfig::Kind::cubic;
  for (const char* key : {"a", "b", "c"})
    if (!t.count(key))
      throw ConfigError(v.line, field + "." + key, "missing cubic coefficient");
  nc.a = as_number(t.at("a"), field + ".a");
  nc.b = as_number(t.at("b"), field + ".b");
  nc.c = as_number(t.at("c"), field + ".c");
  spatial("beta");
  return nc;
}

} // namespace

std::map<std::string, ConfigValue> parse_config_text(const std::string& text) {
  std::map<std::string, ConfigValue> out;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty())
      continue;
    if (line.front() == '[' && line.find('=') == std::string::npos) {
      if (line.back() != ']')
        throw ConfigError(line_no, "", "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(line_no, "", "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line_no, "", "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError(line_no, "", "missing key before '='");
    const std::string full = section.empty() ? key : section + "." + key;
    if (out.count(full))
      throw ConfigError(line_no, full, "duplicate key");
    const std::string value_text = line.substr(eq + 1);
    out[full] = ValueParser(value_text, line_no, full).parse_all();
  }
  return out;
}

CoefficientField FieldConfig::build(const Box& box) const {
  switch (kind) {
  case CoefficientField::Kind::constant:
    return CoefficientField::constant(box, value);
  case CoefficientField::Kind::affine:
    return CoefficientField::affine(box, value, slope);
  case CoefficientField::Kind::sampled:
    return CoefficientField::sampled(box, divisions, values);
  }
  throw ParameterError("unknown field kind");
}

Nonlinearity NonlinearityConfig::build(const Box& box) const {
  const CoefficientField s = spatial.build(box);
  switch (kind) {
  case Kind::cubic:
    return Nonlinearity::cubic(s, a, b, c);
  case Kind::polynomial:
    return Nonlinearity::polynomial(s, poly);
  case Kind::analytic:
    return Nonlinearity::analytic(s, expr, q, C);
  }
  throw ParameterError("unknown nonlinearity kind");
}

std::optional<std::array<double, 3>> NonlinearityConfig::cubic_coefficients() const {
  if (kind == Kind::cubic)
    return std::array<double, 3>{a, b, c};
  if (kind == Kind::polynomial && poly.size() == 3)
    return std::array<double, 3>{poly[0], poly[1], -poly[2]};
  return std::nullopt;
}

Box ExperimentConfig::box() const {
  Box b;
  b.dim = dim;
  for (int k = 0; k < dim; ++k)
    b.extents[static_cast<std::size_t>(k)] = extents[static_cast<std::size_t>(k)];
  return b;
}

std::shared_ptr<const Mesh> ExperimentConfig::mesh() const {
  return std::make_shared<const Mesh>(build_box_mesh(dim, divisions, extents));
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  const auto kv = parse_config_text(text);
  static const std::set<std::string> known{
      "domain.dim",         "domain.divisions",      "domain.extents",       "problem.p",
      "problem.alpha",      "problem.f",             "problem.g",            "problem.lambda",
      "problem.mu",         "sweep.lambda_interval", "sweep.lambda_count",   "sweep.mu_schedule",
      "sweep.workers",      "solver.newton_tol",     "solver.max_iter",      "solver.deflation_power",
      "solver.deflation_shift", "solver.distinct_tol", "solver.seed",        "solver.random_guesses",
      "solver.max_solutions", "solver.threads",      "output.dir"};
  for (const auto& [key, value] : kv)
    if (!known.count(key))
      throw ConfigError(value.line, key, "unknown key");

  ExperimentConfig cfg;
  auto get = [&](const std::string& key) -> const ConfigValue* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto require = [&](const std::string& key) -> const ConfigValue& {
    const ConfigValue* v = get(key);
    if (!v)
      throw ConfigError(0, key, "required key is missing");
    return *v;
  };

  cfg.dim = as_int(require("domain.dim"), "domain.dim");
  if (cfg.dim != 2 && cfg.dim != 3)
    throw ConfigError(require("domain.dim").line, "domain.dim", "dimension must be 2 or 3");
  cfg.divisions = as_ints(require("domain.divisions"), "domain.divisions");
  cfg.extents = as_numbers(require("domain.extents"), "domain.extents");
  if (static_cast<int>(cfg.divisions.size()) != cfg.dim)
    throw ConfigError(require("domain.divisions").line, "domain.divisions", "need one entry per dimension");
  if (static_cast<int>(cfg.extents.size()) != cfg.dim)
    throw ConfigError(require("domain.extents").line, "domain.extents", "need one entry per dimension");
  for (int d : cfg.divisions)
    if (d < 1)
      throw ConfigError(require("domain.divisions").line, "domain.divisions", "divisions must be >= 1");
  for (double e : cfg.extents)
    if (!(e > 0.0))
      throw ConfigError(require("domain.extents").line, "domain.extents", "extents must be positive");

  cfg.p = as_number(require("problem.p"), "problem.p");
  if (!(cfg.p > 1.0) || cfg.p > cfg.dim)
    throw ConfigError(require("problem.p").line, "problem.p", "need 1 < p <= dim");
  cfg.alpha = parse_field(require("problem.alpha"), "problem.alpha");
  cfg.f = parse_nonlinearity(require("problem.f"), "problem.f");
  if (const auto* v = get("problem.g"))
    cfg.g = parse_nonlinearity(*v, "problem.g");
  if (const auto* v = get("problem.lambda"))
    cfg.lambda = as_number(*v, "problem.lambda");
  if (const auto* v = get("problem.mu"))
    cfg.mu = as_number(*v, "problem.mu");

  if (const auto* v = get("sweep.lambda_interval")) {
    if (v->is_string() && std::get<std::string>(v->data) == "auto") {
      cfg.lambda_auto = true;
    } else {
      const auto ab = as_numbers(*v, "sweep.lambda_interval");
      if (ab.size() != 2 || !(ab[0] <= ab[1]))
        throw ConfigError(v->line, "sweep.lambda_interval", "expected [a, b] with a <= b, or \"auto\"");
      cfg.lambda_auto = false;
      cfg.lambda_a = ab[0];
      cfg.lambda_b = ab[1];
    }
  }
  if (const auto* v = get("sweep.lambda_count")) {
    cfg.lambda_count = as_int(*v, "sweep.lambda_count");
    if (cfg.lambda_count < 1)
      throw ConfigError(v->line, "sweep.lambda_count", "must be >= 1");
  }
  if (const auto* v = get("sweep.mu_schedule")) {
    cfg.mu_schedule = as_numbers(*v, "sweep.mu_schedule");
    for (std::size_t i = 0; i < cfg.mu_schedule.size(); ++i)
      if (!(cfg.mu_schedule[i] > 0.0) || (i > 0 && !(cfg.mu_schedule[i] > cfg.mu_schedule[i - 1])))
        throw ConfigError(v->line, "sweep.mu_schedule", "must be positive and strictly increasing");
  }
  if (const auto* v = get("sweep.workers"))
    cfg.workers = std::max(1, as_int(*v, "sweep.workers"));

  SolverConfig& s = cfg.solver;
  if (const auto* v = get("solver.newton_tol"))
    s.newton_tol = as_number(*v, "solver.newton_tol");
  if (const auto* v = get("solver.max_iter"))
    s.max_iter = as_int(*v, "solver.max_iter");
  if (const auto* v = get("solver.deflation_power"))
    s.deflation_power = as_number(*v, "solver.deflation_power");
  if (const auto* v = get("solver.deflation_shift"))
    s.deflation_shift = as_number(*v, "solver.deflation_shift");
  if (const auto* v = get("solver.distinct_tol"))
    s.distinct_tol = as_number(*v, "solver.distinct_tol");
  if (const auto* v = get("solver.seed")) {
    const int seed = as_int(*v, "solver.seed");
    if (seed < 0)
      throw ConfigError(v->line, "solver.seed", "must be nonnegative");
    s.rng_seed = static_cast<std::uint64_t>(seed);
  }
  if (const auto* v = get("solver.random_guesses"))
    s.random_guesses = as_int(*v, "solver.random_guesses");
  if (const auto* v = get("solver.max_solutions"))
    s.max_solutions = as_int(*v, "solver.max_solutions");
  if (const auto* v = get("solver.threads"))
    cfg.threads = std::max(1, as_int(*v, "solver.threads"));
  try {
    s.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(0, "solver", e.what());
  }
  if (const auto* v = get("output.dir"))
    cfg.output_dir = as_string(*v, "output.dir");

  // field shapes must match the domain
  const Box box = cfg.box();
  try {
    cfg.alpha.build(box);
    cfg.f.build(box);
    if (cfg.g)
      cfg.g->build(box);
  } catch (const ParameterError& e) {
    throw ConfigError(0, "problem", e.what());
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError(0, "", "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

} // namespace trisolve
