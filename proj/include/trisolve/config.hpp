#pragma once

#include "trisolve/coefficient_field.hpp"
#include "trisolve/mesh.hpp"
#include "trisolve/nonlinearity.hpp"
#include "trisolve/solver.hpp"

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace trisolve {

/// Malformed experiment configuration; carries the offending line and field.
class ConfigError : public std::runtime_error {
public:
  ConfigError(int line, std::string field, const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

private:
  int line_;
  std::string field_;
};

/// A value in the configuration file: number, string, bare word, list or
/// inline table.
struct ConfigValue {
  using List = std::vector<ConfigValue>;
  using Table = std::map<std::string, ConfigValue>;
  std::variant<double, std::string, List, Table> data;
  bool bare = false; // unquoted word such as auto/true/false
  int line = 0;

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_list() const { return std::holds_alternative<List>(data); }
  bool is_table() const { return std::holds_alternative<Table>(data); }
};

/// `[section]` headers and `key = value` lines; `#` starts a comment.
/// Keys are stored as "section.key".
std::map<std::string, ConfigValue> parse_config_text(const std::string& text);

/// Spatial coefficient: number (constant), {base, slope} (affine) or
/// {divisions, values} (sampled on the structured grid).
struct FieldConfig {
  CoefficientField::Kind kind = CoefficientField::Kind::constant;
  double value = 1.0;
  std::vector<double> slope;
  std::vector<int> divisions;
  std::vector<double> values;

  CoefficientField build(const Box& box) const;
};

struct NonlinearityConfig {
  enum class Kind { cubic, polynomial, analytic };
  Kind kind = Kind::cubic;
  FieldConfig spatial;
  double a = 0.0, b = 0.0, c = 0.0;
  std::vector<double> poly;
  std::string expr;
  double q = 1.0;
  double C = 1.0;

  Nonlinearity build(const Box& box) const;
  /// (a, b, c) when h = a xi + b xi^2 - c xi^3 exactly.
  std::optional<std::array<double, 3>> cubic_coefficients() const;
};

struct ExperimentConfig {
  int dim = 2;
  std::vector<int> divisions{32, 32};
  std::vector<double> extents{1.0, 1.0};
  FieldConfig alpha;
  double p = 2.0;
  NonlinearityConfig f;
  std::optional<NonlinearityConfig> g;
  std::optional<double> lambda;
  double mu = 0.0;

  bool lambda_auto = true;
  double lambda_a = 0.0;
  double lambda_b = 0.0;
  int lambda_count = 11;
  std::vector<double> mu_schedule;

  SolverConfig solver;
  int threads = 1;
  int workers = 1;
  std::string output_dir = "out";

  Box box() const;
  std::shared_ptr<const Mesh> mesh() const;
};

ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

} // namespace trisolve
