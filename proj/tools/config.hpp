#pragma once

// TOML-style run configuration: `[section]` headers, `key = value` lines,
// `#` comments. Arrays hold numbers only.

#include "logsp/functional.hpp"
#include "logsp/solver.hpp"
#include "logsp/symmetry.hpp"

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace logsp::cli {

/// Malformed or inconsistent configuration; maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Value = std::variant<double, bool, std::string, std::vector<double>>;

/// Flat "section.key" -> value table.
class ConfigTable {
 public:
  static ConfigTable parse(const std::string& text);
  static ConfigTable load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;

  /// Throws ConfigError naming any key that was never read.
  void reject_unused() const;

 private:
  const Value* find(const std::string& key) const;

  std::map<std::string, Value> values_;
  mutable std::map<std::string, bool> used_;
};

struct VerifySettings {
  int fields = 10;              // random fields per sampled check
  double support_radius = 0.5;  // random fields live in this disk
  int bench_n = 64;             // grid size of the direct vs fast comparison
  double fiber_t_max = 3.0;
};

struct MoserSettings {
  std::vector<double> n_list{1e4, 1e6, 1e8, 1e10};
  double q = 2.0;
  double margin = 1e-3;
};

struct BenchSettings {
  std::vector<long> sizes{16, 32, 64};
  int repeats = 3;
};

struct RunConfig {
  double L = 8.0;
  long N = 64;
  double p = 2.0;
  double alpha0 = 4.0 * 3.14159265358979323846;
  bool flip_a2_sign = false;
  unsigned long long seed = 1;

  std::string symmetry_kind = "rotation";
  int symmetry_k = 4;
  bool require_exact = false;

  std::string potential_kind = "constant";
  double v0 = 1.0, v_amplitude = 0.0, v_width = 1.0;
  int v_k = 4;

  std::string family = "critical_exp";
  double lambda = 1.0, b = 1.0, q_pow = 4.0, gamma = 1.5;

  SolveConfig solver;
  VerifySettings verify;
  MoserSettings moser;
  BenchSettings bench;

  /// Reads every key and validates module preconditions. Throws ConfigError.
  static RunConfig from_table(const ConfigTable& table);
  static RunConfig load(const std::string& path);

  Grid grid() const;
  Potential potential() const;
  Nonlinearity nonlinearity() const;
  SymmetryGroup group() const;
  Model model() const;
};

}  // namespace logsp::cli
