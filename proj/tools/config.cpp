#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace logsp::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

double parse_number(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw ConfigError(where + ": bad number '" + text + "'");
  return v;
}

Value parse_value(const std::string& raw, const std::string& where) {
  const std::string text = trim(raw);
  if (text.empty()) throw ConfigError(where + ": missing value");
  if (text == "true") return true;
  if (text == "false") return false;
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') throw ConfigError(where + ": unterminated string");
    return text.substr(1, text.size() - 2);
  }
  if (text.front() == '[') {
    if (text.back() != ']') throw ConfigError(where + ": unterminated array");
    std::vector<double> out;
    std::stringstream items(text.substr(1, text.size() - 2));
    std::string item;
    while (std::getline(items, item, ',')) {
      if (trim(item).empty()) continue;
      out.push_back(parse_number(trim(item), where));
    }
    return out;
  }
  return parse_number(text, where);
}

const char* type_name(const Value& v) {
  switch (v.index()) {
    case 0: return "number";
    case 1: return "boolean";
    case 2: return "string";
    default: return "array";
  }
}

}  // namespace

ConfigTable ConfigTable::parse(const std::string& text) {
  ConfigTable table;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + ": bad section header");
      section = trim(body.substr(1, body.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (table.values_.count(full)) throw ConfigError(where + ": duplicate key " + full);
    table.values_[full] = parse_value(body.substr(eq + 1), where + " (" + full + ")");
  }
  return table;
}

ConfigTable ConfigTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const Value* ConfigTable::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  used_[key] = true;
  return &it->second;
}

double ConfigTable::number(const std::string& key, double fallback) const {
  const Value* v = find(key);
  if (!v) return fallback;
  if (const double* d = std::get_if<double>(v)) return *d;
  throw ConfigError(key + ": expected number, got " + type_name(*v));
}

long ConfigTable::integer(const std::string& key, long fallback) const {
  const double d = number(key, double(fallback));
  if (d != std::floor(d) || std::abs(d) > 9.0e15) throw ConfigError(key + ": expected an integer");
  return long(d);
}

bool ConfigTable::boolean(const std::string& key, bool fallback) const {
  const Value* v = find(key);
  if (!v) return fallback;
  if (const bool* b = std::get_if<bool>(v)) return *b;
  throw ConfigError(key + ": expected boolean, got " + type_name(*v));
}

std::string ConfigTable::string(const std::string& key, const std::string& fallback) const {
  const Value* v = find(key);
  if (!v) return fallback;
  if (const std::string* s = std::get_if<std::string>(v)) return *s;
  throw ConfigError(key + ": expected string, got " + type_name(*v));
}

std::vector<double> ConfigTable::numbers(const std::string& key, const std::vector<double>& fallback) const {
  const Value* v = find(key);
  if (!v) return fallback;
  if (const auto* a = std::get_if<std::vector<double>>(v)) return *a;
  if (const double* d = std::get_if<double>(v)) return {*d};
  throw ConfigError(key + ": expected array of numbers, got " + type_name(*v));
}

void ConfigTable::reject_unused() const {
  for (const auto& [key, value] : values_) {
    if (!used_.count(key)) throw ConfigError("unknown config key " + key);
  }
}

RunConfig RunConfig::from_table(const ConfigTable& t) {
  RunConfig c;
  const long seed = t.integer("seed", 1);
  if (seed < 0) throw ConfigError("seed must be non-negative");
  c.seed = static_cast<unsigned long long>(seed);
  c.L = t.number("domain.L", c.L);
  c.N = t.integer("grid.N", c.N);
  c.p = t.number("model.p", c.p);
  c.alpha0 = t.number("model.alpha0", c.alpha0);

  c.symmetry_kind = t.string("symmetry.kind", c.symmetry_kind);
  c.symmetry_k = int(t.integer("symmetry.k", c.symmetry_k));
  c.require_exact = t.boolean("symmetry.require_exact", c.require_exact);

  c.potential_kind = t.string("potential.kind", c.potential_kind);
  c.v0 = t.number("potential.v0", c.v0);
  c.v_amplitude = t.number("potential.amplitude", c.v_amplitude);
  c.v_width = t.number("potential.width", c.v_width);
  c.v_k = int(t.integer("potential.k", c.v_k));

  c.family = t.string("nonlinearity.family", c.family);
  c.lambda = t.number("nonlinearity.lambda", c.lambda);
  c.b = t.number("nonlinearity.b", c.b);
  c.q_pow = t.number("nonlinearity.q_pow", c.q_pow);
  c.gamma = t.number("nonlinearity.gamma", c.gamma);

  SolveConfig& s = c.solver;
  const std::string method = t.string("solver.method", "nehari");
  if (method == "nehari") s.method = SolveMethod::Nehari;
  else if (method == "mountain_pass") s.method = SolveMethod::MountainPass;
  else throw ConfigError("solver.method must be nehari or mountain_pass");
  s.max_iter = int(t.integer("solver.max_iter", s.max_iter));
  s.eta0 = t.number("solver.eta0", s.eta0);
  s.armijo = t.number("solver.armijo", s.armijo);
  s.max_backtracks = int(t.integer("solver.max_backtracks", s.max_backtracks));
  s.rel_tol = t.number("solver.rel_tol", s.rel_tol);
  s.sym_tol = t.number("solver.sym_tol", s.sym_tol);
  const std::string init = t.string("solver.init", "ring");
  if (init == "ring") s.init = InitKind::Ring;
  else if (init == "random") s.init = InitKind::RandomSymmetric;
  else if (init == "file") s.init = InitKind::File;
  else throw ConfigError("solver.init must be ring, random or file");
  s.ring_radius = t.number("solver.ring_radius", s.ring_radius);
  s.ring_width = t.number("solver.ring_width", s.ring_width);
  s.ring_amplitude = t.number("solver.ring_amplitude", s.ring_amplitude);
  s.random_support = t.number("solver.random_support", s.random_support);
  s.init_file = t.string("solver.init_file", s.init_file);
  s.path_nodes = int(t.integer("solver.path_nodes", s.path_nodes));
  s.reparam_every = int(t.integer("solver.reparam_every", s.reparam_every));
  s.seed = c.seed;

  c.verify.fields = int(t.integer("verify.fields", c.verify.fields));
  c.verify.support_radius = t.number("verify.support_radius", c.verify.support_radius);
  c.verify.bench_n = int(t.integer("verify.bench_n", c.verify.bench_n));
  c.verify.fiber_t_max = t.number("verify.fiber_t_max", c.verify.fiber_t_max);

  c.moser.n_list = t.numbers("moser.n_list", c.moser.n_list);
  c.moser.q = t.number("moser.q", c.moser.q);
  c.moser.margin = t.number("moser.margin", c.moser.margin);

  std::vector<double> sizes(c.bench.sizes.begin(), c.bench.sizes.end());
  sizes = t.numbers("bench.sizes", sizes);
  c.bench.sizes.clear();
  for (double v : sizes) {
    if (v != std::floor(v)) throw ConfigError("bench.sizes must be integers");
    c.bench.sizes.push_back(long(v));
  }
  c.bench.repeats = int(t.integer("bench.repeats", c.bench.repeats));

  c.flip_a2_sign = t.boolean("debug.flip_a2_sign", false);
  t.reject_unused();

  if (c.verify.fields < 1) throw ConfigError("verify.fields must be >= 1");
  if (!(c.verify.support_radius > 0)) throw ConfigError("verify.support_radius must be > 0");
  if (c.verify.bench_n < 4 || c.verify.bench_n % 2) throw ConfigError("verify.bench_n must be even and >= 4");
  if (!(c.verify.fiber_t_max > 0)) throw ConfigError("verify.fiber_t_max must be > 0");
  if (c.moser.n_list.empty()) throw ConfigError("moser.n_list is empty");
  if (!(c.moser.margin >= 0)) throw ConfigError("moser.margin must be >= 0");
  if (c.bench.repeats < 1) throw ConfigError("bench.repeats must be >= 1");
  for (long n : c.bench.sizes) {
    if (n < 4 || n % 2) throw ConfigError("bench.sizes entries must be even and >= 4");
  }
  if (c.symmetry_kind != "rotation" && c.symmetry_kind != "dihedral") {
    throw ConfigError("symmetry.kind must be rotation or dihedral");
  }

  // Module preconditions, checked before anything expensive runs.
  try {
    c.solver.validate();
    const Grid g = c.grid();
    const SymmetryGroup G = c.group();
    const Potential V = c.potential();
    const auto check = check_potential(V, g);
    if (!check.ok()) throw ConfigError("potential violates V >= 0 or boundary coercivity on this grid");
    (void)c.nonlinearity();
    if (c.p < 2) throw ConfigError("model.p must be >= 2");
    if (G.exact_on_grid()) {
      const Field Vf = V.sample(g);
      if (symmetry_defect(G, Vf) > c.solver.sym_tol) {
        throw ConfigError("potential is not invariant under " + G.name());
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) { return from_table(ConfigTable::load(path)); }

Grid RunConfig::grid() const { return Grid(L, N); }

Potential RunConfig::potential() const {
  if (potential_kind == "constant") return Potential::constant(v0);
  if (potential_kind == "radial") return Potential::radial(v0, v_amplitude, v_width);
  if (potential_kind == "k_symmetric") return Potential::k_symmetric(v0, v_amplitude, v_width, v_k);
  throw ConfigError("potential.kind must be constant, radial or k_symmetric");
}

Nonlinearity RunConfig::nonlinearity() const {
  if (family == "critical_exp") return Nonlinearity::critical_exp(lambda, alpha0);
  if (family == "subcritical_power") return Nonlinearity::subcritical_power(b, q_pow);
  if (family == "subcritical_exp") return Nonlinearity::subcritical_exp(lambda, alpha0, gamma);
  throw ConfigError("nonlinearity.family must be critical_exp, subcritical_power or subcritical_exp");
}

SymmetryGroup RunConfig::group() const {
  return symmetry_kind == "dihedral" ? SymmetryGroup::dihedral(symmetry_k) : SymmetryGroup::rotation(symmetry_k);
}

Model RunConfig::model() const { return Model(grid(), potential(), nonlinearity(), p, flip_a2_sign); }

}  // namespace logsp::cli
