#include "nlse/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nlse {

const char* to_string(Command c) {
  switch (c) {
    case Command::Potential: return "potential";
    case Command::Groundstate: return "groundstate";
    case Command::Dynamics: return "dynamics";
    case Command::ReproduceTable: return "reproduce-table";
  }
  return "?";
}

Command parse_command(const std::string& s) {
  for (auto c : {Command::Potential, Command::Groundstate, Command::Dynamics, Command::ReproduceTable})
    if (s == to_string(c)) return c;
  throw ConfigError("unknown command '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> k{
      {"run",
       {"command", "kernel", "epsilon", "L", "N", "method", "tol", "beta", "potential", "gamma", "amplitude", "out", "full", "demo"}},
      {"density", {"sigma", "anisotropy"}},
      {"groundstate", {"tau", "eps0", "max_steps", "inner_tol", "inner_max", "coarse_levels", "track_energy"}},
      {"dynamics", {"tau", "t_end", "order", "trace_every", "snapshots"}},
      {"table", {"id", "full"}},
  };
  return k;
}

class Entries {
 public:
  void add(const std::string& section, const std::string& key, const std::string& value, int line) {
    const auto& k = known_keys();
    auto it = k.find(section);
    if (it == k.end()) throw ConfigError("line " + std::to_string(line) + ": unknown section [" + section + "]");
    if (!it->second.count(key))
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "' in [" + section + "]");
    const std::string name = qualified(section, key);
    if (values_.count(name)) throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + name + "'");
    values_[name] = value;
  }

  bool has(const std::string& name) const { return values_.count(name) > 0; }
  const std::string& raw(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw ConfigError("missing required key '" + name + "'");
    return it->second;
  }

  double number(const std::string& name) const { return to_double(name, raw(name)); }
  int integer(const std::string& name) const { return to_int(name, raw(name)); }
  bool boolean(const std::string& name) const {
    const std::string& v = raw(name);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + name + "': expected a boolean, got '" + v + "'");
  }
  std::vector<double> numbers(const std::string& name) const {
    std::vector<double> out;
    for (const auto& s : split_list(raw(name))) out.push_back(to_double(name, s));
    return out;
  }
  std::vector<int> integers(const std::string& name) const {
    std::vector<int> out;
    for (const auto& s : split_list(raw(name))) out.push_back(to_int(name, s));
    return out;
  }

  template <class T>
  void maybe(const std::string& name, T& dst) const {
    if (!has(name)) return;
    if constexpr (std::is_same_v<T, double>)
      dst = number(name);
    else if constexpr (std::is_same_v<T, int>)
      dst = integer(name);
    else if constexpr (std::is_same_v<T, bool>)
      dst = boolean(name);
    else
      dst = raw(name);
  }

  static std::string qualified(const std::string& section, const std::string& key) {
    return section == "run" ? key : section + "." + key;
  }

 private:
  static double to_double(const std::string& name, const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + name + "': expected a number, got '" + s + "'");
  }
  static int to_int(const std::string& name, const std::string& s) {
    int v = 0;
    const auto* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, v);
    if (r.ec != std::errc() || r.ptr != end) throw ConfigError("key '" + name + "': expected an integer, got '" + s + "'");
    return v;
  }

  std::map<std::string, std::string> values_;
};

Entries tokenize(const std::string& text) {
  Entries e;
  std::string section = "run";
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_keys().count(section))
        throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key '" + key + "' has no value");
    e.add(section, key, value, lineno);
  }
  return e;
}

template <class T>
std::vector<T> per_axis(const std::vector<T>& v, int dim, const char* name) {
  if (static_cast<int>(v.size()) == dim) return v;
  if (v.size() == 1) return std::vector<T>(dim, v[0]);
  throw ConfigError(std::string("key '") + name + "': expected 1 or " + std::to_string(dim) + " values");
}

}  // namespace

RunConfig parse_config(const std::string& text, std::optional<Command> command) {
  const Entries e = tokenize(text);
  RunConfig c;
  c.source = text;
  if (e.has("command")) {
    c.command = parse_command(e.raw("command"));
    if (command && *command != c.command)
      throw ConfigError(std::string("config is for command '") + to_string(c.command) + "', not '" +
                        to_string(*command) + "'");
  } else if (command) {
    c.command = *command;
  }
  e.maybe("out", c.out);
  e.maybe("full", c.full);
  e.maybe("tol", c.tol);
  if (!(c.tol > 0.0)) throw ConfigError("key 'tol': must be positive");

  if (c.command == Command::ReproduceTable) {
    c.table.id = e.integer("table.id");
    if (e.has("table.full")) c.full = e.boolean("table.full");
    return c;
  }
  if (e.has("demo")) {
    c.demo = e.raw("demo");
    if (c.demo != "honeycomb") throw ConfigError("key 'demo': expected honeycomb, got '" + c.demo + "'");
    if (c.command != Command::Dynamics) throw ConfigError("key 'demo': only valid for the dynamics command");
    return c;
  }

  c.kernel.family = parse_kernel_family(e.raw("kernel"));
  if (e.has("epsilon")) c.kernel.epsilon = e.number("epsilon");
  c.kernel.validate();
  const int dim = c.kernel.dim();

  c.grid = make_grid(dim, per_axis(e.numbers("L"), dim, "L"), per_axis(e.integers("N"), dim, "N"));

  c.method = default_method(c.kernel.family);
  if (e.has("method")) {
    const std::string m = e.raw("method");
    try {
      if (m != "nufft") c.method = parse_potential_method(m);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(std::string("key 'method': ") + ex.what());
    }
  }
  e.maybe("beta", c.beta);

  if (e.has("potential")) {
    const std::string v = e.raw("potential");
    if (v == "harmonic")
      c.V.kind = ExternalPotential::Kind::Harmonic;
    else if (v == "zero")
      c.V.kind = ExternalPotential::Kind::Zero;
    else if (v == "honeycomb")
      c.V.kind = ExternalPotential::Kind::Honeycomb;
    else
      throw ConfigError("key 'potential': expected harmonic, zero or honeycomb, got '" + v + "'");
  }
  if (c.V.kind == ExternalPotential::Kind::Honeycomb && dim != 2)
    throw ConfigError("key 'potential': honeycomb needs a two-dimensional kernel");
  if (e.has("gamma")) {
    const auto g = per_axis(e.numbers("gamma"), dim, "gamma");
    for (int a = 0; a < dim; ++a) c.V.gamma[a] = g[a];
  }
  e.maybe("amplitude", c.V.amplitude);

  c.density.dim = dim;
  e.maybe("density.sigma", c.density.sigma);
  e.maybe("density.anisotropy", c.density.gamma);
  c.density.validate();

  e.maybe("groundstate.tau", c.gs.tau);
  e.maybe("groundstate.eps0", c.gs.eps0);
  e.maybe("groundstate.max_steps", c.gs.max_steps);
  e.maybe("groundstate.inner_tol", c.gs.inner_tol);
  e.maybe("groundstate.inner_max", c.gs.inner_max);
  e.maybe("groundstate.coarse_levels", c.gs.coarse_levels);
  e.maybe("groundstate.track_energy", c.gs.track_energy);

  e.maybe("dynamics.tau", c.dyn.tau);
  if (c.command == Command::Dynamics)
    c.dyn.t_end = e.number("dynamics.t_end");
  else
    e.maybe("dynamics.t_end", c.dyn.t_end);
  e.maybe("dynamics.order", c.dyn.order);
  e.maybe("dynamics.trace_every", c.dyn.trace_every);
  if (e.has("dynamics.snapshots")) c.dyn.snapshots = e.numbers("dynamics.snapshots");

  // Surface invariant violations now rather than at run time.
  if (c.command == Command::Groundstate) c.groundstate_config().validate();
  if (c.command == Command::Dynamics) c.dynamics_config().validate();
  return c;
}

RunConfig load_config(const std::string& path, std::optional<Command> command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), command);
}

SolverOptions RunConfig::solver_options() const {
  SolverOptions o;
  o.tol = tol;
  return o;
}

GfdnConfig RunConfig::groundstate_config() const {
  GfdnConfig g;
  g.kernel = kernel;
  g.grid = grid;
  g.V = V;
  g.beta = beta;
  g.tau = gs.tau;
  g.eps0 = gs.eps0;
  g.max_steps = gs.max_steps;
  g.inner_tol = gs.inner_tol;
  g.inner_max = gs.inner_max;
  g.coarse_levels = gs.coarse_levels;
  g.track_energy = gs.track_energy;
  g.method = method;
  g.solver.tol = tol;
  return g;
}

DynamicsConfig RunConfig::dynamics_config() const {
  DynamicsConfig d;
  d.kernel = kernel;
  d.grid = grid;
  d.V = V;
  d.beta = beta;
  d.tau = dyn.tau;
  d.t_end = dyn.t_end;
  d.scheme = SplittingScheme::of_order(dyn.order);
  d.method = method;
  d.solver.tol = tol;
  d.trace_every = dyn.trace_every;
  d.snapshot_times = dyn.snapshots;
  return d;
}

}  // namespace nlse
