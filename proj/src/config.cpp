#include "dcsim/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dcsim/errors.hpp"
#include "dcsim/oracles.hpp"
#include "dcsim/snapshot.hpp"

namespace dcsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double to_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw std::invalid_argument(key + ": expected a number, got '" + text + "'");
  return x;
}

template <class Int>
Int to_int(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  Int x = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw std::invalid_argument(key + ": expected an integer, got '" + text + "'");
  return x;
}

bool to_bool(const std::string& text, const std::string& key) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw std::invalid_argument(key + ": expected true or false, got '" + text + "'");
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

Coord to_coord(const std::string& text, const std::string& key) {
  const auto parts = split(text, ',');
  if (parts.empty() || parts.size() > 2) throw std::invalid_argument(key + ": expected 1 or 2 coordinates");
  Coord c{0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < parts.size(); ++a) c[a] = to_double(parts[a], key);
  return c;
}

std::string coord_text(const Coord& c, int dim) {
  return dim == 1 ? fmt(c[0]) : fmt(c[0]) + "," + fmt(c[1]);
}

template <class T>
std::array<T, 2> to_pair(const std::string& text, const std::string& key, T second) {
  const auto parts = split(text, ',');
  if (parts.empty() || parts.size() > 2) throw std::invalid_argument(key + ": expected 1 or 2 values");
  std::array<T, 2> out{};
  if constexpr (std::is_integral_v<T>) {
    out[0] = to_int<T>(parts[0], key);
    out[1] = parts.size() > 1 ? to_int<T>(parts[1], key) : second;
  } else {
    out[0] = to_double(parts[0], key);
    out[1] = parts.size() > 1 ? to_double(parts[1], key) : second;
  }
  return out;
}

const char* kernel_name(LatticeKernel k) {
  switch (k) {
    case LatticeKernel::volume_filling: return "volume_filling";
    case LatticeKernel::pushing: return "pushing";
    case LatticeKernel::quorum_pushing: return "quorum_pushing";
  }
  return "pushing";
}

LatticeKernel to_kernel(const std::string& text) {
  for (LatticeKernel k : {LatticeKernel::volume_filling, LatticeKernel::pushing, LatticeKernel::quorum_pushing})
    if (text == kernel_name(k)) return k;
  throw std::invalid_argument("lattice.kernel: expected volume_filling, pushing or quorum_pushing");
}

const std::set<std::string> kSections = {"model", "grid", "solver", "initial", "oracles",
                                         "output", "run", "lattice", "sweep"};
const std::set<std::string> kRequired = {"model", "grid", "solver", "initial"};

void set_value(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& v) {
  const std::string name = section + "." + key;
  auto unknown = [&] { throw std::invalid_argument("unknown key '" + key + "' in [" + section + "]"); };

  if (section == "model") {
    ModelParams& p = cfg.model;
    if (key == "m") p.m = to_double(v, name);
    else if (key == "delta") p.delta = to_double(v, name);
    else if (key == "mu") p.mu = to_double(v, name);
    else if (key == "r") p.r = to_double(v, name);
    else if (key == "eps_reg") p.eps_reg = to_double(v, name);
    else if (key == "phi") p.phi = Sensitivity::parse(v);
    else unknown();
  } else if (section == "grid") {
    GridSpec& g = cfg.grid;
    if (key == "dim") g.dim = to_int<int>(v, name);
    else if (key == "cells") g.cells = to_pair<int>(v, name, 1);
    else if (key == "extent") g.extent = to_pair<double>(v, name, 0.0);
    else if (key == "origin") g.origin = to_pair<double>(v, name, 0.0);
    else unknown();
  } else if (section == "solver") {
    SolverConfig& s = cfg.solver;
    if (key == "cfl_safety") s.cfl_safety = to_double(v, name);
    else if (key == "end_time") s.end_time = to_double(v, name);
    else if (key == "output_stride") s.output_stride = to_int<std::size_t>(v, name);
    else if (key == "clip_negative") s.clip_negative = to_bool(v, name);
    else if (key == "chemo_upwind") s.chemo_upwind = to_bool(v, name);
    else if (key == "dt_max") s.dt_max = to_double(v, name);
    else if (key == "linear_tol") s.linear_tol = to_double(v, name);
    else if (key == "support_threshold") s.support_threshold = to_double(v, name);
    else if (key == "front_center") s.front_center = to_coord(v, name);
    else if (key == "v_z_stepper") {
      if (v == "explicit") s.v_z_stepper = VzStepper::explicit_euler;
      else if (v == "semi_implicit") s.v_z_stepper = VzStepper::semi_implicit;
      else throw std::invalid_argument(name + ": expected explicit or semi_implicit");
    } else if (key == "backend") {
      if (v == "reference") s.backend = Backend::reference;
      else if (v == "openmp") s.backend = Backend::openmp;
      else throw std::invalid_argument(name + ": expected reference or openmp");
    } else unknown();
  } else if (section == "initial") {
    if (key == "u") cfg.u = InitialSpec::parse(v);
    else if (key == "v") cfg.v = InitialSpec::parse(v);
    else if (key == "w") cfg.w = InitialSpec::parse(v);
    else if (key == "z") cfg.z = InitialSpec::parse(v);
    else unknown();
  } else if (section == "oracles") {
    OracleToggles& o = cfg.oracles;
    if (key == "sandwich") o.sandwich = to_bool(v, name);
    else if (key == "conservation") o.conservation = to_bool(v, name);
    else if (key == "steady") o.steady = to_bool(v, name);
    else if (key == "margin") o.margin = to_double(v, name);
    else unknown();
  } else if (section == "output") {
    if (key == "dir") cfg.output_dir = v;
    else if (key == "snapshots") cfg.write_snapshots = to_bool(v, name);
    else unknown();
  } else if (section == "run") {
    if (key == "seed") cfg.seed = to_int<std::uint64_t>(v, name);
    else unknown();
  } else if (section == "lattice") {
    if (!cfg.lattice) cfg.lattice.emplace();
    LatticeSpec& l = *cfg.lattice;
    if (key == "sites") l.sites = to_int<int>(v, name);
    else if (key == "length") l.length = to_double(v, name);
    else if (key == "u_max") l.u_max = to_int<std::int64_t>(v, name);
    else if (key == "particles") l.particles = to_int<std::int64_t>(v, name);
    else if (key == "load_site") l.load_site = to_int<int>(v, name);
    else if (key == "alpha") l.alpha = to_double(v, name);
    else if (key == "beta") l.beta = to_double(v, name);
    else if (key == "k") l.k = to_double(v, name);
    else if (key == "kernel") l.kernel = to_kernel(v);
    else if (key == "cells_per_bin") l.cells_per_bin = to_int<int>(v, name);
    else if (key == "seeds") l.seeds = to_int<int>(v, name);
    else if (key == "end_time") l.end_time = to_double(v, name);
    else unknown();
  } else {
    throw std::invalid_argument("unknown section [" + section + "]");
  }
}

void validate_initial(const InitialSpec& s, const char* field) {
  const std::string f = field;
  switch (s.kind) {
    case InitialSpec::Kind::constant:
      if (!(s.value >= 0.0) || !std::isfinite(s.value)) throw std::invalid_argument("initial." + f + ": constant must be nonnegative");
      break;
    case InitialSpec::Kind::bump:
      if (!(s.r0 > 0.0)) throw std::invalid_argument("initial." + f + ": bump r0 must be positive");
      if (!(s.height >= 0.0)) throw std::invalid_argument("initial." + f + ": bump height must be nonnegative");
      break;
    case InitialSpec::Kind::barenblatt:
      if (!(s.t > 0.0)) throw std::invalid_argument("initial." + f + ": barenblatt t must be positive");
      break;
    case InitialSpec::Kind::snapshot:
      if (!std::filesystem::exists(s.path)) throw std::invalid_argument("initial." + f + ": snapshot '" + s.path + "' does not exist");
      break;
  }
}

}  // namespace

// ------------------------------------------------------------- InitialSpec

InitialSpec InitialSpec::constant(double c) {
  InitialSpec s;
  s.value = c;
  return s;
}

InitialSpec InitialSpec::bump(const Coord& x0, double r0, double height) {
  InitialSpec s;
  s.kind = Kind::bump;
  s.x0 = x0;
  s.r0 = r0;
  s.height = height;
  return s;
}

InitialSpec InitialSpec::parse(const std::string& text) {
  std::istringstream is(text);
  std::string kind;
  is >> kind;
  InitialSpec s;
  if (kind == "constant") {
    std::string rest;
    std::getline(is, rest);
    s.value = to_double(rest, "constant");
    return s;
  }
  if (kind == "snapshot") {
    std::string rest;
    std::getline(is, rest);
    s.kind = Kind::snapshot;
    s.path = trim(rest);
    if (s.path.empty()) throw std::invalid_argument("snapshot: missing path");
    return s;
  }
  if (kind != "bump" && kind != "barenblatt")
    throw std::invalid_argument("initial condition must be constant, bump, barenblatt or snapshot; got '" + kind + "'");
  s.kind = kind == "bump" ? Kind::bump : Kind::barenblatt;
  std::set<std::string> seen;
  std::string item;
  while (is >> item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument(kind + ": expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    if (!seen.insert(key).second) throw std::invalid_argument(kind + ": duplicate '" + key + "'");
    if (key == "x0") s.x0 = to_coord(val, key);
    else if (key == "r0" && s.kind == Kind::bump) s.r0 = to_double(val, key);
    else if (key == "height" && s.kind == Kind::bump) s.height = to_double(val, key);
    else if (key == "t" && s.kind == Kind::barenblatt) s.t = to_double(val, key);
    else throw std::invalid_argument(kind + ": unknown parameter '" + key + "'");
  }
  return s;
}

std::string InitialSpec::describe(int dim) const {
  switch (kind) {
    case Kind::constant: return "constant " + fmt(value);
    case Kind::bump:
      return "bump x0=" + coord_text(x0, dim) + " r0=" + fmt(r0) + " height=" + fmt(height);
    case Kind::barenblatt: return "barenblatt x0=" + coord_text(x0, dim) + " t=" + fmt(t);
    case Kind::snapshot: return "snapshot " + path;
  }
  return {};
}

Grid GridSpec::make() const {
  if (dim == 1) return Grid(1, cells[0], extent[0], origin[0]);
  if (dim == 2) return Grid(2, cells, extent, origin);
  throw std::invalid_argument("grid dim must be 1 or 2");
}

LatticeState LatticeSpec::make(double m, std::uint64_t seed) const {
  LatticeState s = LatticeState::make(sites, u_max, seed);
  s.m = m;
  s.alpha = alpha;
  s.beta_sens = Sensitivity::constant(beta);
  s.k = k;
  s.length = length;
  s.kernel = kernel;
  s.occupancy[static_cast<std::size_t>(load_site < 0 ? sites / 2 : load_site)] = particles;
  s.validate();
  return s;
}

void RunConfig::validate() const {
  model.validate();
  grid.make();
  solver.validate();
  validate_initial(u, "u");
  validate_initial(v, "v");
  validate_initial(w, "w");
  validate_initial(z, "z");
  if (!(oracles.margin >= 0.0)) throw std::invalid_argument("oracles.margin must be nonnegative");
  if (output_dir.empty()) throw std::invalid_argument("output.dir must not be empty");
  if (lattice) {
    const LatticeSpec& l = *lattice;
    if (l.sites < 2) throw std::invalid_argument("lattice.sites must be at least 2");
    if (l.cells_per_bin < 1 || l.sites % l.cells_per_bin != 0)
      throw std::invalid_argument("lattice.sites must be divisible by lattice.cells_per_bin");
    if (l.particles < 0) throw std::invalid_argument("lattice.particles must be nonnegative");
    if (l.load_site < -1 || l.load_site >= l.sites) throw std::invalid_argument("lattice.load_site out of range");
    if (l.seeds < 1) throw std::invalid_argument("lattice.seeds must be positive");
    if (!(l.end_time > 0.0)) throw std::invalid_argument("lattice.end_time must be positive");
    l.make(model.m, seed);
  }
  for (const SweepAxis& a : sweep)
    if (a.values.empty()) throw std::invalid_argument("sweep." + a.key + " has no values");
}

void apply_setting(RunConfig& cfg, const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos) throw std::invalid_argument("setting key must look like section.key: " + dotted_key);
  const std::string section = dotted_key.substr(0, dot);
  if (section == "sweep") throw std::invalid_argument("sweeps cannot set sweep keys");
  set_value(cfg, section, dotted_key.substr(dot + 1), trim(value));
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string raw, section;
  std::set<std::string> sections_seen;
  std::set<std::string> keys_seen;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!kSections.count(section)) throw ConfigError(line_no, "unknown section [" + section + "]");
      if (!sections_seen.insert(section).second) throw ConfigError(line_no, "section [" + section + "] repeated");
      if (section == "lattice" && !cfg.lattice) cfg.lattice.emplace();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
    if (section.empty()) throw ConfigError(line_no, "setting outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "empty key");
    if (!keys_seen.insert(section + "." + key).second) throw ConfigError(line_no, "duplicate key '" + key + "'");
    try {
      if (section == "sweep") {
        SweepAxis axis{key, split(value, ';')};
        RunConfig probe = cfg;
        for (const std::string& v : axis.values) apply_setting(probe, key, v);
        cfg.sweep.push_back(std::move(axis));
      } else {
        set_value(cfg, section, key, value);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(line_no, e.what());
    }
  }
  for (const std::string& req : kRequired)
    if (!sections_seen.count(req)) throw ConfigError(0, "missing required section [" + req + "]");
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(0, e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  const int dim = c.grid.dim;
  auto pair_text = [&](auto arr) {
    std::ostringstream p;
    p.precision(17);
    p << arr[0];
    if (dim == 2) p << ", " << arr[1];
    return p.str();
  };
  os << "[model]\n"
     << "m = " << fmt(c.model.m) << "\n"
     << "delta = " << fmt(c.model.delta) << "\n"
     << "mu = " << fmt(c.model.mu) << "\n"
     << "r = " << fmt(c.model.r) << "\n"
     << "phi = " << c.model.phi.describe() << "\n"
     << "eps_reg = " << fmt(c.model.eps_reg) << "\n\n";
  os << "[grid]\n"
     << "dim = " << dim << "\n"
     << "cells = " << pair_text(c.grid.cells) << "\n"
     << "extent = " << pair_text(c.grid.extent) << "\n"
     << "origin = " << pair_text(c.grid.origin) << "\n\n";
  const SolverConfig& s = c.solver;
  os << "[solver]\n"
     << "cfl_safety = " << fmt(s.cfl_safety) << "\n"
     << "end_time = " << fmt(s.end_time) << "\n"
     << "output_stride = " << s.output_stride << "\n"
     << "clip_negative = " << bool_text(s.clip_negative) << "\n"
     << "chemo_upwind = " << bool_text(s.chemo_upwind) << "\n"
     << "v_z_stepper = " << (s.v_z_stepper == VzStepper::explicit_euler ? "explicit" : "semi_implicit") << "\n"
     << "dt_max = " << fmt(s.dt_max) << "\n"
     << "linear_tol = " << fmt(s.linear_tol) << "\n"
     << "backend = " << (s.backend == Backend::reference ? "reference" : "openmp") << "\n"
     << "support_threshold = " << fmt(s.support_threshold) << "\n";
  if (s.front_center) os << "front_center = " << coord_text(*s.front_center, dim) << "\n";
  os << "\n[initial]\n"
     << "u = " << c.u.describe(dim) << "\n"
     << "v = " << c.v.describe(dim) << "\n"
     << "w = " << c.w.describe(dim) << "\n"
     << "z = " << c.z.describe(dim) << "\n\n";
  os << "[oracles]\n"
     << "sandwich = " << bool_text(c.oracles.sandwich) << "\n"
     << "conservation = " << bool_text(c.oracles.conservation) << "\n"
     << "steady = " << bool_text(c.oracles.steady) << "\n"
     << "margin = " << fmt(c.oracles.margin) << "\n\n";
  os << "[output]\n"
     << "dir = " << c.output_dir << "\n"
     << "snapshots = " << bool_text(c.write_snapshots) << "\n\n";
  os << "[run]\n"
     << "seed = " << c.seed << "\n";
  if (c.lattice) {
    const LatticeSpec& l = *c.lattice;
    os << "\n[lattice]\n"
       << "sites = " << l.sites << "\n"
       << "length = " << fmt(l.length) << "\n"
       << "u_max = " << l.u_max << "\n"
       << "particles = " << l.particles << "\n"
       << "load_site = " << l.load_site << "\n"
       << "alpha = " << fmt(l.alpha) << "\n"
       << "beta = " << fmt(l.beta) << "\n"
       << "k = " << fmt(l.k) << "\n"
       << "kernel = " << kernel_name(l.kernel) << "\n"
       << "cells_per_bin = " << l.cells_per_bin << "\n"
       << "seeds = " << l.seeds << "\n"
       << "end_time = " << fmt(l.end_time) << "\n";
  }
  if (!c.sweep.empty()) {
    os << "\n[sweep]\n";
    for (const SweepAxis& a : c.sweep) {
      os << a.key << " = ";
      for (std::size_t k = 0; k < a.values.size(); ++k) os << (k ? "; " : "") << a.values[k];
      os << "\n";
    }
  }
  return os.str();
}

StateQuad build_initial_state(const RunConfig& cfg) {
  const Grid g = cfg.grid.make();
  StateQuad s(g);
  std::map<std::string, StateQuad> cache;
  auto fill = [&](Field& f, const InitialSpec& spec, int which) {
    switch (spec.kind) {
      case InitialSpec::Kind::constant:
        std::fill(f.values.begin(), f.values.end(), spec.value);
        break;
      case InitialSpec::Kind::bump:
        for (std::size_t k = 0; k < f.size(); ++k) {
          const double d2 = squared_distance(g.cell_center(k), spec.x0);
          f[k] = spec.height * std::max(0.0, 1.0 - d2 / (spec.r0 * spec.r0));
        }
        break;
      case InitialSpec::Kind::barenblatt:
        for (std::size_t k = 0; k < f.size(); ++k) {
          Coord x = g.cell_center(k);
          for (int a = 0; a < 3; ++a) x[a] -= spec.x0[a];
          f[k] = barenblatt(x, spec.t, cfg.model.m, g.dim());
        }
        break;
      case InitialSpec::Kind::snapshot: {
        auto it = cache.find(spec.path);
        if (it == cache.end()) it = cache.emplace(spec.path, read_snapshot(spec.path)).first;
        const StateQuad& snap = it->second;
        const Grid& sg = snap.grid();
        if (sg.dim() != g.dim() || sg.size() != g.size() || sg.spacing() != g.spacing())
          throw ConfigError(0, "snapshot " + spec.path + " does not match the configured grid");
        const Field* src[] = {&snap.u, &snap.v, &snap.w, &snap.z};
        f.values = src[which]->values;
        break;
      }
    }
  };
  fill(s.u, cfg.u, 0);
  fill(s.v, cfg.v, 1);
  fill(s.w, cfg.w, 2);
  fill(s.z, cfg.z, 3);
  s.validate();
  return s;
}

}  // namespace dcsim
