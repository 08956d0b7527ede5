// Copyright 2026 The pme Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pme/cli/scenario.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "pme/cli/units.hpp"
#include "pme/emission.hpp"
#include "pme/errors.hpp"
#include "pme/photonic_design.hpp"
#include "pme/protocols.hpp"
#include "pme/species.hpp"
#include "pme/trap_geometry.hpp"

namespace pme::cli {
namespace {

using nlohmann::json;

constexpr double kMicron = 1e-6;
constexpr double kElementaryCharge = 1.602176634e-19;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Walks one JSON object, records which keys were read and reports the rest.
class Reader {
 public:
  Reader(const json* obj, std::string path, std::vector<Diagnostic>& diags)
      : obj_(obj), path_(std::move(path)), diags_(diags) {
    if (obj_ && !obj_->is_object()) {
      error("", "expected an object");
      obj_ = nullptr;
    }
  }

  bool has(const std::string& key) const { return obj_ && obj_->contains(key); }

  std::optional<double> quantity(const std::string& key, Dimension dim) {
    const json* v = take(key);
    if (!v) return std::nullopt;
    try {
      if (v->is_number()) return v->get<double>();
      if (v->is_string()) return parse_quantity(v->get<std::string>(), dim);
    } catch (const UnitError& e) {
      error(key, e.what());
      return std::nullopt;
    }
    error(key, "expected a number or a quantity string");
    return std::nullopt;
  }

  std::optional<bool> boolean(const std::string& key) {
    const json* v = take(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) {
      error(key, "expected true or false");
      return std::nullopt;
    }
    return v->get<bool>();
  }

  std::optional<std::string> string(const std::string& key) {
    const json* v = take(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      error(key, "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<std::int64_t> integer(const std::string& key) {
    const json* v = take(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) {
      error(key, "expected an integer");
      return std::nullopt;
    }
    return v->get<std::int64_t>();
  }

  const json* raw(const std::string& key) { return take(key); }

  std::string path_of(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void error(const std::string& key, const std::string& message) {
    diags_.push_back({key.empty() ? path_ : path_of(key), message});
  }

  void finish() {
    if (!obj_) return;
    for (const auto& [key, value] : obj_->items())
      if (!seen_.count(key)) diags_.push_back({path_of(key), "unknown key"});
  }

 private:
  const json* take(const std::string& key) {
    if (!obj_) return nullptr;
    seen_.insert(key);
    const auto it = obj_->find(key);
    return it == obj_->end() ? nullptr : &*it;
  }

  const json* obj_;
  std::string path_;
  std::vector<Diagnostic>& diags_;
  std::set<std::string> seen_;
};

// ---- numeric parameter tables ---------------------------------------------

template <typename Config>
struct Param {
  Dimension dim;
  std::function<void(Config&, double)> set;
};

template <typename Config>
using ParamTable = std::map<std::string, Param<Config>>;

template <auto Member, typename Config>
Param<Config> field(Dimension dim) {
  return {dim, [](Config& c, double v) { c.*Member = v; }};
}

const ParamTable<NodeParams>& node_params() {
  using N = NodeParams;
  static const ParamTable<NodeParams> t = {
      {"excitation_probability", field<&N::excitation_probability, N>(Dimension::Dimensionless)},
      {"branching_ratio", field<&N::branching_ratio, N>(Dimension::Dimensionless)},
      {"solid_angle_fraction", field<&N::solid_angle_fraction, N>(Dimension::Dimensionless)},
      {"transmission", field<&N::transmission, N>(Dimension::Dimensionless)},
      {"detector_efficiency", field<&N::detector_efficiency, N>(Dimension::Dimensionless)},
      {"crosstalk", field<&N::crosstalk, N>(Dimension::Dimensionless)},
      {"crosstalk_db",
       {Dimension::Dimensionless, [](N& n, double v) { n.crosstalk = std::sqrt(std::pow(10.0, v / 10.0)); }}},
      {"crosstalk_phase", field<&N::crosstalk_phase, N>(Dimension::Angle)},
  };
  return t;
}

const ParamTable<ProtocolConfig>& protocol_params() {
  static const ParamTable<ProtocolConfig> t = [] {
    ParamTable<ProtocolConfig> p = {
        {"wavelength", {Dimension::Length, [](ProtocolConfig& c, double v) { c.wavelength = v; }}},
        {"path_difference", {Dimension::Length, [](ProtocolConfig& c, double v) { c.path_difference = v; }}},
        {"frequency_splitting", {Dimension::Frequency, [](ProtocolConfig& c, double v) { c.frequency_splitting = v; }}},
        {"qubit_detuning",
         {Dimension::Frequency, [](ProtocolConfig& c, double v) { c.qubit_detuning = 2 * std::numbers::pi * v; }}},
        {"mode_overlap", {Dimension::Dimensionless, [](ProtocolConfig& c, double v) { c.mode_overlap = v; }}},
        {"transmissivity", {Dimension::Dimensionless, [](ProtocolConfig& c, double v) { c.transmissivity = v; }}},
        {"bin_separation", {Dimension::Time, [](ProtocolConfig& c, double v) { c.bin_separation = v; }}},
        {"lifetime", {Dimension::Time, [](ProtocolConfig& c, double v) { c.lifetime = v; }}},
        {"motional_fidelity", {Dimension::Dimensionless, [](ProtocolConfig& c, double v) { c.motional_fidelity = v; }}},
    };
    for (const auto& [name, np] : node_params()) {
      auto set = np.set;
      p["node." + name] = {np.dim, [set](ProtocolConfig& c, double v) {
                             set(c.nodes[0], v);
                             set(c.nodes[1], v);
                           }};
      for (int n = 0; n < 2; ++n)
        p["node" + std::to_string(n) + "." + name] = {
            np.dim, [set, n](ProtocolConfig& c, double v) { set(c.nodes[static_cast<std::size_t>(n)], v); }};
    }
    return p;
  }();
  return t;
}

struct GeometryParams {
  double a = 62 * kMicron;
  double b = 50 * kMicron;
  std::optional<double> h;
  double l = 100 * kMicron;
};

const ParamTable<GeometryParams>& geometry_params() {
  static const ParamTable<GeometryParams> t = {
      {"a", {Dimension::Length, [](GeometryParams& g, double v) { g.a = v; }}},
      {"b", {Dimension::Length, [](GeometryParams& g, double v) { g.b = v; }}},
      {"h", {Dimension::Length, [](GeometryParams& g, double v) { g.h = v; }}},
      {"l", {Dimension::Length, [](GeometryParams& g, double v) { g.l = v; }}},
  };
  return t;
}

struct TradeoffParams {
  double h = 50 * kMicron;
  double l = 100 * kMicron;
  double a = 0.0;  // swept
  TrapGeometry drive;
};

const ParamTable<TradeoffParams>& tradeoff_params() {
  static const ParamTable<TradeoffParams> t = {
      {"h", {Dimension::Length, [](TradeoffParams& p, double v) { p.h = v; }}},
      {"l", {Dimension::Length, [](TradeoffParams& p, double v) { p.l = v; }}},
      {"a", {Dimension::Length, [](TradeoffParams& p, double v) { p.a = v; }}},
      {"voltage", {Dimension::Voltage, [](TradeoffParams& p, double v) { p.drive.voltage = v; }}},
      {"drive_frequency",
       {Dimension::Frequency, [](TradeoffParams& p, double v) { p.drive.drive_frequency = 2 * std::numbers::pi * v; }}},
  };
  return t;
}

// ---- sweeps ------------------------------------------------------------------

struct Sweep {
  std::string parameter;
  std::vector<double> values;
};

template <typename Config>
std::optional<Sweep> read_sweep(const json& doc, const ParamTable<Config>& table, std::vector<Diagnostic>& diags) {
  if (!doc.contains("sweep")) return std::nullopt;
  Reader r(&doc["sweep"], "sweep", diags);
  Sweep s;
  const auto name = r.string("parameter");
  const Param<Config>* param = nullptr;
  if (!name) {
    r.error("parameter", "required");
  } else if (!table.count(*name)) {
    r.error("parameter", "'" + *name + "' cannot be swept here");
  } else {
    s.parameter = *name;
    param = &table.at(*name);
  }
  const Dimension dim = param ? param->dim : Dimension::Dimensionless;
  if (const json* values = r.raw("values")) {
    if (!values->is_array() || values->empty()) {
      r.error("values", "expected a non-empty array");
    } else {
      for (std::size_t i = 0; i < values->size(); ++i) {
        const json& v = (*values)[i];
        const std::string path = r.path_of("values") + "[" + std::to_string(i) + "]";
        try {
          if (v.is_number())
            s.values.push_back(v.get<double>());
          else if (v.is_string())
            s.values.push_back(parse_quantity(v.get<std::string>(), dim));
          else
            diags.push_back({path, "expected a number or a quantity string"});
        } catch (const UnitError& e) {
          diags.push_back({path, e.what()});
        }
      }
    }
    if (r.has("from") || r.has("to") || r.has("points")) r.error("", "give either 'values' or 'from'/'to'/'points'");
    r.quantity("from", dim);
    r.quantity("to", dim);
    r.integer("points");
  } else {
    const auto from = r.quantity("from", dim);
    const auto to = r.quantity("to", dim);
    const auto points = r.integer("points");
    if (!from) r.error("from", "required");
    if (!to) r.error("to", "required");
    if (!points) r.error("points", "required");
    if (points && *points < 1) r.error("points", "must be at least 1");
    if (points && *points > 1000000) r.error("points", "must be at most 1000000");
    if (from && to && points && *points >= 1 && *points <= 1000000) {
      const auto n = static_cast<std::size_t>(*points);
      for (std::size_t i = 0; i < n; ++i)
        s.values.push_back(n == 1 ? *from
                                  : *from + (*to - *from) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
  }
  r.finish();
  return s;
}

// Reads the top-level entries of `table`; dotted sweep aliases are skipped.
template <typename Config>
void read_numbers(Reader& r, const ParamTable<Config>& table, Config& cfg) {
  for (const auto& [name, param] : table) {
    if (name.find('.') != std::string::npos) continue;
    if (const auto v = r.quantity(name, param.dim)) param.set(cfg, *v);
  }
}

// ---- per-command parsing -----------------------------------------------------

struct ProtocolScenario {
  ProtocolConfig config;
  double path_jitter = 0.0;
  int jitter_samples = 1024;
};

void read_node(const json& obj, const std::string& path, NodeParams& node, std::vector<Diagnostic>& diags) {
  Reader r(&obj, path, diags);
  read_numbers(r, node_params(), node);
  if (r.has("crosstalk") && r.has("crosstalk_db")) r.error("", "give either 'crosstalk' or 'crosstalk_db'");
  r.finish();
}

// Shared protocol keys; `with_kind` controls whether 'kind' is accepted.
void read_protocol(Reader& r, ProtocolConfig& c, bool with_kind, std::vector<Diagnostic>& diags) {
  if (with_kind) {
    if (const auto kind = r.string("kind")) {
      if (const auto k = parse_protocol_kind(*kind))
        c.kind = *k;
      else
        r.error("kind", "expected one of number, time-bin, polarization, frequency");
    }
  }
  if (const auto e = r.boolean("enhanced_analyzer")) c.enhanced_analyzer = *e;
  const auto species = r.string("species");
  const auto line = r.string("line");
  const auto isotope = r.integer("isotope");
  if (species) {
    const auto preset = find_species(*species);
    if (!preset) {
      r.error("species", "unknown species '" + *species + "'");
    } else {
      const std::string ln = line.value_or("P1/2");
      if (ln == "P1/2")
        c.wavelength = preset->p12_wavelength_nm * 1e-9;
      else if (ln == "P3/2")
        c.wavelength = preset->p32_wavelength_nm * 1e-9;
      else
        r.error("line", "expected P1/2 or P3/2");
      if (isotope) {
        const auto it = std::find_if(preset->isotopes.begin(), preset->isotopes.end(),
                                     [&](const HyperfineIsotope& i) { return i.mass_number == *isotope; });
        if (it == preset->isotopes.end())
          r.error("isotope", "no hyperfine data for this isotope");
        else
          c.frequency_splitting = it->splitting_ghz * 1e9;
      }
    }
  } else {
    if (line) r.error("line", "requires 'species'");
    if (isotope) r.error("isotope", "requires 'species'");
  }
  read_numbers(r, protocol_params(), c);
  if (const json* node = r.raw("node")) {
    read_node(*node, r.path_of("node"), c.nodes[0], diags);
    c.nodes[1] = c.nodes[0];
  }
  if (const json* nodes = r.raw("nodes")) {
    if (!nodes->is_array() || nodes->size() != 2) {
      r.error("nodes", "expected an array of two node objects");
    } else {
      for (std::size_t n = 0; n < 2; ++n)
        read_node((*nodes)[n], r.path_of("nodes") + "[" + std::to_string(n) + "]", c.nodes[n], diags);
    }
  }
}

void check_protocol(const ProtocolConfig& c, const std::string& path, std::vector<Diagnostic>& diags) {
  for (const auto& msg : validate(c)) diags.push_back({path, msg});
}

ProtocolScenario parse_protocol_sim(const json& params, std::vector<Diagnostic>& diags) {
  ProtocolScenario s;
  Reader r(&params, "parameters", diags);
  read_protocol(r, s.config, true, diags);
  if (const auto j = r.quantity("path_jitter", Dimension::Length)) {
    if (*j < 0.0) r.error("path_jitter", "must be non-negative");
    s.path_jitter = *j;
  }
  if (const auto n = r.integer("jitter_samples")) {
    if (*n < 1 || *n > 1000000) r.error("jitter_samples", "must lie in [1, 1000000]");
    s.jitter_samples = static_cast<int>(*n);
  }
  r.finish();
  check_protocol(s.config, "parameters", diags);
  return s;
}

struct RateScenario {
  ProtocolConfig config;
  std::vector<ProtocolKind> kinds = {ProtocolKind::Number, ProtocolKind::TimeBin, ProtocolKind::Polarization,
                                     ProtocolKind::Frequency};
  double two_photon_excitation = 1.0;
  double attempt_rate = 1e6;
  std::int64_t sites = 1;
};

ProtocolConfig config_for_kind(const RateScenario& s, ProtocolKind kind) {
  ProtocolConfig c = s.config;
  c.kind = kind;
  if (kind != ProtocolKind::Number)
    for (auto& n : c.nodes) n.excitation_probability = s.two_photon_excitation;
  if (kind == ProtocolKind::Number || kind == ProtocolKind::TimeBin)
    for (auto& n : c.nodes) n.crosstalk = 0.0;
  return c;
}

RateScenario parse_rate_table(const json& params, std::vector<Diagnostic>& diags) {
  RateScenario s;
  Reader r(&params, "parameters", diags);
  read_protocol(r, s.config, false, diags);
  if (const json* kinds = r.raw("kinds")) {
    s.kinds.clear();
    if (!kinds->is_array() || kinds->empty()) {
      r.error("kinds", "expected a non-empty array of protocol names");
    } else {
      for (std::size_t i = 0; i < kinds->size(); ++i) {
        const json& k = (*kinds)[i];
        const auto kind = k.is_string() ? parse_protocol_kind(k.get<std::string>()) : std::nullopt;
        if (kind)
          s.kinds.push_back(*kind);
        else
          diags.push_back({r.path_of("kinds") + "[" + std::to_string(i) + "]", "unknown protocol kind"});
      }
    }
  }
  if (const auto p = r.quantity("two_photon_excitation_probability", Dimension::Dimensionless)) {
    if (*p < 0.0 || *p > 1.0) r.error("two_photon_excitation_probability", "must lie in [0, 1]");
    s.two_photon_excitation = *p;
  }
  if (const auto f = r.quantity("attempt_rate", Dimension::Frequency)) {
    if (!(*f > 0.0)) r.error("attempt_rate", "must be positive");
    s.attempt_rate = *f;
  }
  if (const auto n = r.integer("sites")) {
    if (*n < 1) r.error("sites", "must be at least 1");
    s.sites = *n;
  }
  r.finish();
  for (ProtocolKind k : s.kinds) check_protocol(config_for_kind(s, k), "parameters (" + to_string(k) + ")", diags);
  return s;
}

struct GeometryScenario {
  GeometryParams params;
  std::int64_t mc_samples = 0;
};

void check_geometry(const GeometryParams& g, const std::string& path, std::vector<Diagnostic>& diags) {
  if (!(g.a > 0.0)) diags.push_back({path, "a must be positive"});
  if (!(g.b > 0.0)) diags.push_back({path, "b must be positive"});
  if (!(g.l >= 0.0)) diags.push_back({path, "l must be non-negative"});
  if (g.h && !(*g.h > 0.0)) diags.push_back({path, "h must be positive"});
}

GeometryScenario parse_geometry(const json& params, std::vector<Diagnostic>& diags) {
  GeometryScenario s;
  Reader r(&params, "parameters", diags);
  read_numbers(r, geometry_params(), s.params);
  if (const auto n = r.integer("monte_carlo_samples")) {
    if (*n < 0 || *n > 100000000) r.error("monte_carlo_samples", "must lie in [0, 1e8]");
    s.mc_samples = *n;
  }
  r.finish();
  check_geometry(s.params, "parameters", diags);
  return s;
}

TradeoffParams parse_tradeoff(const json& params, std::vector<Diagnostic>& diags) {
  TradeoffParams p;
  Reader r(&params, "parameters", diags);
  for (const auto& name : {"h", "l", "voltage", "drive_frequency"})
    if (const auto v = r.quantity(name, tradeoff_params().at(name).dim)) tradeoff_params().at(name).set(p, *v);
  double mass = 138 * 1.66053906660e-27;
  double charge = 1.0;
  if (const auto m = r.quantity("ion_mass", Dimension::Mass)) {
    if (!(*m > 0.0)) r.error("ion_mass", "must be positive");
    mass = *m;
  }
  if (const auto q = r.quantity("charge", Dimension::Dimensionless)) {
    if (*q == 0.0) r.error("charge", "must be nonzero");
    charge = *q;
  }
  p.drive.q_over_m = charge * kElementaryCharge / mass;
  r.finish();
  if (!(p.h > 0.0)) diags.push_back({"parameters.h", "must be positive"});
  if (!(p.l >= 0.0)) diags.push_back({"parameters.l", "must be non-negative"});
  if (!(p.drive.drive_frequency > 0.0)) diags.push_back({"parameters.drive_frequency", "must be positive"});
  return p;
}

GratingSpec parse_grating(const json& params, std::vector<Diagnostic>& diags) {
  GratingSpec g;
  Reader r(&params, "parameters", diags);
  if (const auto v = r.quantity("wavelength", Dimension::Length)) g.wavelength_nm = *v * 1e9;
  if (const auto v = r.quantity("n_eff", Dimension::Dimensionless)) g.n_eff = *v;
  if (const auto v = r.quantity("x_ion", Dimension::Length)) g.x_ion_um = *v / kMicron;
  if (const auto v = r.quantity("height", Dimension::Length)) g.height_um = *v / kMicron;
  if (const auto v = r.quantity("x_min", Dimension::Length)) g.x_min_um = *v / kMicron;
  if (const auto v = r.quantity("x_max", Dimension::Length)) g.x_max_um = *v / kMicron;
  if (const auto v = r.quantity("min_pitch", Dimension::Length)) g.min_pitch_nm = *v * 1e9;
  if (const auto v = r.integer("order")) g.order = static_cast<int>(*v);
  r.finish();
  if (!(g.wavelength_nm > 0.0)) diags.push_back({"parameters.wavelength", "must be positive"});
  if (!(g.n_eff > 1.0)) diags.push_back({"parameters.n_eff", "must exceed 1"});
  if (!(g.height_um > 0.0)) diags.push_back({"parameters.height", "must be positive"});
  if (!(g.x_max_um > g.x_min_um)) diags.push_back({"parameters", "x_max must exceed x_min"});
  if (!(g.min_pitch_nm > 0.0)) diags.push_back({"parameters.min_pitch", "must be positive"});
  if (g.order < 1) diags.push_back({"parameters.order", "must be at least 1"});
  return g;
}

// ---- document level ------------------------------------------------------------

struct Document {
  std::string command;
  std::optional<std::uint64_t> seed;
  const json* params = nullptr;
};

const json& empty_object() {
  static const json e = json::object();
  return e;
}

Document read_document(const json& doc, std::string_view command, std::vector<Diagnostic>& diags) {
  Document d;
  if (!doc.is_object()) {
    diags.push_back({"", "top level must be an object"});
    return d;
  }
  Reader r(&doc, "", diags);
  const auto declared = r.string("command");
  if (!command.empty()) {
    d.command = std::string(command);
    if (declared && *declared != command)
      r.error("command", "config declares '" + *declared + "' but '" + std::string(command) + "' was requested");
  } else if (declared) {
    d.command = *declared;
  } else {
    r.error("command", "required when validating without a command");
  }
  const auto& names = command_names();
  if (!d.command.empty() && std::find(names.begin(), names.end(), d.command) == names.end()) {
    r.error("command", "unknown command '" + d.command + "'");
    d.command.clear();
  }
  if (const json* seed = r.raw("seed")) {
    if (seed->is_number_unsigned())
      d.seed = seed->get<std::uint64_t>();
    else
      r.error("seed", "expected a non-negative integer");
  }
  d.params = r.raw("parameters");
  if (!d.params) d.params = &empty_object();
  r.raw("sweep");
  r.finish();
  return d;
}

struct Parsed {
  Document doc;
  std::optional<ProtocolScenario> protocol;
  std::optional<RateScenario> rate;
  std::optional<GeometryScenario> geometry;
  std::optional<TradeoffParams> tradeoff;
  std::optional<GratingSpec> grating;
  std::optional<Sweep> sweep;
};

Parsed parse(const json& root, std::string_view command, std::vector<Diagnostic>& diags) {
  Parsed p;
  p.doc = read_document(root, command, diags);
  const std::string& cmd = p.doc.command;
  if (cmd.empty()) return p;
  const json& params = *p.doc.params;
  auto no_sweep = [&] {
    if (root.contains("sweep")) diags.push_back({"sweep", "not supported by " + cmd});
  };
  if (cmd == "protocol-sim") {
    p.protocol = parse_protocol_sim(params, diags);
    p.sweep = read_sweep(root, protocol_params(), diags);
    if (p.sweep && !p.sweep->parameter.empty())
      for (double v : p.sweep->values) {
        ProtocolConfig c = p.protocol->config;
        protocol_params().at(p.sweep->parameter).set(c, v);
        const auto msgs = validate(c);
        if (!msgs.empty()) {
          diags.push_back({"sweep", "at " + p.sweep->parameter + " = " + fmt(v) + ": " + msgs.front()});
          break;
        }
      }
  } else if (cmd == "rate-table") {
    p.rate = parse_rate_table(params, diags);
    no_sweep();
  } else if (cmd == "geometry-sweep") {
    p.geometry = parse_geometry(params, diags);
    p.sweep = read_sweep(root, geometry_params(), diags);
    if (p.sweep && !p.sweep->parameter.empty())
      for (double v : p.sweep->values) {
        GeometryParams g = p.geometry->params;
        geometry_params().at(p.sweep->parameter).set(g, v);
        std::vector<Diagnostic> point;
        check_geometry(g, "sweep", point);
        if (!point.empty()) {
          diags.push_back({"sweep", "at " + p.sweep->parameter + " = " + fmt(v) + ": " + point.front().message});
          break;
        }
      }
  } else if (cmd == "tradeoff-curve") {
    p.tradeoff = parse_tradeoff(params, diags);
    ParamTable<TradeoffParams> only_a = {{"a", tradeoff_params().at("a")}};
    p.sweep = read_sweep(root, only_a, diags);
    if (!p.sweep) {
      // default grid across the open interval (0, 2h)
      Sweep s{"a", {}};
      const int n = 96;
      for (int i = 1; i <= n; ++i) s.values.push_back(2 * p.tradeoff->h * i / (n + 1));
      p.sweep = s;
    }
    for (double a : p.sweep->values)
      if (!(a > 0.0 && a < 2 * p.tradeoff->h)) {
        diags.push_back({"sweep", "gap values must lie in (0, 2h)"});
        break;
      }
  } else if (cmd == "grating-design") {
    p.grating = parse_grating(params, diags);
    no_sweep();
  }
  return p;
}

// ---- execution -------------------------------------------------------------------

template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex lock;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> g(lock);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

struct Output {
  std::string text;
  std::size_t rows = 0;
};

json herald_json(const HeraldTable& t, double analytic) {
  json entries = json::array();
  for (const auto& e : t.entries) {
    json clicks = json::array();
    for (std::size_t d = 0; d < t.detectors.size(); ++d)
      if (e.pattern >> d & 1u) clicks.push_back(t.detectors[d]);
    json ions = json::array();
    for (int i = 0; i < 4; ++i) {
      json row = json::array();
      for (int j = 0; j < 4; ++j) row.push_back({e.ions(i, j).real(), e.ions(i, j).imag()});
      ions.push_back(row);
    }
    json entry = {{"pattern", e.pattern}, {"clicks", clicks}, {"probability", e.probability}, {"valid", e.valid}};
    if (e.valid) {
      entry["target"] = to_string(e.target);
      entry["correction"] = {{"phase", e.correction.phase}, {"flip", e.correction.flip}};
      entry["fidelity"] = e.fidelity;
    }
    entry["ions"] = ions;
    entries.push_back(entry);
  }
  json out = {{"kind", to_string(t.kind)},
              {"detectors", t.detectors},
              {"total_success", t.total_success},
              {"analytic_herald_prob", analytic},
              {"mean_fidelity", t.mean_fidelity},
              {"entries", entries}};
  out["dominant_pattern"] = t.dominant ? json(t.entries[*t.dominant].pattern) : json(nullptr);
  return out;
}

Output run_protocol_sim(const Parsed& p, bool as_json, std::uint64_t seed, unsigned threads) {
  const ProtocolScenario& s = *p.protocol;
  Output out;
  if (!p.sweep) {
    const HeraldTable t = run_protocol(s.config);
    const double analytic = analytic_herald_prob(s.config);
    std::optional<double> jitter;
    if (s.path_jitter > 0.0) jitter = phase_jitter_fidelity(s.config, s.path_jitter, s.jitter_samples, seed);
    if (as_json) {
      json j = herald_json(t, analytic);
      if (jitter) j["jitter_averaged_fidelity"] = *jitter;
      out.text = j.dump(2) + "\n";
      out.rows = t.entries.size();
      return out;
    }
    std::ostringstream os;
    os << "pattern,clicks,probability,valid,target,correction_phase,fidelity\n";
    for (const auto& e : t.entries) {
      std::string clicks;
      for (std::size_t d = 0; d < t.detectors.size(); ++d)
        if (e.pattern >> d & 1u) clicks += (clicks.empty() ? "" : "+") + t.detectors[d];
      os << e.pattern << ',' << (clicks.empty() ? "none" : clicks) << ',' << fmt(e.probability) << ','
         << (e.valid ? 1 : 0) << ',' << (e.valid ? to_string(e.target) : "") << ','
         << (e.valid ? fmt(e.correction.phase) : "") << ',' << (e.valid ? fmt(e.fidelity) : "") << '\n';
    }
    out.text = os.str();
    out.rows = t.entries.size();
    return out;
  }
  const Sweep& sw = *p.sweep;
  struct Row {
    double success, analytic, mean, dominant, jitter;
  };
  std::vector<Row> rows(sw.values.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    ProtocolConfig c = s.config;
    protocol_params().at(sw.parameter).set(c, sw.values[i]);
    const HeraldTable t = run_protocol(c);
    const double jittered =
        s.path_jitter > 0.0 ? phase_jitter_fidelity(c, s.path_jitter, s.jitter_samples, seed + i) : std::nan("");
    rows[i] = {t.total_success, analytic_herald_prob(c), t.mean_fidelity,
               t.dominant ? t.dominant_fidelity() : std::nan(""), jittered};
  });
  const bool jitter = s.path_jitter > 0.0;
  if (as_json) {
    json arr = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      json row = {{sw.parameter, sw.values[i]},
                  {"total_success", rows[i].success},
                  {"analytic_herald_prob", rows[i].analytic},
                  {"mean_fidelity", rows[i].mean},
                  {"dominant_fidelity", std::isnan(rows[i].dominant) ? json(nullptr) : json(rows[i].dominant)}};
      if (jitter) row["jitter_averaged_fidelity"] = rows[i].jitter;
      arr.push_back(row);
    }
    out.text = arr.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << sw.parameter << ",total_success,analytic_herald_prob,mean_fidelity,dominant_fidelity"
       << (jitter ? ",jitter_averaged_fidelity" : "") << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
      os << fmt(sw.values[i]) << ',' << fmt(rows[i].success) << ',' << fmt(rows[i].analytic) << ','
         << fmt(rows[i].mean) << ',' << fmt(rows[i].dominant);
      if (jitter) os << ',' << fmt(rows[i].jitter);
      os << '\n';
    }
    out.text = os.str();
  }
  out.rows = rows.size();
  return out;
}

Output run_rate_table(const Parsed& p, bool as_json, unsigned threads) {
  const RateScenario& s = *p.rate;
  struct Row {
    double success, analytic, fidelity;
  };
  std::vector<Row> rows(s.kinds.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    const ProtocolConfig c = config_for_kind(s, s.kinds[i]);
    const HeraldTable t = run_protocol(c);
    rows[i] = {t.total_success, analytic_herald_prob(c), t.mean_fidelity};
  });
  const double mult = s.attempt_rate * static_cast<double>(s.sites);
  std::optional<double> number_rate;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (s.kinds[i] == ProtocolKind::Number) number_rate = rows[i].success * mult;
  Output out;
  out.rows = rows.size();
  if (as_json) {
    json arr = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double rate = rows[i].success * mult;
      arr.push_back({{"kind", to_string(s.kinds[i])},
                     {"success_probability", rows[i].success},
                     {"analytic_probability", rows[i].analytic},
                     {"mean_fidelity", rows[i].fidelity},
                     {"attempt_rate_hz", s.attempt_rate},
                     {"sites", s.sites},
                     {"entanglement_rate_hz", rate},
                     {"number_to_this_ratio", number_rate && rate > 0.0 ? json(*number_rate / rate) : json(nullptr)}});
    }
    out.text = arr.dump(2) + "\n";
    return out;
  }
  std::ostringstream os;
  os << "kind,success_probability,analytic_probability,mean_fidelity,attempt_rate_hz,sites,entanglement_rate_hz,"
        "number_to_this_ratio\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double rate = rows[i].success * mult;
    os << to_string(s.kinds[i]) << ',' << fmt(rows[i].success) << ',' << fmt(rows[i].analytic) << ','
       << fmt(rows[i].fidelity) << ',' << fmt(s.attempt_rate) << ',' << s.sites << ',' << fmt(rate) << ','
       << (number_rate && rate > 0.0 ? fmt(*number_rate / rate) : std::string()) << '\n';
  }
  out.text = os.str();
  return out;
}

Output run_geometry(const Parsed& p, bool as_json, std::uint64_t seed, unsigned threads) {
  const GeometryScenario& s = *p.geometry;
  std::vector<double> values = p.sweep ? p.sweep->values : std::vector<double>{0.0};
  struct Row {
    GeometryParams g;
    double h, exposure;
    MonteCarloEstimate mc;
  };
  std::vector<Row> rows(values.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    GeometryParams g = s.params;
    if (p.sweep) geometry_params().at(p.sweep->parameter).set(g, values[i]);
    const double h = g.h ? *g.h : ion_height(g.a / kMicron, g.b / kMicron) * kMicron;
    const ApertureSpec ap{g.l / kMicron, g.a / kMicron, h / kMicron, true};
    Row r{g, h, solid_angle_fraction(ap), {}};
    if (s.mc_samples > 0) r.mc = solid_angle_monte_carlo(ap, s.mc_samples, seed + i);
    rows[i] = r;
  });
  Output out;
  out.rows = rows.size();
  const bool mc = s.mc_samples > 0;
  if (as_json) {
    json arr = json::array();
    for (const auto& r : rows) {
      json row = {{"l_um", r.g.l / kMicron},
                  {"a_um", r.g.a / kMicron},
                  {"b_um", r.g.b / kMicron},
                  {"h_um", r.h / kMicron},
                  {"exposure_fraction", r.exposure}};
      if (mc) {
        row["mc_estimate"] = r.mc.estimate;
        row["mc_std_error"] = r.mc.std_error;
      }
      arr.push_back(row);
    }
    out.text = arr.dump(2) + "\n";
    return out;
  }
  std::ostringstream os;
  os << "l_um,a_um,b_um,h_um,exposure_fraction" << (mc ? ",mc_estimate,mc_std_error" : "") << '\n';
  for (const auto& r : rows) {
    os << fmt(r.g.l / kMicron) << ',' << fmt(r.g.a / kMicron) << ',' << fmt(r.g.b / kMicron) << ','
       << fmt(r.h / kMicron) << ',' << fmt(r.exposure);
    if (mc) os << ',' << fmt(r.mc.estimate) << ',' << fmt(r.mc.std_error);
    os << '\n';
  }
  out.text = os.str();
  return out;
}

Output run_tradeoff(const Parsed& p, bool as_json, unsigned threads) {
  const TradeoffParams& t = *p.tradeoff;
  const std::vector<double>& a_values = p.sweep->values;
  const double h = t.h / kMicron;
  const double l = t.l / kMicron;
  std::vector<TradeoffRow> rows(a_values.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    rows[i] = exposure_strength_tradeoff(h, l, {a_values[i] / kMicron}, t.drive).front();
  });
  double best = 0.0;
  for (const auto& r : rows) best = std::max(best, r.omega_r);
  for (auto& r : rows) r.normalized_omega_r = best > 0.0 ? r.omega_r / best : 0.0;
  Output out;
  out.rows = rows.size();
  if (as_json) {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"a_um", r.a},
                     {"b_um", r.b},
                     {"omega_r_rad_s", r.omega_r},
                     {"normalized_omega_r", r.normalized_omega_r},
                     {"exposure_fraction", r.exposure}});
    out.text = arr.dump(2) + "\n";
    return out;
  }
  std::ostringstream os;
  os << "a_um,b_um,omega_r_rad_s,normalized_omega_r,exposure_fraction\n";
  for (const auto& r : rows)
    os << fmt(r.a) << ',' << fmt(r.b) << ',' << fmt(r.omega_r) << ',' << fmt(r.normalized_omega_r) << ','
       << fmt(r.exposure) << '\n';
  out.text = os.str();
  return out;
}

Output run_grating(const Parsed& p, bool as_json) {
  const GratingSpec& g = *p.grating;
  const auto teeth = tooth_positions(g);
  Output out;
  out.rows = teeth.size();
  if (as_json) {
    json arr = json::array();
    for (const auto& t : teeth)
      arr.push_back({{"index", t.index},
                     {"x_um", t.x_um},
                     {"pitch_nm", t.pitch_nm},
                     {"angle_deg", t.angle_deg},
                     {"fabricable", t.pitch_nm >= g.min_pitch_nm},
                     {"residual_nm", t.residual_nm}});
    json violations = json::array();
    for (const auto& v : fabrication_lint(teeth, g.min_pitch_nm))
      violations.push_back({{"first", v.first}, {"pitch_nm", v.pitch_nm}});
    out.text = json{{"teeth", arr}, {"violations", violations}}.dump(2) + "\n";
    return out;
  }
  std::ostringstream os;
  write_tooth_csv(os, teeth, g.min_pitch_nm);
  out.text = os.str();
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("error while writing '" + path + "'");
}

}  // namespace

std::string format(const Diagnostic& d) { return (d.path.empty() ? std::string("<root>") : d.path) + ": " + d.message; }

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"protocol-sim", "geometry-sweep", "grating-design", "rate-table",
                                                 "tradeoff-curve"};
  return names;
}

std::vector<Diagnostic> validate_config(const nlohmann::json& config, std::string_view command) {
  std::vector<Diagnostic> diags;
  parse(config, command, diags);
  return diags;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

int run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  const bool validate_only = opt.command == "validate";
  try {
    const std::string text = read_file(opt.config_path);
    json root;
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      err << "config: invalid JSON: " << e.what() << '\n';
      return kExitSchema;
    }
    std::vector<Diagnostic> diags;
    const Parsed parsed = parse(root, validate_only ? std::string_view{} : std::string_view{opt.command}, diags);
    if (validate_only) {
      for (const auto& d : diags) out << format(d) << '\n';
      if (diags.empty()) out << "ok\n";
      return diags.empty() ? kExitOk : kExitSchema;
    }
    if (!diags.empty()) {
      for (const auto& d : diags) err << "config: " << format(d) << '\n';
      return kExitSchema;
    }
    const std::string fmt_name = opt.format.empty() ? (opt.command == "protocol-sim" ? "json" : "csv") : opt.format;
    if (fmt_name != "csv" && fmt_name != "json") {
      err << "unknown format '" << fmt_name << "'\n";
      return kExitUsage;
    }
    const bool as_json = fmt_name == "json";
    const std::uint64_t seed = opt.seed ? *opt.seed : parsed.doc.seed.value_or(1);
    const unsigned threads = std::max(1u, opt.threads);
    Output result;
    const std::string& cmd = parsed.doc.command;
    if (cmd == "protocol-sim")
      result = run_protocol_sim(parsed, as_json, seed, threads);
    else if (cmd == "rate-table")
      result = run_rate_table(parsed, as_json, threads);
    else if (cmd == "geometry-sweep")
      result = run_geometry(parsed, as_json, seed, threads);
    else if (cmd == "tradeoff-curve")
      result = run_tradeoff(parsed, as_json, threads);
    else
      result = run_grating(parsed, as_json);

    if (opt.out_path.empty()) {
      out << result.text;
      return kExitOk;
    }
    write_file(opt.out_path, result.text);
    const json manifest = {{"tool", "pme"},
                           {"version", PME_VERSION},
                           {"command", cmd},
                           {"config", opt.config_path},
                           {"config_sha256", sha256_hex(text)},
                           {"seed", seed},
                           {"format", fmt_name},
                           {"output", opt.out_path},
                           {"output_sha256", sha256_hex(result.text)},
                           {"rows", result.rows}};
    write_file(opt.out_path + ".manifest.json", manifest.dump(2) + "\n");
    return kExitOk;
  } catch (const IoError& e) {
    err << "io: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "config: " << e.what() << '\n';
    return kExitSchema;
  } catch (const std::exception& e) {
    err << "numerical: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace pme::cli
