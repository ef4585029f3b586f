#include "tlsphonon/config.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "tlsphonon/errors.hpp"

namespace tlsphonon {

namespace {

constexpr std::array<std::string_view, 5> kMaterialKeys{"D_T", "Delta_0", "Delta_a", "Y", "V_m"};
constexpr std::array<std::string_view, 5> kCosmeticSections{"optical", "mechanical", "tls",
                                                            "material", "drive"};

bool is_material_key(std::string_view key) {
  return std::find(kMaterialKeys.begin(), kMaterialKeys.end(), key) != kMaterialKeys.end();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Drops a trailing '#' comment that is not inside double quotes.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string unquote(std::string_view v) {
  v = trim(v);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
  return std::string(trim(v));
}

MaterialTls& as_material(SystemParams& p) {
  if (auto* m = std::get_if<MaterialTls>(&p.defect)) return *m;
  double loss = 0.0;
  if (const auto* t = std::get_if<TlsParams>(&p.defect)) loss = t->loss;
  p.defect = MaterialTls{MaterialParams{}, loss};
  return std::get<MaterialTls>(p.defect);
}

TlsParams& as_direct(SystemParams& p, std::string_view key) {
  if (std::holds_alternative<MaterialTls>(p.defect)) {
    throw ParameterError("parameter '" + std::string(key) +
                         "' is derived from material constants in this configuration");
  }
  if (auto* t = std::get_if<TlsParams>(&p.defect)) return *t;
  p.defect = TlsParams{p.mechanical.freq, 0.0, 0.0};
  return std::get<TlsParams>(p.defect);
}

}  // namespace

ConfigDocument ConfigDocument::parse(std::string_view text) {
  ConfigDocument doc;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    line = trim(strip_comment(line));
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("", line_no, "[section]", "unterminated section header");
      std::string name(trim(line.substr(1, line.size() - 2)));
      if (name == "sweep") {
        section = "sweep";
      } else if (std::find(kCosmeticSections.begin(), kCosmeticSections.end(), name) !=
                 kCosmeticSections.end()) {
        section.clear();
      } else {
        throw ConfigError(name, line_no, "one of [optical] [mechanical] [tls] [material] [sweep]",
                          "unknown section");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", line_no, "key = value", "missing '='");
    }
    std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("", line_no, "key = value", "empty key");
    std::string value = unquote(line.substr(eq + 1));
    if (!section.empty()) key = section + "." + key;
    doc.entries_.push_back({std::move(key), std::move(value), line_no});
    if (end == text.size()) break;
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path.string(), "read failed");
  return parse(ss.str());
}

void ConfigDocument::set_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(std::string(assignment), 0, "key=value", "override is missing '='");
  }
  std::string key(trim(assignment.substr(0, eq)));
  if (key.empty()) throw ConfigError("", 0, "key=value", "empty key in override");
  set(std::move(key), unquote(assignment.substr(eq + 1)), 0);
}

void ConfigDocument::set(std::string key, std::string value, int line) {
  entries_.push_back({std::move(key), std::move(value), line});
}

std::optional<ConfigEntry> ConfigDocument::find(std::string_view key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->key == key) return *it;
  }
  return std::nullopt;
}

const std::vector<ParameterKeyInfo>& parameter_keys() {
  static const std::vector<ParameterKeyInfo> keys{
      {"omega_c", UnitClass::AngularRate, "rad/s", "cavity resonance frequency"},
      {"gamma", UnitClass::AngularRate, "rad/s", "optical loss rate"},
      {"J", UnitClass::AngularRate, "rad/s", "optical tunnelling between resonators"},
      {"R", UnitClass::Length, "m", "resonator radius"},
      {"P_l", UnitClass::Power, "W", "pump power"},
      {"Delta", UnitClass::AngularRate, "rad/s", "pump-cavity detuning"},
      {"omega_m", UnitClass::AngularRate, "rad/s", "mechanical frequency"},
      {"gamma_m", UnitClass::AngularRate, "rad/s", "mechanical damping rate"},
      {"m", UnitClass::Mass, "kg", "effective mass"},
      {"omega_q", UnitClass::AngularRate, "rad/s", "TLS transition frequency"},
      {"gamma_q", UnitClass::AngularRate, "rad/s", "TLS decay rate"},
      {"g_d", UnitClass::AngularRate, "rad/s", "TLS-phonon coupling"},
      {"D_T", UnitClass::Energy, "J", "deformation potential"},
      {"Delta_0", UnitClass::AngularRate, "rad/s", "tunnel splitting"},
      {"Delta_a", UnitClass::AngularRate, "rad/s", "asymmetry splitting"},
      {"Y", UnitClass::Pressure, "Pa", "Young's modulus"},
      {"V_m", UnitClass::Volume, "m^3", "mechanical mode volume"},
  };
  return keys;
}

const ParameterKeyInfo* find_parameter_key(std::string_view key) {
  for (const auto& k : parameter_keys()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

double parse_parameter_value(std::string_view key, std::string_view value, const SystemParams& ctx) {
  const ParameterKeyInfo* info = find_parameter_key(key);
  if (!info) throw ConfigError(std::string(key), 0, "a parameter key", "unknown parameter");
  ParsedQuantity q;
  try {
    q = parse_quantity(value, info->unit_class);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(key), 0, std::string(unit_class_name(info->unit_class)), e.what());
  }
  if (!q.is_relative()) return q.si_value();
  if (q.reference == "omega_m") return q.magnitude * ctx.mechanical.freq;
  return q.magnitude * ctx.optical.cavity_loss;
}

void set_parameter(SystemParams& p, std::string_view key, double v) {
  auto& o = p.optical;
  auto& m = p.mechanical;
  if (key == "omega_c") o.cavity_freq = v;
  else if (key == "gamma") o.cavity_loss = v;
  else if (key == "J") o.supermode_coupling = v;
  else if (key == "R") o.radius = v;
  else if (key == "P_l") o.pump_power = v;
  else if (key == "Delta") o.pump_detuning = v;
  else if (key == "omega_m") m.freq = v;
  else if (key == "gamma_m") m.loss = v;
  else if (key == "m") m.mass = v;
  else if (key == "omega_q") as_direct(p, key).freq = v;
  else if (key == "g_d") as_direct(p, key).coupling = v;
  else if (key == "gamma_q") {
    if (auto* mt = std::get_if<MaterialTls>(&p.defect)) mt->loss = v;
    else as_direct(p, key).loss = v;
  }
  else if (key == "D_T") as_material(p).material.deformation_potential = v;
  else if (key == "Delta_0") as_material(p).material.tunnel_splitting = v;
  else if (key == "Delta_a") as_material(p).material.asymmetry = v;
  else if (key == "Y") as_material(p).material.youngs_modulus = v;
  else if (key == "V_m") as_material(p).material.mode_volume = v;
  else throw ParameterError("unknown parameter '" + std::string(key) + "'");
}

double get_parameter(const SystemParams& p, std::string_view key) {
  const auto& o = p.optical;
  const auto& m = p.mechanical;
  if (key == "omega_c") return o.cavity_freq;
  if (key == "gamma") return o.cavity_loss;
  if (key == "J") return o.supermode_coupling;
  if (key == "R") return o.radius;
  if (key == "P_l") return o.pump_power;
  if (key == "Delta") return o.pump_detuning;
  if (key == "omega_m") return m.freq;
  if (key == "gamma_m") return m.loss;
  if (key == "m") return m.mass;
  if (key == "omega_q") return p.tls().freq;
  if (key == "gamma_q") return p.tls().loss;
  if (key == "g_d") return p.tls().coupling;
  if (is_material_key(key)) {
    const auto* mt = std::get_if<MaterialTls>(&p.defect);
    if (!mt) throw ParameterError("parameter '" + std::string(key) + "' requires a material-derived defect");
    const auto& mat = mt->material;
    if (key == "D_T") return mat.deformation_potential;
    if (key == "Delta_0") return mat.tunnel_splitting;
    if (key == "Delta_a") return mat.asymmetry;
    if (key == "Y") return mat.youngs_modulus;
    return mat.mode_volume;
  }
  throw ParameterError("unknown parameter '" + std::string(key) + "'");
}

SystemParams build_params(const ConfigDocument& doc, const SystemParams& base) {
  // Last assignment of each physics key wins; remember where it came from.
  std::map<std::string, ConfigEntry, std::less<>> latest;
  std::vector<std::string> order;
  for (const auto& e : doc.entries()) {
    if (e.key.rfind("sweep.", 0) == 0) continue;
    if (e.key != "defect" && !find_parameter_key(e.key)) {
      throw ConfigError(e.key, e.line, "a known parameter key", "unknown key");
    }
    if (!latest.count(e.key)) order.push_back(e.key);
    latest[e.key] = e;
  }

  SystemParams p = base;

  if (auto it = latest.find("defect"); it != latest.end()) {
    const std::string& v = it->second.value;
    if (v == "none") p.defect = std::monostate{};
    else if (v == "direct") { if (!std::holds_alternative<TlsParams>(p.defect)) p.defect = TlsParams{p.mechanical.freq, 0.0, 0.0}; }
    else if (v == "material") { as_material(p); }
    else throw ConfigError("defect", it->second.line, "none | direct | material", "got '" + v + "'");
  }

  const bool has_direct = latest.count("omega_q") || latest.count("g_d");
  const bool has_material = std::any_of(kMaterialKeys.begin(), kMaterialKeys.end(),
                                        [&](auto k) { return latest.count(std::string(k)) > 0; });
  if (has_direct && has_material) {
    const auto& e = latest.count("g_d") ? latest["g_d"] : latest["omega_q"];
    throw ConfigError(e.key, e.line, "either direct TLS keys or material keys",
                      "g_d/omega_q cannot be combined with D_T, Delta_0, Delta_a, Y, V_m");
  }
  if (has_material) as_material(p);
  if (has_direct && std::holds_alternative<MaterialTls>(p.defect)) {
    p.defect = TlsParams{p.mechanical.freq, std::get<MaterialTls>(p.defect).loss, 0.0};
  }

  struct Pending {
    const ConfigEntry* entry;
    ParsedQuantity q;
  };
  std::vector<Pending> relative;

  for (const auto& key : order) {
    if (key == "defect") continue;
    const ConfigEntry& e = latest[key];
    const ParameterKeyInfo* info = find_parameter_key(key);
    ParsedQuantity q;
    try {
      q = parse_quantity(e.value, info->unit_class);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(e.key, e.line, std::string(unit_class_name(info->unit_class)), ex.what());
    }
    if (q.is_relative()) {
      if (key == "omega_m" || key == "gamma") {
        throw ConfigError(e.key, e.line, "an absolute rate", "reference quantities cannot be relative");
      }
      relative.push_back({&e, q});
      continue;
    }
    try {
      set_parameter(p, key, q.si_value());
    } catch (const ParameterError& ex) {
      throw ConfigError(e.key, e.line, std::string(unit_class_name(info->unit_class)), ex.what());
    }
  }
  for (const auto& r : relative) {
    const double ref = r.q.reference == "omega_m" ? p.mechanical.freq : p.optical.cavity_loss;
    try {
      set_parameter(p, r.entry->key, r.q.magnitude * ref);
    } catch (const ParameterError& ex) {
      throw ConfigError(r.entry->key, r.entry->line, "angular rate", ex.what());
    }
  }
  return p;
}

std::string to_config_text(const SystemParams& params) {
  std::ostringstream os;
  auto emit = [&](std::string_view key) {
    const ParameterKeyInfo* info = find_parameter_key(key);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", get_parameter(params, key));
    os << key << " = \"" << buf << ' ' << info->canonical_unit << "\"\n";
  };
  os << "[optical]\n";
  for (auto k : {"omega_c", "gamma", "J", "R", "P_l", "Delta"}) emit(k);
  os << "\n[mechanical]\n";
  for (auto k : {"omega_m", "gamma_m", "m"}) emit(k);
  os << "\n[tls]\n";
  if (std::holds_alternative<TlsParams>(params.defect)) {
    os << "defect = \"direct\"\n";
    for (auto k : {"omega_q", "gamma_q", "g_d"}) emit(k);
  } else if (std::holds_alternative<MaterialTls>(params.defect)) {
    os << "defect = \"material\"\n";
    emit("gamma_q");
    os << "\n[material]\n";
    for (auto k : kMaterialKeys) emit(k);
  } else {
    os << "defect = \"none\"\n";
  }
  return os.str();
}

}  // namespace tlsphonon
