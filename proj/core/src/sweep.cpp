#include "tlsphonon/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <mutex>
#include <thread>

#include "tlsphonon/csv.hpp"
#include "tlsphonon/errors.hpp"
#include "tlsphonon/spectrum.hpp"

namespace tlsphonon {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    std::string part(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    const auto b = part.find_first_not_of(" \t");
    const auto e = part.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string{} : part.substr(b, e - b + 1));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct QuantityInfo {
  std::string_view name;
  std::vector<Column> columns;
};

const std::vector<QuantityInfo>& quantity_table() {
  static const std::vector<QuantityInfo> table = {
      {"G", {{"G", "rad/s"}}},
      {"G0", {{"G0", "rad/s"}}},
      {"Gd", {{"Gd", "rad/s"}}},
      {"P_th", {{"P_th", "W"}}},
      {"P_th0", {{"P_th0", "W"}}},
      {"P_thd", {{"P_thd", "W"}}},
      {"N_b", {{"N_b", ""}}},
      {"delta_n", {{"delta_n", ""}}},
      {"E", {{"Re_E_plus", "rad/s"}, {"Im_E_plus", "rad/s"}, {"Re_E_minus", "rad/s"}, {"Im_E_minus", "rad/s"}}},
      {"gap", {{"gap", "rad/s"}}},
      {"L", {{"L", ""}}},
      {"phase", {{"phase", "", true}}},
      {"gamma_q_EP", {{"gamma_q_EP", "rad/s"}}},
      {"gamma_q_min", {{"gamma_q_min", "rad/s"}}},
      {"n_b", {}},  // always present as its own column
  };
  return table;
}

const QuantityInfo* find_quantity(std::string_view name) {
  for (const auto& q : quantity_table()) {
    if (q.name == name) return &q;
  }
  return nullptr;
}

bool needs_spectrum(const std::vector<std::string>& quantities) {
  for (const auto& q : quantities) {
    if (q == "E" || q == "gap" || q == "L" || q == "phase" || q == "gamma_q_EP" || q == "gamma_q_min") return true;
  }
  return false;
}

std::string unit_of(std::string_view key) {
  const ParameterKeyInfo* info = find_parameter_key(key);
  if (!info) return "";
  switch (info->unit_class) {
    case UnitClass::AngularRate: return "rad/s";
    case UnitClass::Length: return "m";
    case UnitClass::Mass: return "kg";
    case UnitClass::Power: return "W";
    case UnitClass::Energy: return "J";
    case UnitClass::Pressure: return "Pa";
    case UnitClass::Volume: return "m^3";
    case UnitClass::Dimensionless: return "";
  }
  return "";
}

struct PointResult {
  double n_b = nan;
  GainResult gain;
  std::optional<SpectrumResult> spectrum;
  std::string error;
  bool non_converged = false;
};

PointResult evaluate_point(const SweepSpec& spec, const std::vector<double>& coords, bool spectrum) {
  PointResult out;
  try {
    SystemParams params = spec.base;
    for (std::size_t a = 0; a < spec.axes.size(); ++a) set_parameter(params, spec.axes[a].key, coords[a]);
    validate(params);

    if (spec.mode.self_consistent) {
      const FixedPointReport fp = solve_nb_fixed_point(params, spec.fixed_point);
      out.n_b = fp.n_b_star;
      if (!fp.converged) {
        out.non_converged = true;
        out.error = "fixed point not converged after " + std::to_string(fp.iterations) + " iterations";
        if (!fp.note.empty()) out.error += " (" + fp.note + ")";
        return out;
      }
    } else {
      out.n_b = spec.mode.value;
    }
    out.gain = gain(params, out.n_b);
    if (spectrum) out.spectrum = eigenvalues(effective_params(params, std::max(1.0, out.n_b)));
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string tool_version() { return TLSPHONON_VERSION; }

std::vector<double> SweepAxis::values() const {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    v[i] = scale == AxisScale::Log ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
  }
  // Pin the endpoints so they are exact.
  v.front() = lo;
  if (count > 1) v.back() = hi;
  return v;
}

SweepAxis parse_axis(std::string_view text, const SystemParams& ctx) {
  const auto parts = split(text, ':');
  if (parts.size() < 4 || parts.size() > 5) {
    throw ConfigError("axis", 0, "key:lo:hi:count[:linear|log]", "got '" + std::string(text) + "'");
  }
  SweepAxis axis;
  axis.key = parts[0];
  if (!find_parameter_key(axis.key)) throw ConfigError(axis.key, 0, "a parameter key", "unknown sweep axis");
  axis.lo = parse_parameter_value(axis.key, parts[1], ctx);
  axis.hi = parse_parameter_value(axis.key, parts[2], ctx);
  const auto& c = parts[3];
  const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), axis.count);
  if (ec != std::errc{} || ptr != c.data() + c.size()) {
    throw ConfigError(axis.key, 0, "integer point count", "got '" + c + "'");
  }
  if (parts.size() == 5) {
    if (parts[4] == "log") axis.scale = AxisScale::Log;
    else if (parts[4] == "linear" || parts[4] == "lin") axis.scale = AxisScale::Linear;
    else throw ConfigError(axis.key, 0, "linear or log", "got '" + parts[4] + "'");
  }
  return axis;
}

std::string format_axis(const SweepAxis& axis) {
  const auto* info = find_parameter_key(axis.key);
  const std::string unit = info ? " " + std::string(info->canonical_unit) : "";
  return axis.key + ":" + csv::number(axis.lo) + unit + ":" + csv::number(axis.hi) + unit + ":" +
         std::to_string(axis.count) +
         (axis.scale == AxisScale::Log ? ":log" : ":linear");
}

NbMode NbMode::parse(std::string_view text) {
  NbMode m;
  if (text == "self-consistent") {
    m.self_consistent = true;
    return m;
  }
  constexpr std::string_view prefix = "fixed-nb:";
  if (text.substr(0, prefix.size()) == prefix) {
    const std::string_view v = text.substr(prefix.size());
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), m.value);
    if (ec == std::errc{} && ptr == v.data() + v.size() && m.value >= 0.0 && std::isfinite(m.value)) return m;
  }
  throw ConfigError("mode", 0, "fixed-nb:<value >= 0> or self-consistent", "got '" + std::string(text) + "'");
}

std::string NbMode::str() const { return self_consistent ? "self-consistent" : "fixed-nb:" + csv::number(value); }

const std::vector<std::string>& known_quantities() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& q : quantity_table()) v.emplace_back(q.name);
    return v;
  }();
  return names;
}

void check_spec(const SweepSpec& spec) {
  if (spec.quantities.empty()) throw ConfigError("quantities", 0, "at least one quantity", "the list is empty");
  for (const auto& q : spec.quantities) {
    if (!find_quantity(q)) throw ConfigError("quantities", 0, "one of G G0 Gd P_th P_th0 P_thd N_b delta_n E gap L phase gamma_q_EP gamma_q_min n_b", "unknown quantity '" + q + "'");
  }
  if (spec.axes.size() > 2) throw ConfigError("axis", 0, "at most 2 axes", std::to_string(spec.axes.size()) + " given");
  for (std::size_t i = 0; i < spec.axes.size(); ++i) {
    const SweepAxis& a = spec.axes[i];
    if (!find_parameter_key(a.key)) throw ConfigError(a.key, 0, "a parameter key", "unknown sweep axis");
    for (std::size_t j = 0; j < i; ++j) {
      if (spec.axes[j].key == a.key) throw ConfigError(a.key, 0, "distinct axes", "axis repeated");
    }
    if (a.count < 2) throw ConfigError(a.key, 0, "point count >= 2", "got " + std::to_string(a.count));
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi)) throw ConfigError(a.key, 0, "finite bounds", "non-finite axis bound");
    if (a.scale == AxisScale::Log && !(a.lo > 0.0 && a.hi > 0.0)) {
      throw ConfigError(a.key, 0, "positive bounds for a log axis", format_axis(a));
    }
    // Endpoints must give valid parameters.
    for (double v : {a.lo, a.hi}) {
      SystemParams p = spec.base;
      try {
        set_parameter(p, a.key, v);
        validate(p);
      } catch (const std::exception& e) {
        throw ConfigError(a.key, 0, "axis range within the parameter invariants", e.what());
      }
    }
  }
  if (!spec.mode.self_consistent && !(spec.mode.value >= 0.0)) {
    throw ConfigError("mode", 0, "fixed-nb value >= 0", spec.mode.str());
  }
  if (spec.axes.empty()) {
    try {
      validate(spec.base);
    } catch (const std::exception& e) {
      throw ConfigError("params", 0, "valid parameters", e.what());
    }
  }
}

std::optional<std::size_t> SweepTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

double SweepTable::number(std::size_t row, std::string_view column) const {
  const auto idx = column_index(column);
  if (!idx) throw ParameterError("no column '" + std::string(column) + "'");
  return rows.at(row).cells.at(*idx).number;
}

std::vector<double> SweepTable::column_values(std::string_view column) const {
  const auto idx = column_index(column);
  if (!idx) throw ParameterError("no column '" + std::string(column) + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.cells[*idx].number);
  return out;
}

bool SweepTable::has_errors() const {
  return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.error.empty(); });
}

bool SweepTable::has_non_convergence() const {
  return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.non_converged; });
}

SweepTable run_sweep(const SweepSpec& spec, unsigned jobs) {
  check_spec(spec);

  std::vector<std::vector<double>> axis_values;
  std::size_t total = 1;
  for (const auto& a : spec.axes) {
    axis_values.push_back(a.values());
    total *= axis_values.back().size();
  }
  const std::size_t inner = spec.axes.empty() ? 1 : axis_values.back().size();
  auto coords_of = [&](std::size_t index) {
    std::vector<double> c(spec.axes.size());
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      const std::size_t n = axis_values[a].size();
      c[a] = axis_values[a][index % n];
      index /= n;
    }
    return c;
  };

  const bool spectrum = needs_spectrum(spec.quantities);
  std::vector<PointResult> results(total);
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, total));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) results[i] = evaluate_point(spec, coords_of(i), spectrum);
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  // Continuity tracking of E+/E- along each line of the fastest axis.
  if (spectrum) {
    for (std::size_t start = 0; start < total; start += inner) {
      std::vector<SpectrumResult> line;
      std::vector<std::size_t> idx;
      for (std::size_t i = start; i < start + inner; ++i) {
        if (results[i].spectrum) {
          line.push_back(*results[i].spectrum);
          idx.push_back(i);
        }
      }
      track_branches(line);
      for (std::size_t k = 0; k < idx.size(); ++k) results[idx[k]].spectrum = line[k];
    }
  }

  SweepTable table;
  for (const auto& a : spec.axes) table.columns.push_back({a.key, unit_of(a.key)});
  table.columns.push_back({"n_b", ""});
  for (const auto& q : known_quantities()) {
    if (std::find(spec.quantities.begin(), spec.quantities.end(), q) == spec.quantities.end()) continue;
    for (const auto& c : find_quantity(q)->columns) table.columns.push_back(c);
  }

  table.rows.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    const PointResult& r = results[i];
    const bool ok = r.error.empty();
    SweepRow row;
    row.error = r.error;
    row.non_converged = r.non_converged;
    for (double c : coords_of(i)) row.cells.push_back({c, {}});
    row.cells.push_back({r.n_b, {}});
    const GainResult& g = r.gain;
    for (std::size_t c = spec.axes.size() + 1; c < table.columns.size(); ++c) {
      const std::string& name = table.columns[c].name;
      Cell cell{nan, {}};
      if (ok) {
        const SpectrumResult* s = r.spectrum ? &*r.spectrum : nullptr;
        if (name == "G") cell.number = g.G;
        else if (name == "G0") cell.number = g.G0;
        else if (name == "Gd") cell.number = g.Gd;
        else if (name == "P_th") cell.number = g.P_th;
        else if (name == "P_th0") cell.number = g.P_th0;
        else if (name == "P_thd") cell.number = g.P_thd;
        else if (name == "N_b") cell.number = g.N_b;
        else if (name == "delta_n") cell.number = g.delta_n;
        else if (s && name == "Re_E_plus") cell.number = s->E_plus.real();
        else if (s && name == "Im_E_plus") cell.number = s->E_plus.imag();
        else if (s && name == "Re_E_minus") cell.number = s->E_minus.real();
        else if (s && name == "Im_E_minus") cell.number = s->E_minus.imag();
        else if (s && name == "gap") cell.number = s->gap;
        else if (s && name == "L") cell.number = s->localization;
        else if (s && name == "phase") cell.text = std::string(phase_name(s->phase));
        else if (s && name == "gamma_q_EP") cell.number = s->gamma_q_ep;
        else if (s && name == "gamma_q_min") cell.number = s->gamma_q_min;
      }
      row.cells.push_back(std::move(cell));
    }
    table.rows.push_back(std::move(row));
  }

  Provenance& p = table.provenance;
  p.tool_version = tool_version();
  p.timestamp = utc_timestamp();
  p.spec_name = spec.name;
  p.resolved_config = to_config_text(spec.base);
  p.mode = spec.mode.str();
  for (const auto& a : spec.axes) p.axes.push_back(format_axis(a));
  p.quantities = spec.quantities;
  p.stated = spec.stated;
  p.defaulted = spec.defaulted;
  p.notes = spec.notes;
  if (spectrum) p.notes.push_back("spectrum columns use the phonon sector max(1, n_b)");
  return table;
}

void apply_sweep_config(const ConfigDocument& doc, SweepSpec& spec) {
  auto line_of = [&](std::string_view key) {
    const auto e = doc.find(key);
    return e ? e->line : 0;
  };
  auto rethrow = [&](std::string_view key, const ConfigError& e) {
    throw ConfigError(std::string(key), line_of(key), e.expected(), e.detail());
  };

  std::vector<SweepAxis> axes;
  for (std::string_view key : {"sweep.axis", "sweep.axis1", "sweep.axis2"}) {
    if (const auto e = doc.find(key)) {
      try {
        axes.push_back(parse_axis(e->value, spec.base));
      } catch (const ConfigError& err) {
        rethrow(key, err);
      }
    }
  }
  if (!axes.empty()) {
    spec.axes = std::move(axes);
    // An axis overrides the preset choice, so its range is no longer a guess.
    for (const auto& a : spec.axes) {
      std::erase(spec.defaulted, "axis:" + a.key);
    }
  }
  if (const auto e = doc.find("sweep.quantities")) {
    spec.quantities.clear();
    for (auto& q : split(e->value, ',')) {
      if (!q.empty()) spec.quantities.push_back(q);
    }
  }
  if (const auto e = doc.find("sweep.mode")) {
    try {
      spec.mode = NbMode::parse(e->value);
    } catch (const ConfigError& err) {
      rethrow("sweep.mode", err);
    }
  }
  if (const auto e = doc.find("sweep.name")) spec.name = e->value;
}

}  // namespace tlsphonon
