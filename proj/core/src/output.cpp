#include "tlsphonon/output.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "tlsphonon/csv.hpp"
#include "tlsphonon/errors.hpp"

namespace tlsphonon {

namespace {

std::string cell_text(const Cell& c, const Column& col) {
  if (col.text) return csv::field(c.text);
  if (std::isnan(c.number)) return "nan";
  return csv::number(c.number);
}

// Display scaling for plot axes.
struct Scaling {
  double factor = 1.0;
  std::string label;
};

Scaling display(const Column& col) {
  if (col.unit == "rad/s") return {1e6, col.name + " (10^6 rad/s)"};
  if (col.unit == "W") return {1e-6, col.name + " (uW)"};
  if (col.unit.empty()) return {1.0, col.name};
  return {1.0, col.name + " (" + col.unit + ")"};
}

std::string gp_string(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "''";
    else out += c;
  }
  return out + "'";
}

// Value columns grouped into one plot each; E splits into real and imaginary parts.
std::vector<std::vector<std::size_t>> plot_groups(const SweepTable& t, std::size_t first) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> re, im;
  for (std::size_t c = first; c < t.columns.size(); ++c) {
    const Column& col = t.columns[c];
    if (col.text) continue;
    if (col.name.rfind("Re_E_", 0) == 0) re.push_back(c);
    else if (col.name.rfind("Im_E_", 0) == 0) im.push_back(c);
    else groups.push_back({c});
  }
  if (!re.empty()) groups.insert(groups.begin(), re);
  if (!im.empty()) groups.insert(groups.begin() + (re.empty() ? 0 : 1), im);
  return groups;
}

}  // namespace

OutputFormats OutputFormats::parse(std::string_view list) {
  OutputFormats f{false, false};
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t pos = std::min(list.find(',', start), list.size());
    const std::string_view item = list.substr(start, pos - start);
    if (item == "csv") f.csv = true;
    else if (item == "plot" || item == "plot-script") f.plot = true;
    else throw ConfigError("format", 0, "csv, plot or csv,plot", "got '" + std::string(item) + "'");
    start = pos + 1;
  }
  return f;
}

std::string table_csv(const SweepTable& table) {
  std::string out;
  for (const auto& col : table.columns) out += csv::field(col.name) + ',';
  out += "error\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) out += cell_text(row.cells[c], table.columns[c]) + ',';
    out += csv::field(row.error) + '\n';
  }
  return out;
}

std::string plot_script(const SweepTable& table, const std::string& csv_name) {
  const std::size_t n_axes = table.provenance.axes.size();
  const std::string stem = csv_name.substr(0, csv_name.rfind('.'));
  std::ostringstream gp;
  gp << "# gnuplot script; run from the directory holding " << csv_name << "\n"
     << "set datafile separator ','\n"
     << "set datafile missing 'nan'\n"
     << "set terminal svg size 900,600 dynamic\n"
     << "set grid\n"
     << "data = " << gp_string(csv_name) << "\n";
  if (n_axes == 0) {
    gp << "# single-point table; nothing to plot\n";
    return gp.str();
  }

  // Axis metadata comes from the provenance "key:lo:hi:count:scale" strings.
  auto axis_parts = [&](std::size_t a) {
    std::vector<std::string> parts;
    std::stringstream ss(table.provenance.axes[a]);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    return parts;
  };
  const std::size_t x_axis = n_axes - 1;  // fastest axis on the abscissa
  const auto xp = axis_parts(x_axis);
  const Scaling xs = display(table.columns[x_axis]);
  const bool log_x = xp.size() == 5 && xp[4] == "log";
  const std::size_t inner = static_cast<std::size_t>(std::stoul(xp[3]));
  const std::size_t outer = n_axes == 2 ? static_cast<std::size_t>(std::stoul(axis_parts(0)[3])) : 1;
  const Scaling os = n_axes == 2 ? display(table.columns[0]) : Scaling{};

  gp << "set xlabel " << gp_string(xs.label) << "\n";
  if (log_x) gp << "set logscale x\n";

  const bool heat_map = n_axes == 2 && outer > 12;
  for (const auto& group : plot_groups(table, n_axes)) {
    const Column& first = table.columns[group.front()];
    const Scaling ys = display(first);
    std::string title = first.name;
    if (first.name.rfind("Re_E_", 0) == 0) title = "Re_E";
    if (first.name.rfind("Im_E_", 0) == 0) title = "Im_E";
    gp << "\nset output " << gp_string(stem + "_" + title + ".svg") << "\n";
    if (heat_map) {
      gp << "set ylabel " << gp_string(os.label) << "\n"
         << "set cblabel " << gp_string(ys.label) << "\n"
         << "plot data skip 1 using ($" << (x_axis + 1) << "/" << xs.factor << "):($1/" << os.factor << "):($"
         << (group.front() + 1) << "/" << ys.factor << ") with image notitle\n";
      continue;
    }
    gp << "set ylabel " << gp_string(n_axes == 2 || group.size() > 1 ? title : ys.label) << "\n";
    gp << "plot ";
    bool first_curve = true;
    for (std::size_t c : group) {
      const Scaling cs = display(table.columns[c]);
      for (std::size_t k = 0; k < outer; ++k) {
        if (!first_curve) gp << ", \\\n     ";
        first_curve = false;
        std::string label = table.columns[c].name;
        gp << "data skip 1";
        if (n_axes == 2) {
          gp << " every ::" << k * inner << "::" << (k + 1) * inner - 1;
          label += " @ " + table.columns[0].name + "=" + csv::number(table.rows.at(k * inner).cells[0].number / os.factor);
        }
        gp << " using ($" << (x_axis + 1) << "/" << xs.factor << "):($" << (c + 1) << "/" << cs.factor
           << ") with lines title " << gp_string(label);
      }
    }
    gp << "\n";
  }
  return gp.str();
}

std::string provenance_json(const SweepTable& table, const std::vector<std::string>& files) {
  const Provenance& p = table.provenance;
  nlohmann::ordered_json j;
  j["tool"] = "tlsphonon";
  j["version"] = p.tool_version;
  j["timestamp"] = p.timestamp;
  j["name"] = p.spec_name;
  j["mode"] = p.mode;
  j["axes"] = p.axes;
  j["quantities"] = p.quantities;
  j["stated"] = p.stated;
  j["defaulted"] = p.defaulted;
  j["notes"] = p.notes;
  j["resolved_config"] = p.resolved_config;
  nlohmann::ordered_json cols = nlohmann::ordered_json::array();
  for (const auto& c : table.columns) cols.push_back({{"name", c.name}, {"unit", c.unit}});
  cols.push_back({{"name", "error"}, {"unit", ""}});
  j["columns"] = cols;
  j["rows"] = table.rows.size();
  std::size_t failed = 0;
  for (const auto& r : table.rows) failed += r.error.empty() ? 0 : 1;
  j["failed_rows"] = failed;
  j["files"] = files;
  return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path().string(), ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError(path.string(), "write failed");
}

std::vector<std::filesystem::path> emit_outputs(const SweepTable& table, const std::filesystem::path& dir,
                                                OutputFormats formats) {
  if (table.provenance.quantities.empty()) {
    throw ConfigError("quantities", 0, "at least one quantity", "nothing to write");
  }
  if (!formats.csv && !formats.plot) throw ConfigError("format", 0, "csv and/or plot", "no format selected");

  const std::string stem = table.provenance.spec_name.empty() ? "sweep" : table.provenance.spec_name;
  const std::string csv_name = stem + ".csv";
  std::vector<std::filesystem::path> written;
  std::vector<std::string> names;

  write_text_file(dir / csv_name, table_csv(table));
  written.push_back(dir / csv_name);
  names.push_back(csv_name);
  if (formats.plot) {
    const std::string gp_name = stem + ".gp";
    write_text_file(dir / gp_name, plot_script(table, csv_name));
    written.push_back(dir / gp_name);
    names.push_back(gp_name);
  }
  const std::string side = stem + ".provenance.json";
  write_text_file(dir / side, provenance_json(table, names));
  written.push_back(dir / side);
  return written;
}

}  // namespace tlsphonon
