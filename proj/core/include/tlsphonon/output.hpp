#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tlsphonon/sweep.hpp"

namespace tlsphonon {

struct OutputFormats {
  bool csv = true;
  bool plot = false;

  static OutputFormats parse(std::string_view list);  // "csv", "plot", "csv,plot"
};

/// Header plus one line per row. Holds no timestamps, so identical tables
/// give identical bytes.
std::string table_csv(const SweepTable& table);

/// gnuplot program that reads `csv_name` (same directory) and writes SVGs.
std::string plot_script(const SweepTable& table, const std::string& csv_name);

/// Provenance, column units and the file list as JSON.
std::string provenance_json(const SweepTable& table, const std::vector<std::string>& files);

/// Writes <name>.csv and the <name>.provenance.json sidecar, plus
/// <name>.gp when a plot is requested (the plot needs the CSV, so it is
/// always written). Returns the paths written. Throws ConfigError for an
/// empty quantity list and IoError naming the path on any write failure.
std::vector<std::filesystem::path> emit_outputs(const SweepTable& table, const std::filesystem::path& dir,
                                                OutputFormats formats);

/// Creates parent directories as needed; IoError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace tlsphonon
