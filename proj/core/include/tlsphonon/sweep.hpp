#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tlsphonon/config.hpp"
#include "tlsphonon/params.hpp"
#include "tlsphonon/steadystate.hpp"

namespace tlsphonon {

enum class AxisScale { Linear, Log };

struct SweepAxis {
  std::string key;  // parameter key, e.g. "gamma_q"
  double lo = 0.0;  // SI units
  double hi = 0.0;
  int count = 2;
  AxisScale scale = AxisScale::Linear;

  std::vector<double> values() const;
};

/// Parses "key:lo:hi:count[:linear|log]"; the bounds take unit tags and may
/// be relative to omega_m or gamma of `ctx`.
SweepAxis parse_axis(std::string_view text, const SystemParams& ctx);
std::string format_axis(const SweepAxis& axis);

/// Phonon number fed to the gain and spectrum at every grid point.
struct NbMode {
  bool self_consistent = false;
  double value = 1.0;  // fixed-nb value

  static NbMode parse(std::string_view text);  // "fixed-nb:<v>" or "self-consistent"
  std::string str() const;
};

/// Recognized quantity names, in canonical column order.
const std::vector<std::string>& known_quantities();

struct SweepSpec {
  std::string name = "sweep";
  SystemParams base;
  std::vector<SweepAxis> axes;
  std::vector<std::string> quantities;
  NbMode mode;
  FixedPointOptions fixed_point;
  // Parameters a figure states, and those filled with documented guesses.
  std::vector<std::string> stated;
  std::vector<std::string> defaulted;
  std::vector<std::string> notes;
};

/// Throws ConfigError when the spec cannot be evaluated.
void check_spec(const SweepSpec& spec);

struct Column {
  std::string name;
  std::string unit;
  bool text = false;
};

struct Cell {
  double number = 0.0;
  std::string text;
};

struct SweepRow {
  std::vector<Cell> cells;
  std::string error;  // empty when the point evaluated cleanly
  bool non_converged = false;
};

struct Provenance {
  std::string tool_version;
  std::string timestamp;  // UTC, ISO 8601
  std::string spec_name;
  std::string resolved_config;
  std::string mode;
  std::vector<std::string> axes;
  std::vector<std::string> quantities;
  std::vector<std::string> stated;
  std::vector<std::string> defaulted;
  std::vector<std::string> notes;
};

struct SweepTable {
  std::vector<Column> columns;  // the trailing "error" column is implicit
  std::vector<SweepRow> rows;
  Provenance provenance;

  std::optional<std::size_t> column_index(std::string_view name) const;
  double number(std::size_t row, std::string_view column) const;
  std::vector<double> column_values(std::string_view column) const;
  bool has_errors() const;
  bool has_non_convergence() const;
};

/// Evaluates every grid point (row-major over the axes, last axis fastest)
/// on up to `jobs` worker threads; jobs = 0 uses the hardware concurrency.
/// Point failures land in the error column and never abort the sweep.
SweepTable run_sweep(const SweepSpec& spec, unsigned jobs = 0);

/// Reads axes, quantities and mode from the [sweep] section of `doc`,
/// applying them over `spec` (config file and overrides beat the preset).
void apply_sweep_config(const ConfigDocument& doc, SweepSpec& spec);

std::string tool_version();

}  // namespace tlsphonon
