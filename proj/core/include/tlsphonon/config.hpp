#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tlsphonon/params.hpp"
#include "tlsphonon/units.hpp"

namespace tlsphonon {

/// One `key = value` line of a parameter file.
struct ConfigEntry {
  std::string key;  // sweep-section keys are prefixed "sweep."
  std::string value;
  int line = 0;  // 0 for command-line overrides
};

/// Ordered assignments from a parameter file plus command-line overrides.
///
/// File schema (one assignment per line):
///
///     # comment
///     gamma   = "6.43 MHz"
///     omega_m = "23.4 2pi*MHz"
///     Delta   = "0.5 omega_m"
///     [sweep]
///     mode    = "fixed-nb:1"
///
/// Sections [optical], [mechanical], [tls], [material] only group keys
/// visually; [sweep] holds run settings rather than physics.
class ConfigDocument {
 public:
  static ConfigDocument parse(std::string_view text);
  static ConfigDocument load(const std::filesystem::path& path);  // IoError, ConfigError

  /// Applies a `key=value` override; it takes precedence over file entries.
  void set_override(std::string_view assignment);
  void set(std::string key, std::string value, int line = 0);

  const std::vector<ConfigEntry>& entries() const noexcept { return entries_; }
  std::optional<ConfigEntry> find(std::string_view key) const;

 private:
  std::vector<ConfigEntry> entries_;
};

struct ParameterKeyInfo {
  std::string_view key;
  UnitClass unit_class;
  std::string_view canonical_unit;  // used when serializing
  std::string_view description;
};

const std::vector<ParameterKeyInfo>& parameter_keys();
const ParameterKeyInfo* find_parameter_key(std::string_view key);

/// Resolves the physics entries of `doc` on top of `base`. Relative rate tags
/// ("0.5 omega_m", "1 gamma") are resolved after all absolute values.
/// Throws ConfigError naming the key and line on any malformed value.
SystemParams build_params(const ConfigDocument& doc, const SystemParams& base);

/// Parses a single value for `key` (used by sweep axes and --set). Throws
/// ConfigError on unknown keys or malformed values.
double parse_parameter_value(std::string_view key, std::string_view value, const SystemParams& ctx);

/// Sets one parameter in SI units (rad/s, W, ...). Throws ParameterError for
/// unknown keys or keys that do not apply to the current defect form.
void set_parameter(SystemParams& params, std::string_view key, double si_value);
double get_parameter(const SystemParams& params, std::string_view key);

/// Writes every parameter in canonical units with 17 significant digits;
/// parsing the text back reproduces `params` bit for bit.
std::string to_config_text(const SystemParams& params);

}  // namespace tlsphonon
