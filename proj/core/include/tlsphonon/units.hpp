#pragma once

#include <numbers>
#include <string>
#include <string_view>

namespace tlsphonon {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double electron_volt = 1.602176634e-19;  // J
inline constexpr double two_pi = 2.0 * std::numbers::pi;
}  // namespace constants

/// Physical dimension a configuration value must carry.
enum class UnitClass {
  AngularRate,  // stored as rad/s
  Length,       // m
  Mass,         // kg
  Power,        // W
  Energy,       // J
  Pressure,     // Pa
  Volume,       // m^3
  Dimensionless,
};

std::string_view unit_class_name(UnitClass cls);

/// Result of parsing "6.43 MHz", "0.5 omega_m", "193 2pi*THz" and the like.
///
/// Frequency tags follow one convention throughout: "Hz", "kHz", "MHz", ...
/// are plain multiples of rad/s (no implicit 2pi), and a 2pi factor must be
/// spelled out as a "2pi" prefix ("2pi*MHz", "2pi·MHz", "2π MHz").
/// A reference tag ("omega_m", "gamma") leaves `reference` set and the caller
/// multiplies by the resolved reference value.
struct ParsedQuantity {
  double magnitude = 0.0;
  double scale = 1.0;
  std::string reference;

  bool is_relative() const noexcept { return !reference.empty(); }
  double si_value() const noexcept { return magnitude * scale; }
};

/// Throws std::invalid_argument with a human-readable reason on failure.
ParsedQuantity parse_quantity(std::string_view text, UnitClass cls);

/// Reference quantities usable as relative units for angular rates.
bool is_rate_reference(std::string_view name);

/// Convenience converters for the common tags.
constexpr double mhz(double v) { return v * 1e6; }
constexpr double two_pi_mhz(double v) { return v * constants::two_pi * 1e6; }

}  // namespace tlsphonon
