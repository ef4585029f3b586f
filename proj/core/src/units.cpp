#include "tlsphonon/units.hpp"

#include <array>
#include <charconv>
#include <stdexcept>
#include <utility>

namespace tlsphonon {

namespace {

struct UnitEntry {
  std::string_view tag;
  double scale;
};

constexpr std::array kRateUnits{
    UnitEntry{"rad/s", 1.0}, UnitEntry{"1/s", 1.0},  UnitEntry{"s^-1", 1.0},
    UnitEntry{"Hz", 1.0},    UnitEntry{"kHz", 1e3},  UnitEntry{"MHz", 1e6},
    UnitEntry{"GHz", 1e9},   UnitEntry{"THz", 1e12},
};
constexpr std::array kLengthUnits{
    UnitEntry{"m", 1.0},   UnitEntry{"cm", 1e-2}, UnitEntry{"mm", 1e-3},
    UnitEntry{"um", 1e-6}, UnitEntry{"nm", 1e-9},
};
constexpr std::array kMassUnits{
    UnitEntry{"kg", 1.0},   UnitEntry{"g", 1e-3},   UnitEntry{"mg", 1e-6},
    UnitEntry{"ug", 1e-9},  UnitEntry{"ng", 1e-12}, UnitEntry{"pg", 1e-15},
};
constexpr std::array kPowerUnits{
    UnitEntry{"W", 1.0}, UnitEntry{"mW", 1e-3}, UnitEntry{"uW", 1e-6}, UnitEntry{"nW", 1e-9},
};
constexpr std::array kEnergyUnits{
    UnitEntry{"J", 1.0},
    UnitEntry{"eV", constants::electron_volt},
    UnitEntry{"meV", 1e-3 * constants::electron_volt},
};
constexpr std::array kPressureUnits{
    UnitEntry{"Pa", 1.0}, UnitEntry{"kPa", 1e3}, UnitEntry{"MPa", 1e6}, UnitEntry{"GPa", 1e9},
};
constexpr std::array kVolumeUnits{
    UnitEntry{"m^3", 1.0},    UnitEntry{"m3", 1.0},     UnitEntry{"cm^3", 1e-6},
    UnitEntry{"mm^3", 1e-9},  UnitEntry{"um^3", 1e-18}, UnitEntry{"um3", 1e-18},
};

constexpr std::array<std::string_view, 2> kRateReferences{"omega_m", "gamma"};

// Strips whitespace and multiplication glyphs, folds the micro and pi glyphs
// to ASCII so "2π · MHz" and "2pi*MHz" compare equal.
std::string normalize_unit(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size();) {
    const auto rest = raw.substr(i);
    auto starts = [&](std::string_view s) { return rest.substr(0, s.size()) == s; };
    if (starts("·") || starts("×")) {  // middle dot, multiplication sign
      i += 2;
    } else if (starts("π")) {  // greek pi
      out += "pi";
      i += 2;
    } else if (starts("µ") || starts("μ")) {  // micro sign, greek mu
      out += 'u';
      i += 2;
    } else if (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '*') {
      ++i;
    } else {
      out += raw[i];
      ++i;
    }
  }
  return out;
}

template <std::size_t N>
bool lookup(const std::array<UnitEntry, N>& table, std::string_view tag, double& scale) {
  for (const auto& e : table) {
    if (e.tag == tag) {
      scale = e.scale;
      return true;
    }
  }
  return false;
}

bool lookup_class(UnitClass cls, std::string_view tag, double& scale) {
  switch (cls) {
    case UnitClass::AngularRate:
      return lookup(kRateUnits, tag, scale);
    case UnitClass::Length:
      return lookup(kLengthUnits, tag, scale);
    case UnitClass::Mass:
      return lookup(kMassUnits, tag, scale);
    case UnitClass::Power:
      return lookup(kPowerUnits, tag, scale);
    case UnitClass::Energy:
      return lookup(kEnergyUnits, tag, scale);
    case UnitClass::Pressure:
      return lookup(kPressureUnits, tag, scale);
    case UnitClass::Volume:
      return lookup(kVolumeUnits, tag, scale);
    case UnitClass::Dimensionless:
      if (tag.empty()) {
        scale = 1.0;
        return true;
      }
      return false;
  }
  return false;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view unit_class_name(UnitClass cls) {
  switch (cls) {
    case UnitClass::AngularRate:
      return "angular rate [rad/s, Hz, kHz, MHz, GHz, THz, 2pi*<Hz-tag>, omega_m, gamma]";
    case UnitClass::Length:
      return "length [m, cm, mm, um, nm]";
    case UnitClass::Mass:
      return "mass [kg, g, mg, ug, ng, pg]";
    case UnitClass::Power:
      return "power [W, mW, uW, nW]";
    case UnitClass::Energy:
      return "energy [J, eV, meV]";
    case UnitClass::Pressure:
      return "pressure [Pa, kPa, MPa, GPa]";
    case UnitClass::Volume:
      return "volume [m^3, cm^3, mm^3, um^3]";
    case UnitClass::Dimensionless:
      return "dimensionless number";
  }
  return "unknown";
}

bool is_rate_reference(std::string_view name) {
  for (auto r : kRateReferences) {
    if (r == name) return true;
  }
  return false;
}

ParsedQuantity parse_quantity(std::string_view text, UnitClass cls) {
  text = trim(text);
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    text = trim(text.substr(1, text.size() - 2));
  }
  if (text.empty()) throw std::invalid_argument("empty value");

  double magnitude = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, magnitude);
  if (ec != std::errc{}) {
    throw std::invalid_argument("no numeric magnitude in '" + std::string(text) + "'");
  }

  std::string tag = normalize_unit(std::string_view(ptr, static_cast<std::size_t>(last - ptr)));
  ParsedQuantity q;
  q.magnitude = magnitude;

  if (cls == UnitClass::AngularRate) {
    if (is_rate_reference(tag)) {
      q.reference = tag;
      return q;
    }
    double prefix = 1.0;
    if (tag.rfind("2pi", 0) == 0) {
      prefix = constants::two_pi;
      tag.erase(0, 3);
      if (tag == "rad/s" || tag == "1/s" || tag == "s^-1" || tag.empty()) {
        throw std::invalid_argument("2pi prefix requires a Hz-family tag");
      }
    }
    double scale = 1.0;
    if (!lookup_class(cls, tag, scale)) {
      throw std::invalid_argument("unknown unit tag '" + tag + "'");
    }
    q.scale = prefix * scale;
    return q;
  }

  double scale = 1.0;
  if (!lookup_class(cls, tag, scale)) {
    throw std::invalid_argument(tag.empty() ? std::string("missing unit tag")
                                            : "unknown unit tag '" + tag + "'");
  }
  q.scale = scale;
  return q;
}

}  // namespace tlsphonon
