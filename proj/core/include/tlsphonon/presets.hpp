#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tlsphonon/sweep.hpp"

namespace tlsphonon {

/// Device values shared by every figure: R = 34.5 um, m = 50 ng,
/// omega_c = 2pi 193 THz, omega_m = 2pi 23.4 MHz, gamma = 6.43 MHz,
/// gamma_m = 0.24 MHz, with a resonant defect (omega_q = omega_m).
SystemParams device_params();

const std::vector<std::string>& preset_names();

/// Fully resolved sweep for one figure. Throws ConfigError on unknown names.
SweepSpec preset(std::string_view name);

}  // namespace tlsphonon
