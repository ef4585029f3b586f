#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "tlsphonon/params.hpp"

namespace testing {

inline constexpr double pi = std::numbers::pi;
inline constexpr double omega_m = 2.0 * pi * 23.4e6;
inline constexpr double gamma_c = 6.43e6;

// Device values written out literally, so the tests do not lean on the
// library's own preset table.
inline tlsphonon::SystemParams figure_params(double power = 10e-6, double delta = 0.5, double j = 0.5,
                                              double tls_loss = gamma_c, double g_d = 1e6) {
  tlsphonon::SystemParams p;
  p.optical.cavity_freq = 2.0 * pi * 193e12;
  p.optical.cavity_loss = gamma_c;
  p.optical.supermode_coupling = j * omega_m;
  p.optical.radius = 34.5e-6;
  p.optical.pump_power = power;
  p.optical.pump_detuning = delta * omega_m;
  p.mechanical = {omega_m, 0.24e6, 5e-11};
  p.defect = tlsphonon::TlsParams{omega_m, tls_loss, g_d};
  return p;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

// Broad random draw over valid parameters, around the device scale.
inline tlsphonon::SystemParams random_params(std::mt19937_64& rng, bool defect = true) {
  tlsphonon::SystemParams p;
  const double wm = 2.0 * pi * log_uniform(rng, 1e6, 1e8);
  p.optical.cavity_freq = 2.0 * pi * uniform(rng, 150e12, 400e12);
  p.optical.cavity_loss = log_uniform(rng, 1e5, 1e8);
  p.optical.supermode_coupling = uniform(rng, 0.0, 1.5) * wm;
  p.optical.radius = log_uniform(rng, 5e-6, 200e-6);
  p.optical.pump_power = log_uniform(rng, 1e-8, 1e-3);
  p.optical.pump_detuning = uniform(rng, -1.5, 1.5) * wm;
  p.mechanical = {wm, log_uniform(rng, 1e3, 1e7), log_uniform(rng, 1e-13, 1e-9)};
  if (defect) {
    p.defect = tlsphonon::TlsParams{wm * uniform(rng, 0.5, 1.5), log_uniform(rng, 1e4, 1e9),
                                    log_uniform(rng, 1e3, 1e7)};
  } else {
    p.defect = tlsphonon::TlsParams{wm * uniform(rng, 0.5, 1.5), log_uniform(rng, 1e4, 1e9), 0.0};
  }
  return p;
}

}  // namespace testing
