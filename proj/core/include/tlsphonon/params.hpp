#pragma once

#include <string>
#include <variant>
#include <vector>

namespace tlsphonon {

// All rates and frequencies are angular, in rad/s. Other quantities are SI.

/// Strain-coupled defect described by material constants. The defect
/// frequency and its phonon coupling follow from these.
struct MaterialParams {
  double deformation_potential = 0.0;  // J
  double tunnel_splitting = 0.0;       // rad/s
  double asymmetry = 0.0;              // rad/s
  double youngs_modulus = 0.0;         // Pa
  double mode_volume = 0.0;            // m^3
};

struct OpticalParams {
  double cavity_freq = 0.0;         // rad/s
  double cavity_loss = 0.0;         // rad/s
  double supermode_coupling = 0.0;  // rad/s, tunnelling between the two resonators
  double radius = 0.0;              // m
  double pump_power = 0.0;          // W
  double pump_detuning = 0.0;       // rad/s, pump minus cavity
};

struct MechanicalParams {
  double freq = 0.0;  // rad/s
  double loss = 0.0;  // rad/s
  double mass = 0.0;  // kg
};

struct TlsParams {
  double freq = 0.0;      // rad/s
  double loss = 0.0;      // rad/s
  double coupling = 0.0;  // rad/s, defect-phonon coupling
};

/// Defect whose frequency and coupling are derived from material constants.
/// The loss rate is never derived and is always supplied.
struct MaterialTls {
  MaterialParams material;
  double loss = 0.0;
};

using DefectSpec = std::variant<std::monostate, TlsParams, MaterialTls>;

struct SystemParams {
  OpticalParams optical;
  MechanicalParams mechanical;
  DefectSpec defect;

  bool has_defect() const noexcept { return !std::holds_alternative<std::monostate>(defect); }

  /// Effective defect parameters. Without a defect this is a zero-coupling
  /// TLS resonant with the mechanics, so every formula reduces to its
  /// defect-free limit.
  TlsParams tls() const;
};

struct DerivedQuantities {
  double zero_point_motion = 0.0;   // x0, m
  double optomech_coupling = 0.0;   // xi = omega_c / R, rad/(s m)
  double pump_amplitude = 0.0;      // eps_l, 1/s (taken real)
  double pump_freq = 0.0;           // omega_l = omega_c + Delta
  double upper_supermode = 0.0;     // omega_+ = -Delta + J
  double lower_supermode = 0.0;     // omega_- = -Delta - J
  double coupling_rate() const noexcept { return optomech_coupling * zero_point_motion; }
};

struct ValidityReport {
  double coupling_ratio = 0.0;  // g_d / omega_q
  bool coupling_weak = true;    // g_d << omega_q holds under the configured limit
  std::vector<std::string> warnings;
};

/// Defect frequency and strain coupling from material constants.
/// Throws ParameterError when both splittings vanish or an invariant fails.
TlsParams compute_gd(const MaterialParams& material, const MechanicalParams& mech,
                     double tls_loss = 0.0);

DerivedQuantities derive_quantities(const SystemParams& params);

/// Throws ParameterError on a hard invariant violation; soft issues (weak
/// coupling condition, far-off RWA resonances) come back as warnings.
ValidityReport validate(const SystemParams& params, double coupling_ratio_limit = 0.05);

}  // namespace tlsphonon
