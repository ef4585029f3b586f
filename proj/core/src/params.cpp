#include "tlsphonon/params.hpp"

#include <cmath>
#include <sstream>

#include "tlsphonon/errors.hpp"
#include "tlsphonon/units.hpp"

namespace tlsphonon {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ParameterError(what);
}

void check_material(const MaterialParams& m) {
  require(std::isfinite(m.deformation_potential), "deformation potential must be finite");
  require(m.youngs_modulus > 0.0, "Young's modulus must be > 0");
  require(m.mode_volume > 0.0, "mode volume must be > 0");
  require(m.tunnel_splitting >= 0.0, "tunnel splitting must be >= 0");
  require(m.asymmetry >= 0.0, "asymmetry must be >= 0");
  require(m.tunnel_splitting > 0.0 || m.asymmetry > 0.0,
          "tunnel splitting and asymmetry cannot both vanish");
}

void check_mechanical(const MechanicalParams& m) {
  require(m.freq > 0.0, "mechanical frequency must be > 0");
  require(m.loss > 0.0, "mechanical loss must be > 0");
  require(m.mass > 0.0, "effective mass must be > 0");
}

void check_optical(const OpticalParams& o) {
  require(o.cavity_freq > 0.0, "cavity frequency must be > 0");
  require(o.cavity_loss > 0.0, "cavity loss must be > 0");
  require(o.supermode_coupling >= 0.0, "supermode coupling J must be >= 0");
  require(o.radius > 0.0, "resonator radius must be > 0");
  require(o.pump_power >= 0.0, "pump power must be >= 0");
  require(std::isfinite(o.pump_detuning), "pump detuning must be finite");
  require(o.cavity_freq + o.pump_detuning > 0.0, "pump frequency omega_c + Delta must be > 0");
}

void check_tls(const TlsParams& t) {
  require(t.freq > 0.0, "TLS frequency must be > 0");
  require(t.loss >= 0.0, "TLS loss must be >= 0");
  require(t.coupling >= 0.0, "TLS coupling must be >= 0");
}

}  // namespace

TlsParams SystemParams::tls() const {
  if (const auto* t = std::get_if<TlsParams>(&defect)) return *t;
  if (const auto* m = std::get_if<MaterialTls>(&defect)) {
    return compute_gd(m->material, mechanical, m->loss);
  }
  return TlsParams{mechanical.freq, 0.0, 0.0};
}

TlsParams compute_gd(const MaterialParams& material, const MechanicalParams& mech, double tls_loss) {
  check_material(material);
  check_mechanical(mech);
  require(tls_loss >= 0.0, "TLS loss must be >= 0");

  const double freq = std::hypot(material.tunnel_splitting, material.asymmetry);
  const double strain_zpf = std::sqrt(constants::hbar * mech.freq /
                                      (2.0 * material.youngs_modulus * material.mode_volume));
  const double coupling = (material.deformation_potential / constants::hbar) *
                          (material.tunnel_splitting / freq) * strain_zpf;
  return TlsParams{freq, tls_loss, std::abs(coupling)};
}

DerivedQuantities derive_quantities(const SystemParams& params) {
  const auto& o = params.optical;
  const auto& m = params.mechanical;
  DerivedQuantities d;
  d.zero_point_motion = std::sqrt(constants::hbar / (2.0 * m.mass * m.freq));
  d.optomech_coupling = o.cavity_freq / o.radius;
  d.pump_freq = o.cavity_freq + o.pump_detuning;
  d.pump_amplitude = std::sqrt(2.0 * o.pump_power * o.cavity_loss / (constants::hbar * d.pump_freq));
  d.upper_supermode = -o.pump_detuning + o.supermode_coupling;
  d.lower_supermode = -o.pump_detuning - o.supermode_coupling;
  return d;
}

ValidityReport validate(const SystemParams& params, double coupling_ratio_limit) {
  check_optical(params.optical);
  check_mechanical(params.mechanical);
  if (const auto* m = std::get_if<MaterialTls>(&params.defect)) check_material(m->material);

  const TlsParams tls = params.tls();
  check_tls(tls);

  ValidityReport report;
  report.coupling_ratio = tls.coupling / tls.freq;
  report.coupling_weak = report.coupling_ratio < coupling_ratio_limit;
  if (!report.coupling_weak) {
    std::ostringstream os;
    os << "g_d/omega_q = " << report.coupling_ratio << " violates g_d << omega_q (limit "
       << coupling_ratio_limit << ")";
    report.warnings.push_back(os.str());
  }

  const double wm = params.mechanical.freq;
  const double two_j = 2.0 * params.optical.supermode_coupling;
  if (params.has_defect() && std::abs(tls.freq - wm) > 0.5 * wm) {
    report.warnings.push_back("TLS far from mechanical resonance; RWA coupling is not justified");
  }
  if (std::abs(two_j - wm) > 0.5 * wm) {
    report.warnings.push_back("2J far from omega_m; supermode RWA is not justified");
  }
  return report;
}

}  // namespace tlsphonon
