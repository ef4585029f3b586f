#include "tlsphonon/presets.hpp"

#include <algorithm>
#include <numbers>

#include "tlsphonon/errors.hpp"
#include "tlsphonon/units.hpp"

namespace tlsphonon {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double omega_m = two_pi * 23.4e6;
constexpr double gamma = 6.43e6;
constexpr double microwatt = 1e-6;

constexpr int rate_points = 400;

SweepAxis axis(std::string key, double lo, double hi, int count, AxisScale scale = AxisScale::Linear) {
  return SweepAxis{std::move(key), lo, hi, count, scale};
}

SweepAxis loss_axis() { return axis("gamma_q", 0.05 * gamma, 6.0 * gamma, rate_points, AxisScale::Log); }

// Fixed small phonon number keeps the defect terms visible: the self-consistent
// value above threshold is ~1e6, which moves the turning point and EP far
// beyond any gamma_q range.
NbMode small_nb() { return NbMode{false, 1.0}; }

void set_tls(SystemParams& p, double loss, double coupling) { p.defect = TlsParams{omega_m, loss, coupling}; }

SweepSpec base_spec(std::string name) {
  SweepSpec s;
  s.name = std::move(name);
  s.base = device_params();
  s.mode = small_nb();
  return s;
}

}  // namespace

SystemParams device_params() {
  SystemParams p;
  p.optical.cavity_freq = two_pi * 193e12;
  p.optical.cavity_loss = gamma;
  p.optical.supermode_coupling = 0.5 * omega_m;
  p.optical.radius = 34.5e-6;
  p.optical.pump_power = 10.0 * microwatt;
  p.optical.pump_detuning = 0.5 * omega_m;
  p.mechanical = {omega_m, 0.24e6, 50e-12};
  p.defect = TlsParams{omega_m, gamma, 1e6};
  return p;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig2a", "fig2b", "fig3a", "fig3b",
                                                 "fig4",  "fig5",  "fig6a", "fig6b"};
  return names;
}

SweepSpec preset(std::string_view name) {
  SweepSpec s = base_spec(std::string(name));
  const std::vector<std::string> device = {"R = 34.5 um", "m = 50 ng", "omega_c = 193 THz (read as 2pi 193 THz)",
                                           "omega_m = 2pi 23.4 MHz", "gamma = 6.43 MHz", "gamma_m = 0.24 MHz"};
  s.stated = device;
  s.defaulted.push_back("mode:" + s.mode.str());

  if (name == "fig2a") {
    set_tls(s.base, gamma, 1e6);
    s.axes = {axis("Delta", -omega_m, omega_m, 401)};
    s.quantities = {"G", "G0", "Gd"};
    s.stated.insert(s.stated.end(), {"gamma_q = gamma", "g_d = 1 MHz", "J = 0.5 omega_m", "P_l = 10 uW"});
    s.defaulted.insert(s.defaulted.end(), {"axis:Delta", "omega_q = omega_m"});
  } else if (name == "fig2b") {
    set_tls(s.base, gamma, 1e6);
    s.axes = {loss_axis()};
    s.quantities = {"G", "G0", "Gd"};
    s.stated.insert(s.stated.end(), {"Delta = 0.5 omega_m", "J = 0.5 omega_m", "P_l = 10 uW"});
    s.defaulted.insert(s.defaulted.end(), {"axis:gamma_q", "g_d = 1 MHz", "omega_q = omega_m"});
  } else if (name == "fig3a") {
    set_tls(s.base, gamma, 1e6);
    s.axes = {axis("Delta", -omega_m, omega_m, 201), axis("J", 0.0, omega_m, 101)};
    s.quantities = {"G"};
    s.stated.insert(s.stated.end(), {"gamma_q = gamma", "g_d = 1 MHz", "P_l = 10 uW"});
    s.defaulted.insert(s.defaulted.end(), {"axis:Delta", "axis:J", "omega_q = omega_m"});
  } else if (name == "fig3b") {
    set_tls(s.base, gamma, 1e6);
    s.axes = {loss_axis()};
    s.quantities = {"P_th", "P_th0", "P_thd", "G"};
    s.stated.insert(s.stated.end(),
                    {"J = 0.5 omega_m", "Delta = 0.5 omega_m", "omega_q = omega_m", "P_l = 10 uW"});
    s.defaulted.insert(s.defaulted.end(), {"axis:gamma_q", "g_d = 1 MHz"});
  } else if (name == "fig4") {
    set_tls(s.base, gamma, 1e6);
    s.base.optical.pump_power = 7.0 * microwatt;
    s.axes = {loss_axis()};
    s.quantities = {"E", "gap", "L", "phase", "gamma_q_EP", "gamma_q_min", "G"};
    s.stated.insert(s.stated.end(), {"J = 0.5 omega_m", "gamma_q = gamma (base value; the axis sweeps it)",
                                     "P_l = 7 uW"});
    s.defaulted.insert(s.defaulted.end(), {"axis:gamma_q", "Delta = 0.5 omega_m", "g_d = 1 MHz", "omega_q = omega_m"});
  } else if (name == "fig5") {
    set_tls(s.base, gamma, 1e6);
    s.axes = {axis("Delta", 0.3 * omega_m, 0.7 * omega_m, 5), loss_axis()};
    s.quantities = {"G", "G0", "Gd"};
    s.stated.insert(s.stated.end(), {"J = 0.5 omega_m", "omega_q = omega_m", "P_l = 10 uW"});
    s.defaulted.insert(s.defaulted.end(), {"axis:Delta", "axis:gamma_q", "g_d = 1 MHz"});
  } else if (name == "fig6a") {
    set_tls(s.base, gamma, 1e6);
    s.mode = NbMode{true, 0.0};
    s.defaulted.front() = "mode:" + s.mode.str();
    s.axes = {axis("P_l", 0.1 * microwatt, 20.0 * microwatt, 200)};
    s.quantities = {"N_b", "G"};
    s.stated.insert(s.stated.end(), {"omega_q = omega_m", "gamma_q = gamma", "g_d = 1 MHz"});
    s.defaulted.insert(s.defaulted.end(), {"axis:P_l", "Delta = 0.5 omega_m", "J = 0.5 omega_m"});
  } else if (name == "fig6b") {
    set_tls(s.base, gamma, 1e6);
    s.axes = {axis("Delta", 0.3 * omega_m, 0.7 * omega_m, 5), loss_axis()};
    s.quantities = {"N_b", "G"};
    s.stated.insert(s.stated.end(), {"omega_q = omega_m", "P_l = 10 uW"});
    s.defaulted.insert(s.defaulted.end(), {"axis:Delta", "axis:gamma_q", "J = 0.5 omega_m", "g_d = 1 MHz"});
  } else {
    std::string all;
    for (const auto& n : preset_names()) all += (all.empty() ? "" : " ") + n;
    throw ConfigError("preset", 0, "one of " + all, "unknown preset '" + std::string(name) + "'");
  }
  return s;
}

}  // namespace tlsphonon
