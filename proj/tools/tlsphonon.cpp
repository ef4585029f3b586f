// Command-line front end: parameter sweeps, figure presets, trajectories.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tlsphonon/config.hpp"
#include "tlsphonon/csv.hpp"
#include "tlsphonon/dynamics.hpp"
#include "tlsphonon/errors.hpp"
#include "tlsphonon/output.hpp"
#include "tlsphonon/params.hpp"
#include "tlsphonon/presets.hpp"
#include "tlsphonon/spectrum.hpp"
#include "tlsphonon/steadystate.hpp"
#include "tlsphonon/sweep.hpp"

namespace fs = std::filesystem;
using namespace tlsphonon;

namespace {

enum Exit { Ok = 0, ConfigFailure = 1, NonConvergence = 2, IoFailure = 3 };

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string out = ".";
  std::string format = "csv";
  unsigned jobs = 0;
  std::string mode;
  std::vector<std::string> axes;
  std::string quantities;
  std::string name;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool sweep_flags) {
  cmd->add_option("--config", c.config, "parameter file");
  cmd->add_option("--set", c.sets, "override one parameter, key=value (repeatable)");
  cmd->add_flag("--quiet", c.quiet, "do not echo the resolved configuration");
  if (!sweep_flags) return;
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--format", c.format, "csv, plot or csv,plot")->capture_default_str();
  cmd->add_option("--jobs", c.jobs, "worker threads (0 = all cores)");
  cmd->add_option("--mode", c.mode, "fixed-nb:<value> or self-consistent");
  cmd->add_option("--axis", c.axes, "key:lo:hi:count[:linear|log] (at most 2)");
  cmd->add_option("--quantities", c.quantities, "comma-separated column list");
  cmd->add_option("--name", c.name, "output file stem");
}

ConfigDocument load_document(const Common& c) {
  ConfigDocument doc = c.config.empty() ? ConfigDocument{} : ConfigDocument::load(c.config);
  for (const auto& s : c.sets) doc.set_override(s);
  return doc;
}

void echo_config(const Common& c, const SystemParams& p) {
  if (c.quiet) return;
  std::cout << "# resolved configuration\n" << to_config_text(p);
  for (const auto& w : validate(p).warnings) std::cout << "# warning: " << w << "\n";
  std::cout.flush();
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Layers config file and command-line settings over `spec`.
void finish_spec(SweepSpec& spec, const Common& c) {
  const ConfigDocument doc = load_document(c);
  spec.base = build_params(doc, spec.base);
  apply_sweep_config(doc, spec);
  if (!c.axes.empty()) {
    spec.axes.clear();
    for (const auto& a : c.axes) spec.axes.push_back(parse_axis(a, spec.base));
    for (const auto& a : spec.axes) std::erase(spec.defaulted, "axis:" + a.key);
  }
  if (!c.mode.empty()) {
    spec.mode = NbMode::parse(c.mode);
    std::erase_if(spec.defaulted, [](const std::string& d) { return d.rfind("mode:", 0) == 0; });
  }
  if (!c.quantities.empty()) spec.quantities = split_list(c.quantities);
  if (!c.name.empty()) spec.name = c.name;
  for (const auto& e : doc.entries()) {
    if (e.key.rfind("sweep.", 0) == 0) continue;
    std::erase_if(spec.defaulted, [&](const std::string& d) { return d.rfind(e.key + " =", 0) == 0; });
  }
}

int run_and_emit(const SweepSpec& spec, const Common& c) {
  const OutputFormats formats = OutputFormats::parse(c.format);
  check_spec(spec);
  echo_config(c, spec.base);
  const SweepTable table = run_sweep(spec, c.jobs);
  const auto files = emit_outputs(table, c.out, formats);
  std::size_t failed = 0;
  for (const auto& r : table.rows) failed += r.error.empty() ? 0 : 1;
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
  std::cout << table.rows.size() << " rows, " << failed << " with errors\n";
  return table.has_non_convergence() ? NonConvergence : Ok;
}

int sweep_command(const Common& c, std::string name, std::vector<std::string> quantities) {
  SweepSpec spec;
  spec.name = std::move(name);
  spec.base = device_params();
  spec.quantities = std::move(quantities);
  finish_spec(spec, c);
  if (spec.axes.empty()) throw ConfigError("axis", 0, "--axis or sweep.axis", "a sweep needs at least one axis");
  return run_and_emit(spec, c);
}

struct IntegrateOptions {
  std::string model = "full";
  std::string method = "rk4";
  std::string closure = "fixed";
  double dt = 0.0;  // 0: 0.05 / fastest frequency
  double t_final = 5e-6;
  int stride = 10;
  double seed = 1e-3;
  bool from_stationary = false;
  double settle = -1.0;  // < 0: no growth fit
};

template <class State>
void report_growth(const Trajectory<State>& traj, double settle, cplx ref) {
  const TimeWindow w = growth_window(traj, settle, ref);
  const GrowthFit fit = growth_rate(traj, w.start, w.end, ref);
  std::cout << "growth_rate = " << csv::number(fit.rate) << " rad/s (+- " << csv::number(fit.error) << ", window "
            << csv::number(w.start) << " .. " << csv::number(w.end) << " s)\n";
}

int integrate_command(const Common& c, const IntegrateOptions& o) {
  const SystemParams p = build_params(load_document(c), device_params());
  echo_config(c, p);
  IntegratorSettings s;
  s.t_final = o.t_final;
  s.stride = o.stride;
  if (o.method == "rk4") s.method = Method::Rk4;
  else if (o.method == "adaptive") s.method = Method::Rk4Adaptive;
  else throw ConfigError("method", 0, "rk4 or adaptive", o.method);
  if (o.closure == "fixed") s.closure = ReducedClosure::FixedInversion;
  else if (o.closure == "full") s.closure = ReducedClosure::FullClosure;
  else throw ConfigError("closure", 0, "fixed or full", o.closure);

  const std::string stem = c.name.empty() ? "trajectory" : c.name;
  const fs::path path = fs::path(c.out) / (stem + ".csv");
  std::ostringstream csv_text;
  std::vector<std::string> warnings;
  if (o.model == "full") {
    const FullModel model(p);
    s.dt = o.dt > 0.0 ? o.dt : 0.05 / model.fastest_frequency();
    MeanFieldState init = o.from_stationary ? stationary_state(p) : default_initial_state();
    const cplx ref = o.from_stationary ? init.b : cplx{};
    init.b += o.from_stationary ? cplx{o.seed} : cplx{o.seed} - init.b;
    const auto traj = integrate_full(p, init, s);
    write_trajectory_csv(csv_text, traj);
    warnings = traj.warnings;
    if (o.settle >= 0.0) report_growth(traj, o.settle, ref);
  } else if (o.model == "reduced") {
    const ReducedModel model(p, s.closure);
    s.dt = o.dt > 0.0 ? o.dt : 0.05 / model.fastest_frequency();
    ReducedState init = o.from_stationary ? reduced_stationary_state(p, s.closure) : default_reduced_state(p);
    const cplx ref = o.from_stationary ? init.b : cplx{};
    init.b += o.from_stationary ? cplx{o.seed} : cplx{o.seed} - init.b;
    const auto traj = integrate_reduced(p, init, s);
    write_trajectory_csv(csv_text, traj);
    warnings = traj.warnings;
    if (o.settle >= 0.0) report_growth(traj, o.settle, ref);
  } else {
    throw ConfigError("model", 0, "full or reduced", o.model);
  }
  for (const auto& w : warnings) std::cout << "# warning: " << w << "\n";
  write_text_file(path, csv_text.str());
  std::cout << "wrote " << path.string() << "\n";
  return Ok;
}

int fixed_point_command(const Common& c, const FixedPointOptions& fp) {
  const SystemParams p = build_params(load_document(c), device_params());
  echo_config(c, p);
  validate(p);
  const FixedPointReport r = solve_nb_fixed_point(p, fp);
  std::cout << "converged = " << (r.converged ? "true" : "false") << "\n"
            << "n_b_star = " << csv::number(r.n_b_star) << "\n"
            << "iterations = " << r.iterations << "\n"
            << "residual = " << csv::number(r.residual) << "\n";
  if (!r.note.empty()) std::cout << "note = " << r.note << "\n";
  if (!c.name.empty() || c.out != ".") {
    std::string text = "iteration,n_b\n";
    for (std::size_t i = 0; i < r.history.size(); ++i) text += std::to_string(i) + "," + csv::number(r.history[i]) + "\n";
    const fs::path path = fs::path(c.out) / ((c.name.empty() ? "fixed_point" : c.name) + ".csv");
    write_text_file(path, text);
    std::cout << "wrote " << path.string() << "\n";
  }
  return r.converged ? Ok : NonConvergence;
}

int ep_command(const Common& c, const std::string& lo_text, const std::string& hi_text, const std::string& mode) {
  const SystemParams p = build_params(load_document(c), device_params());
  echo_config(c, p);
  validate(p);
  const NbMode m = NbMode::parse(mode);
  double n_b = m.value;
  if (m.self_consistent) {
    const FixedPointReport r = solve_nb_fixed_point(p);
    if (!r.converged) {
      std::cout << "fixed point not converged: " << r.note << "\n";
      return NonConvergence;
    }
    n_b = r.n_b_star;
  }
  const EffectiveParams eff = effective_params(p, std::max(1.0, n_b));
  const double lo = parse_parameter_value("gamma_q", lo_text, p);
  const double hi = parse_parameter_value("gamma_q", hi_text, p);
  const EpSearch ep = locate_ep(eff, lo, hi);
  std::cout << "n_b = " << csv::number(eff.n_b) << "\n"
            << "gamma_m_eff = " << csv::number(eff.mech_loss_eff) << "\n"
            << "found = " << (ep.found ? "true" : "false") << "\n";
  if (ep.found) {
    std::cout << "gamma_q_EP = " << csv::number(ep.gamma_q) << "\n"
              << "discriminant = " << csv::number(ep.discriminant) << "\n";
  }
  if (!ep.note.empty()) std::cout << "note = " << ep.note << "\n";
  std::cout << "gamma_q_min = " << csv::number(turning_point(eff)) << "\n";
  return ep.found ? Ok : NonConvergence;
}

int validate_command(const Common& c) {
  const ConfigDocument doc = load_document(c);
  const SystemParams p = build_params(doc, device_params());
  validate(p);
  SweepSpec spec;
  spec.base = p;
  spec.quantities = {"G"};
  apply_sweep_config(doc, spec);
  std::cout << to_config_text(p);
  for (const auto& w : validate(p).warnings) std::cout << "# warning: " << w << "\n";
  for (const auto& a : spec.axes) std::cout << "# axis " << format_axis(a) << "\n";
  std::cout << "# mode " << spec.mode.str() << "\n# valid\n";
  return Ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Defect-coupled optomechanical phonon laser: gain, threshold, spectrum and dynamics"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  Common gain_opt, thr_opt, spec_opt, preset_opt, int_opt, ep_opt, fp_opt, val_opt;

  auto* gain_cmd = app.add_subcommand("gain-sweep", "sweep G, G0, Gd and N_b");
  add_common(gain_cmd, gain_opt, true);
  auto* thr_cmd = app.add_subcommand("threshold-sweep", "sweep the threshold power and its parts");
  add_common(thr_cmd, thr_opt, true);
  auto* spec_cmd = app.add_subcommand("spectrum-sweep", "sweep the effective phonon-defect spectrum");
  add_common(spec_cmd, spec_opt, true);

  std::string preset_name;
  bool list_presets = false;
  auto* preset_cmd = app.add_subcommand("preset", "run a figure preset");
  preset_cmd->add_option("preset", preset_name, "fig2a fig2b fig3a fig3b fig4 fig5 fig6a fig6b");
  preset_cmd->add_flag("--list", list_presets, "list preset names");
  add_common(preset_cmd, preset_opt, true);

  IntegrateOptions io;
  auto* int_cmd = app.add_subcommand("integrate", "integrate the mean-field equations");
  add_common(int_cmd, int_opt, false);
  int_cmd->add_option("--out", int_opt.out, "output directory")->capture_default_str();
  int_cmd->add_option("--name", int_opt.name, "output file stem");
  int_cmd->add_option("--model", io.model, "full or reduced")->capture_default_str();
  int_cmd->add_option("--method", io.method, "rk4 or adaptive")->capture_default_str();
  int_cmd->add_option("--closure", io.closure, "reduced model: fixed or full")->capture_default_str();
  int_cmd->add_option("--dt", io.dt, "step in s (default 0.05 / fastest frequency)");
  int_cmd->add_option("--t-final", io.t_final, "duration in s")->capture_default_str();
  int_cmd->add_option("--stride", io.stride, "keep every n-th step")->capture_default_str();
  int_cmd->add_option("--seed", io.seed, "initial phonon amplitude (added to the stationary b with --stationary)")
      ->capture_default_str();
  int_cmd->add_flag("--stationary", io.from_stationary, "start at the stationary state plus the seed");
  int_cmd->add_option("--growth", io.settle, "fit the growth rate of |b - b_ref| after this settling time (s)");

  std::string ep_lo = "0.001 gamma", ep_hi = "6 gamma", ep_mode = "fixed-nb:1";
  auto* ep_cmd = app.add_subcommand("ep-locate", "locate the exceptional point in gamma_q");
  add_common(ep_cmd, ep_opt, false);
  ep_cmd->add_option("--lo", ep_lo, "bracket start")->capture_default_str();
  ep_cmd->add_option("--hi", ep_hi, "bracket end")->capture_default_str();
  ep_cmd->add_option("--mode", ep_mode, "fixed-nb:<value> or self-consistent")->capture_default_str();

  FixedPointOptions fpo;
  auto* fp_cmd = app.add_subcommand("fixed-point", "solve n_b = N_b(G(n_b))");
  add_common(fp_cmd, fp_opt, false);
  fp_cmd->add_option("--out", fp_opt.out, "directory for the iterate history");
  fp_cmd->add_option("--name", fp_opt.name, "history file stem");
  fp_cmd->add_option("--initial", fpo.initial, "starting n_b")->capture_default_str();
  fp_cmd->add_option("--tol", fpo.tolerance, "relative residual tolerance")->capture_default_str();
  fp_cmd->add_option("--max-iter", fpo.max_iterations, "iteration limit")->capture_default_str();
  fp_cmd->add_option("--relaxation", fpo.relaxation, "relaxation eta")->capture_default_str();
  bool plain = false;
  fp_cmd->add_flag("--plain", plain, "fixed relaxation, no secant update");

  auto* val_cmd = app.add_subcommand("validate-config", "parse and check a configuration");
  add_common(val_cmd, val_opt, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ConfigFailure;
  }

  try {
    if (*gain_cmd) return sweep_command(gain_opt, "gain", {"G", "G0", "Gd", "N_b"});
    if (*thr_cmd) return sweep_command(thr_opt, "threshold", {"P_th", "P_th0", "P_thd"});
    if (*spec_cmd) return sweep_command(spec_opt, "spectrum", {"E", "gap", "L", "phase", "gamma_q_EP", "gamma_q_min"});
    if (*preset_cmd) {
      if (list_presets || preset_name.empty()) {
        for (const auto& n : preset_names()) std::cout << n << "\n";
        return preset_name.empty() && !list_presets ? ConfigFailure : Ok;
      }
      SweepSpec spec = preset(preset_name);
      finish_spec(spec, preset_opt);
      return run_and_emit(spec, preset_opt);
    }
    if (*int_cmd) return integrate_command(int_opt, io);
    if (*ep_cmd) return ep_command(ep_opt, ep_lo, ep_hi, ep_mode);
    if (*fp_cmd) {
      fpo.adaptive = !plain;
      return fixed_point_command(fp_opt, fpo);
    }
    if (*val_cmd) return validate_command(val_opt);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return IoFailure;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ConfigFailure;
  } catch (const ParameterError& e) {
    std::cerr << "error: invalid parameters: " << e.what() << "\n";
    return ConfigFailure;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return NonConvergence;
  } catch (const SingularParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return NonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ConfigFailure;
  }
  return ConfigFailure;
}
