#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tlsphonon/params.hpp"

namespace tlsphonon {

using cplx = std::complex<double>;

/// c-number amplitudes of the supermodes, phonon mode and defect.
struct MeanFieldState {
  cplx a_plus;
  cplx a_minus;
  cplx b{1e-3, 0.0};
  cplx sigma_minus;
  double sigma_z = -1.0;
};

/// Reduced description: supermode coherence p = a_-^* a_+ replaces a_+/a_-.
struct ReducedState {
  cplx p;
  cplx b{1e-3, 0.0};
  cplx sigma_minus;
  double sigma_z = -1.0;
  double delta_n = 0.0;  // population inversion
};

enum class Method { Rk4, Rk4Adaptive };

/// How the reduced model closes over the optical fields.
enum class ReducedClosure {
  FixedInversion,  // delta_n held at the state's initial value
  FullClosure,     // delta_n and a_+/a_- re-evaluated from the current b
};

struct IntegratorSettings {
  double dt = 1e-10;     // s; initial step in adaptive mode
  double t_final = 1e-6; // s
  Method method = Method::Rk4;
  int stride = 1;        // keep every stride-th step
  double rel_tol = 1e-9; // adaptive mode only
  double abs_tol = 1e-12;
  ReducedClosure closure = ReducedClosure::FixedInversion;
};

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  IntegratorSettings settings;
  std::vector<std::string> warnings;
};

/// Right-hand side of the full mean-field equations (noise dropped,
/// operator products factorized).
class FullModel {
 public:
  explicit FullModel(const SystemParams& params);
  MeanFieldState operator()(const MeanFieldState& s) const;
  double fastest_frequency() const noexcept { return fastest_; }

 private:
  cplx upper_, lower_, mech_, tls_;  // -i omega - loss for each mode
  double half_coupling_;             // xi x0 / 2
  double drive_;                     // eps_l / sqrt 2
  double g_;
  double tls_loss_;
  double fastest_;
};

/// Right-hand side of the reduced equations with quasi-static optical closure.
class ReducedModel {
 public:
  ReducedModel(const SystemParams& params, ReducedClosure closure);
  ReducedState operator()(const ReducedState& s) const;
  /// Inversion implied by the closure at amplitude b (FullClosure mode).
  double closure_inversion(cplx b) const;
  double fastest_frequency() const noexcept { return fastest_; }

 private:
  SystemParams params_;
  ReducedClosure closure_;
  cplx coherence_, mech_, tls_;
  double half_coupling_;
  double drive_amp_;
  double g_;
  double tls_loss_;
  double fastest_;
};

/// Throws DivergenceError when the state stops being finite.
Trajectory<MeanFieldState> integrate_full(const SystemParams& params, const MeanFieldState& init,
                                          const IntegratorSettings& settings);
Trajectory<ReducedState> integrate_reduced(const SystemParams& params, const ReducedState& init,
                                           const IntegratorSettings& settings);

/// Vacuum optics, seed phonon 1e-3, TLS in its ground state.
MeanFieldState default_initial_state();
/// Same seed; delta_n from the b = 0 adiabatic steady state.
ReducedState default_reduced_state(const SystemParams& params);

/// Time-independent solution of the full mean-field equations (the static
/// radiation-pressure offset of b with its dressed optics). Requires a lossy
/// TLS when the defect is coupled.
MeanFieldState stationary_state(const SystemParams& params);
/// Time-independent solution of the reduced equations under `closure`. In
/// FixedInversion mode delta_n is the b = 0 value.
ReducedState reduced_stationary_state(const SystemParams& params, ReducedClosure closure);

struct GrowthFit {
  double rate = 0.0;   // 1/s, slope of log|b - reference|
  double error = 0.0;  // standard error of the slope
  std::size_t samples = 0;
};

/// Least-squares slope of log|b(t) - reference| over [t0, t1].
GrowthFit fit_log_slope(std::span<const double> times, std::span<const cplx> amplitudes, double t0,
                        double t1, cplx reference = {});
GrowthFit growth_rate(const Trajectory<MeanFieldState>& traj, double t0, double t1, cplx reference = {});
GrowthFit growth_rate(const Trajectory<ReducedState>& traj, double t0, double t1, cplx reference = {});

struct TimeWindow {
  double start = 0.0;
  double end = 0.0;
};

/// Window from `settle` to the first time |b - reference| has changed by
/// `max_factor` relative to its value at `settle` (or the trajectory end).
TimeWindow growth_window(const Trajectory<MeanFieldState>& traj, double settle, cplx reference = {},
                         double max_factor = 1e3);
TimeWindow growth_window(const Trajectory<ReducedState>& traj, double settle, cplx reference = {},
                         double max_factor = 1e3);

void write_trajectory_csv(std::ostream& os, const Trajectory<MeanFieldState>& traj);
void write_trajectory_csv(std::ostream& os, const Trajectory<ReducedState>& traj);

}  // namespace tlsphonon
