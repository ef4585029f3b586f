#pragma once

#include <complex>
#include <string>
#include <vector>

#include "tlsphonon/params.hpp"

namespace tlsphonon {

using cplx = std::complex<double>;

/// Adiabatically eliminated optical and defect amplitudes for a given
/// mechanical amplitude `b` and phonon number `n_b`.
struct OpticalSteadyState {
  cplx a_plus;
  cplx a_minus;
  cplx p;            // supermode coherence a_-^* a_+
  cplx sigma_minus;
  double alpha = 0.0;    // (rad/s)^2
  double delta_n = 0.0;  // |a_+|^2 - |a_-|^2
};

/// Throws SingularParameterError when alpha^2 + 4 Delta^2 gamma^2 vanishes.
OpticalSteadyState steady_optics(const SystemParams& params, cplx b, double n_b);

/// Linear-response gain and threshold for one parameter point.
/// Invariants: G == G0 + Gd, Gd <= 0, P_th == P_th0 + P_thd.
struct GainResult {
  double G = 0.0;
  double G0 = 0.0;
  double Gd = 0.0;
  double omega_shift = 0.0;  // omega'
  cplx drive;                // C
  double alpha = 0.0;
  double delta_n = 0.0;
  double n_b = 0.0;  // phonon number the gain was evaluated at
  double N_b = 0.0;  // exp[2 (G - gamma_m) / gamma_m]
  double P_th = 0.0;
  double P_th0 = 0.0;
  double P_thd = 0.0;
  cplx a_plus;
  cplx a_minus;
  cplx p;
  cplx sigma_minus;
};

GainResult gain(const SystemParams& params, double n_b);

struct ThresholdPower {
  double total = 0.0;
  double bare = 0.0;    // P_th,0
  double defect = 0.0;  // P_th,d
};

/// The undefined symbol in the second bare-threshold term is read as alpha.
ThresholdPower threshold_power(const SystemParams& params, double n_b);

double stimulated_phonon_number(double gain, double mech_loss);

struct FixedPointOptions {
  double initial = 1.0;
  double tolerance = 1e-10;  // on |n - N_b(G(n))| / max(1, n)
  int max_iterations = 200;
  double relaxation = 0.5;   // first step, and every step when !adaptive
  bool adaptive = true;      // secant (Wegstein) update of the relaxation
};

struct FixedPointReport {
  double n_b_star = 0.0;
  int iterations = 0;
  double residual = 0.0;  // |n - N_b(G(n))| at the last iterate
  bool converged = false;
  std::vector<double> history;
  std::string note;
};

/// Self-consistent phonon number n = N_b(G(n)) by relaxed fixed-point
/// iteration. Never throws on non-convergence; the report carries the
/// iterate history instead.
FixedPointReport solve_nb_fixed_point(const SystemParams& params, const FixedPointOptions& options = {});

std::string gain_csv_header();
std::string to_csv_row(const GainResult& r);

}  // namespace tlsphonon
