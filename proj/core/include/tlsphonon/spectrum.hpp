#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "tlsphonon/params.hpp"

namespace tlsphonon {

using cplx = std::complex<double>;

/// Parameters of the two-level block of the effective non-Hermitian
/// phonon-defect Hamiltonian, spanned by |n_b, g> and |n_b - 1, e>.
struct EffectiveParams {
  double n_b = 1.0;
  double mech_freq = 0.0;
  double mech_loss_eff = 0.0;  // gamma_m' = gamma_m - G0, negative under gain
  double tls_freq = 0.0;
  double tls_loss = 0.0;
  double coupling = 0.0;
};

/// gamma_m' from the bare optomechanical gain at the same parameter point.
EffectiveParams effective_params(const SystemParams& params, double n_b);

enum class Phase { BelowEp, AtEp, AboveEp };
std::string_view phase_name(Phase p);

/// Normalized eigenvector weights: {|phonon component|^2, |TLS component|^2}.
using Weights = std::array<double, 2>;

struct SpectrumResult {
  cplx E_plus;
  cplx E_minus;
  std::array<Weights, 2> weights{};  // [0] for E_plus, [1] for E_minus
  double gap = 0.0;                  // |E_+ - E_-|
  double gamma_q_ep = 0.0;           // gamma_m' + 2 sqrt(n_b) g_d
  double gamma_q_min = 0.0;          // turning point of the gain
  double localization = 0.0;         // max_k | w_phonon - w_tls |
  double overlap = 0.0;              // |<v_+|v_->|, -> 1 as eigenvectors coalesce
  double cross_check = 0.0;          // max relative closed-form vs matrix mismatch
  bool ill_conditioned = false;      // eigenvectors (nearly) coalesced
  Phase phase = Phase::BelowEp;
};

/// 2x2 complex matrix in row-major order.
using Matrix2 = std::array<cplx, 4>;

struct Eigen2 {
  std::array<cplx, 2> values;
  std::array<std::array<cplx, 2>, 2> vectors;  // unit-norm, vectors[k] pairs with values[k]
};

/// Direct diagonalization of an arbitrary complex 2x2 matrix; values[0]
/// takes the principal square root branch.
Eigen2 diagonalize(const Matrix2& m);

/// Explicit matrix of the effective Hamiltonian in {|n_b,g>, |n_b-1,e>},
/// written relative to the shared (n_b - 1)-phonon diagonal `offset`.
Matrix2 effective_matrix(const EffectiveParams& eff, cplx* offset = nullptr);

/// E_+ and E_- from the closed form (principal root, Re >= 0).
std::array<cplx, 2> closed_form_eigenvalues(const EffectiveParams& eff);

/// Eigenvalues by closed form, cross-checked against direct diagonalization,
/// with eigenvector weights and phase label.
SpectrumResult eigenvalues(const EffectiveParams& eff, double phase_tol = 1e-9);

struct EpSearch {
  bool found = false;
  double gamma_q = 0.0;
  double discriminant = 0.0;  // |4 n_b g^2 + [omega_q - omega_m - i(gamma_q - gamma_m')]^2|
  std::string note;
};

/// Minimizes |discriminant| over gamma_q in [lo, hi] by golden-section
/// search to 1e-9 omega_m. Ignores eff.tls_loss.
EpSearch locate_ep(const EffectiveParams& eff, double lo, double hi);

/// gamma_q at which the defect gain is most negative: sqrt(2 n_b) g_d on
/// resonance, a numeric root of d Gd / d gamma_q otherwise.
double turning_point(const EffectiveParams& eff);

struct PhaseClass {
  Phase phase = Phase::BelowEp;
  double localization = 0.0;
  bool ill_conditioned = false;
};

/// Balanced eigenvectors (L <= tol) are the below-EP phase, localized ones
/// the above-EP phase; coalesced eigenvectors are reported as at-EP.
PhaseClass classify_phase(const SpectrumResult& res, double tol = 1e-6);

/// Reorders E_+/E_- along a sweep so each branch moves continuously
/// (minimal-distance matching between neighbouring points).
void track_branches(std::span<SpectrumResult> sweep);

}  // namespace tlsphonon
