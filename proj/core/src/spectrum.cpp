#include "tlsphonon/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "tlsphonon/errors.hpp"
#include "tlsphonon/steadystate.hpp"

namespace tlsphonon {

namespace {

constexpr cplx I{0.0, 1.0};

void check(const EffectiveParams& eff) {
  if (!(eff.n_b >= 1.0)) throw ParameterError("effective model needs n_b >= 1");
  if (!(eff.coupling >= 0.0)) throw ParameterError("coupling must be >= 0");
  if (!(eff.tls_loss >= 0.0)) throw ParameterError("TLS loss must be >= 0");
  if (!std::isfinite(eff.mech_loss_eff)) throw ParameterError("effective mechanical loss must be finite");
}

cplx discriminant(const EffectiveParams& eff, double tls_loss) {
  const cplx detuning = (eff.tls_freq - eff.mech_freq) - I * (tls_loss - eff.mech_loss_eff);
  return 4.0 * eff.n_b * eff.coupling * eff.coupling + detuning * detuning;
}

double ep_closed_form(const EffectiveParams& eff) {
  return eff.mech_loss_eff + 2.0 * std::sqrt(eff.n_b) * eff.coupling;
}

std::array<cplx, 2> unit(cplx x, cplx y) {
  const double norm = std::sqrt(std::norm(x) + std::norm(y));
  return {x / norm, y / norm};
}

}  // namespace

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::BelowEp:
      return "below-EP";
    case Phase::AtEp:
      return "at-EP";
    case Phase::AboveEp:
      return "above-EP";
  }
  return "unknown";
}

EffectiveParams effective_params(const SystemParams& params, double n_b) {
  const TlsParams tls = params.tls();
  const GainResult g = gain(params, n_b);
  return EffectiveParams{n_b,      params.mechanical.freq, params.mechanical.loss - g.G0,
                         tls.freq, tls.loss,               tls.coupling};
}

Eigen2 diagonalize(const Matrix2& m) {
  const cplx a = m[0], b = m[1], c = m[2], d = m[3];
  const cplx mean = 0.5 * (a + d);
  const cplx half_diff = 0.5 * (a - d);
  const cplx root = std::sqrt(half_diff * half_diff + b * c);

  Eigen2 out;
  out.values = {mean + root, mean - root};
  for (int k = 0; k < 2; ++k) {
    const cplx lambda = out.values[k];
    // Two candidate null vectors of (m - lambda); keep the better scaled one.
    const cplx r0x = b, r0y = lambda - a;
    const cplx r1x = lambda - d, r1y = c;
    const double n0 = std::norm(r0x) + std::norm(r0y);
    const double n1 = std::norm(r1x) + std::norm(r1y);
    if (n0 == 0.0 && n1 == 0.0) {
      out.vectors[k] = k == 0 ? std::array<cplx, 2>{1.0, 0.0} : std::array<cplx, 2>{0.0, 1.0};
    } else if (n0 >= n1) {
      out.vectors[k] = unit(r0x, r0y);
    } else {
      out.vectors[k] = unit(r1x, r1y);
    }
  }
  return out;
}

Matrix2 effective_matrix(const EffectiveParams& eff, cplx* offset) {
  const cplx phonon = eff.mech_freq - I * eff.mech_loss_eff;
  const cplx defect = eff.tls_freq - I * eff.tls_loss;
  const double hop = std::sqrt(eff.n_b) * eff.coupling;
  if (offset) *offset = (eff.n_b - 1.0) * phonon;
  return {phonon, hop, hop, defect};
}

std::array<cplx, 2> closed_form_eigenvalues(const EffectiveParams& eff) {
  const double n = eff.n_b;
  const cplx center = (n - 0.5) * eff.mech_freq + eff.tls_freq / 2.0 -
                      I * 0.5 * ((2.0 * n - 1.0) * eff.mech_loss_eff + eff.tls_loss);
  const cplx half_split = 0.5 * std::sqrt(discriminant(eff, eff.tls_loss));
  return {center + half_split, center - half_split};
}

SpectrumResult eigenvalues(const EffectiveParams& eff, double phase_tol) {
  check(eff);
  SpectrumResult r;
  const auto closed = closed_form_eigenvalues(eff);
  r.E_plus = closed[0];
  r.E_minus = closed[1];
  r.gap = std::sqrt(std::abs(discriminant(eff, eff.tls_loss)));

  cplx offset;
  const Eigen2 direct = diagonalize(effective_matrix(eff, &offset));
  for (int k = 0; k < 2; ++k) {
    const cplx e = offset + direct.values[k];
    const double scale = std::max(std::abs(closed[k]), std::numeric_limits<double>::min());
    r.cross_check = std::max(r.cross_check, std::abs(e - closed[k]) / scale);
    const auto& v = direct.vectors[k];
    r.weights[k] = {std::norm(v[0]), std::norm(v[1])};
    r.localization = std::max(r.localization, std::abs(r.weights[k][0] - r.weights[k][1]));
  }
  const auto& v0 = direct.vectors[0];
  const auto& v1 = direct.vectors[1];
  r.overlap = std::abs(std::conj(v0[0]) * v1[0] + std::conj(v0[1]) * v1[1]);

  r.gamma_q_ep = ep_closed_form(eff);
  r.gamma_q_min = turning_point(eff);

  const double tol = phase_tol * eff.mech_freq;
  r.ill_conditioned = r.overlap > 1.0 - 1e-6 || r.gap <= tol;
  if (eff.tls_freq == eff.mech_freq) {
    const double split = 4.0 * eff.n_b * eff.coupling * eff.coupling;
    const double x = eff.tls_loss - eff.mech_loss_eff;
    if (std::abs(eff.tls_loss - r.gamma_q_ep) <= tol) r.phase = Phase::AtEp;
    else r.phase = split > x * x ? Phase::BelowEp : Phase::AboveEp;
  } else {
    const cplx root = std::sqrt(discriminant(eff, eff.tls_loss));
    r.phase = std::abs(root.real()) >= std::abs(root.imag()) ? Phase::BelowEp : Phase::AboveEp;
  }
  return r;
}

EpSearch locate_ep(const EffectiveParams& eff, double lo, double hi) {
  if (!(eff.n_b >= 1.0)) throw ParameterError("effective model needs n_b >= 1");
  if (!(lo < hi)) throw ParameterError("EP bracket must satisfy lo < hi");
  auto objective = [&](double gq) { return std::abs(discriminant(eff, gq)); };

  // Coarse scan picks the basin; |discriminant| can have two minima, at
  // gamma_m' +- y*, when the bracket straddles gamma_m'.
  constexpr int kScan = 64;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double x = lo + (hi - lo) * i / kScan;
    const double v = objective(x);
    if (v <= best_val * (1.0 + 1e-12)) {  // ties resolve to the larger gamma_q
      best_val = std::min(v, best_val);
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(best - 1, 0) / kScan;
  double b = lo + (hi - lo) * std::min(best + 1, kScan) / kScan;

  const double tol = 1e-9 * eff.mech_freq;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c), fd = objective(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
    if (b - a <= std::abs(a + b) * 4 * std::numeric_limits<double>::epsilon()) break;
  }

  EpSearch out;
  out.gamma_q = 0.5 * (a + b);
  out.discriminant = objective(out.gamma_q);
  const double edge = std::max(tol, 1e-6 * (hi - lo));
  if (out.gamma_q - lo <= edge || hi - out.gamma_q <= edge) {
    out.note = "minimum of |discriminant| lies on the bracket boundary";
    return out;
  }
  out.found = true;
  return out;
}

double turning_point(const EffectiveParams& eff) {
  if (eff.coupling == 0.0) return 0.0;
  const double detuning = eff.tls_freq - eff.mech_freq;
  const double g2 = eff.coupling * eff.coupling;
  if (detuning == 0.0) return std::sqrt(2.0 * eff.n_b) * eff.coupling;
  if (!(eff.n_b >= 0.0)) throw ParameterError("phonon number must be >= 0");

  // d/dgamma of -g^2 gamma / (gamma^2 + c), up to a positive factor.
  const double c = detuning * detuning + 2.0 * g2 * eff.n_b;
  auto slope = [&](double gq) {
    const double den = gq * gq + c;
    return -g2 * (c - gq * gq) / (den * den);
  };
  double lo = 0.0;
  double hi = std::max(eff.coupling, std::abs(detuning));
  while (slope(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PhaseClass classify_phase(const SpectrumResult& res, double tol) {
  PhaseClass out;
  out.localization = res.localization;
  out.ill_conditioned = res.ill_conditioned;
  if (res.phase == Phase::AtEp || res.ill_conditioned) out.phase = Phase::AtEp;
  else out.phase = res.localization <= tol ? Phase::BelowEp : Phase::AboveEp;
  return out;
}

void track_branches(std::span<SpectrumResult> sweep) {
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    const auto& prev = sweep[i - 1];
    auto& cur = sweep[i];
    const double same = std::abs(cur.E_plus - prev.E_plus) + std::abs(cur.E_minus - prev.E_minus);
    const double swapped = std::abs(cur.E_plus - prev.E_minus) + std::abs(cur.E_minus - prev.E_plus);
    if (swapped < same) {
      std::swap(cur.E_plus, cur.E_minus);
      std::swap(cur.weights[0], cur.weights[1]);
    }
  }
}

}  // namespace tlsphonon
