#include "tlsphonon/steadystate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tlsphonon/csv.hpp"
#include "tlsphonon/errors.hpp"
#include "tlsphonon/units.hpp"

namespace tlsphonon {

namespace {

constexpr cplx I{0.0, 1.0};

// gamma_q^2 + (omega_q - omega_m)^2 + 2 g_d^2 n_b
double defect_lorentzian(const TlsParams& tls, double mech_freq, double n_b) {
  const double detuning = tls.freq - mech_freq;
  return tls.loss * tls.loss + detuning * detuning + 2.0 * tls.coupling * tls.coupling * n_b;
}

// Common kernel so gain() and threshold_power() share one parameter read.
struct Point {
  const SystemParams& params;
  DerivedQuantities d;
  TlsParams tls;
  double gamma;
  double J;
  double Delta;
  double wm;
  double mismatch;  // 2J - omega_m

  explicit Point(const SystemParams& p)
      : params(p),
        d(derive_quantities(p)),
        tls(p.tls()),
        gamma(p.optical.cavity_loss),
        J(p.optical.supermode_coupling),
        Delta(p.optical.pump_detuning),
        wm(p.mechanical.freq),
        mismatch(2.0 * J - wm) {}

  double alpha(double n_b) const {
    const double k = d.coupling_rate();
    return J * J + gamma * gamma - Delta * Delta + k * k * n_b / 4.0;
  }

  double optical_denominator(double alpha) const {
    const double den = alpha * alpha + 4.0 * Delta * Delta * gamma * gamma;
    if (den == 0.0) throw SingularParameterError("alpha^2 + 4 Delta^2 gamma^2 vanishes");
    return den;
  }

  double defect_gain(double n_b) const {
    if (tls.coupling == 0.0) return 0.0;
    const double lor = defect_lorentzian(tls, wm, n_b);
    if (lor == 0.0) throw SingularParameterError("lossless resonant TLS at n_b = 0");
    return -tls.coupling * tls.coupling * tls.loss / lor;
  }
};

OpticalSteadyState optics_at(const Point& pt, cplx b, double n_b) {
  const double eps = pt.d.pump_amplitude;
  const double k = pt.d.coupling_rate();
  const double gamma = pt.gamma;

  OpticalSteadyState s;
  s.alpha = pt.alpha(n_b);
  pt.optical_denominator(s.alpha);

  const double sqrt2 = std::numbers::sqrt2;
  const cplx den = 2.0 * sqrt2 * s.alpha - I * 4.0 * sqrt2 * gamma * pt.Delta;
  s.a_plus = eps * (2.0 * I * pt.d.lower_supermode + 2.0 * gamma + I * k * b) / den;
  s.a_minus = eps * (2.0 * I * pt.d.upper_supermode + 2.0 * gamma + I * k * std::conj(b)) / den;
  s.delta_n = std::norm(s.a_plus) - std::norm(s.a_minus);

  if (pt.tls.coupling != 0.0 && b != 0.0) {
    const double lor = defect_lorentzian(pt.tls, pt.wm, n_b);
    if (lor == 0.0) throw SingularParameterError("lossless resonant TLS at n_b = 0");
    const double g = pt.tls.coupling;
    s.sigma_minus = -(g * (pt.tls.freq - pt.wm) + I * g * pt.tls.loss) / lor * b;
  }

  const cplx drive = (eps * s.a_plus + eps * std::conj(s.a_minus)) / sqrt2;
  s.p = (drive - I * k / 2.0 * s.delta_n * b) / (I * pt.mismatch + 2.0 * gamma);
  return s;
}

ThresholdPower threshold_at(const Point& pt, double alpha, double n_b) {
  const double hbar = constants::hbar;
  const double k = pt.d.coupling_rate();
  const double eps2 = pt.d.pump_amplitude * pt.d.pump_amplitude;
  const double gamma = pt.gamma;
  const double carrier = pt.params.optical.cavity_freq + pt.J;
  const double q = pt.mismatch * pt.mismatch + 4.0 * gamma * gamma;

  ThresholdPower t;
  t.bare = 2.0 * hbar * q * carrier * pt.params.mechanical.loss / (k * k) +
           hbar * pt.Delta * pt.mismatch * carrier * eps2 / pt.optical_denominator(alpha);
  if (pt.tls.coupling != 0.0) {
    const double g2 = pt.tls.coupling * pt.tls.coupling;
    t.defect = 2.0 * hbar * g2 * pt.tls.loss * carrier * q /
               (k * k * defect_lorentzian(pt.tls, pt.wm, n_b));
  }
  t.total = t.bare + t.defect;
  return t;
}

}  // namespace

double stimulated_phonon_number(double g, double mech_loss) {
  return std::exp(2.0 * (g - mech_loss) / mech_loss);
}

OpticalSteadyState steady_optics(const SystemParams& params, cplx b, double n_b) {
  if (!(n_b >= 0.0)) throw ParameterError("phonon number must be >= 0");
  return optics_at(Point(params), b, n_b);
}

ThresholdPower threshold_power(const SystemParams& params, double n_b) {
  if (!(n_b >= 0.0)) throw ParameterError("phonon number must be >= 0");
  const Point pt(params);
  return threshold_at(pt, pt.alpha(n_b), n_b);
}

GainResult gain(const SystemParams& params, double n_b) {
  if (!(n_b >= 0.0)) throw ParameterError("phonon number must be >= 0");
  const Point pt(params);
  const OpticalSteadyState s = optics_at(pt, cplx{0.0, 0.0}, n_b);

  const double k2 = pt.d.coupling_rate() * pt.d.coupling_rate();
  const double eps2 = pt.d.pump_amplitude * pt.d.pump_amplitude;
  const double gamma = pt.gamma;
  const double mm = pt.mismatch;
  const double opt_den = pt.optical_denominator(s.alpha);
  const double mech_den = 2.0 * mm * mm + 8.0 * gamma * gamma;

  GainResult r;
  r.n_b = n_b;
  r.alpha = s.alpha;
  r.delta_n = s.delta_n;
  r.a_plus = s.a_plus;
  r.a_minus = s.a_minus;
  r.p = s.p;
  r.sigma_minus = s.sigma_minus;

  r.G0 = k2 * gamma / mech_den * (s.delta_n - pt.Delta * mm * eps2 / opt_den);
  r.Gd = pt.defect_gain(n_b);
  r.G = r.G0 + r.Gd;

  double tls_shift = 0.0;
  if (pt.tls.coupling != 0.0) {
    const double g2 = pt.tls.coupling * pt.tls.coupling;
    tls_shift = g2 * (pt.tls.freq - pt.wm) / defect_lorentzian(pt.tls, pt.wm, n_b);
  }
  r.omega_shift = tls_shift - k2 * mm / (16.0 * gamma * gamma + 4.0 * mm * mm) -
                  k2 * pt.Delta * eps2 / (mech_den * opt_den);
  r.drive = I * eps2 * pt.d.coupling_rate() / (2.0 * I * mm + 4.0 * gamma) *
            ((gamma - I * pt.J) * s.alpha + 2.0 * pt.Delta * pt.Delta * gamma) / opt_den;

  r.N_b = stimulated_phonon_number(r.G, params.mechanical.loss);

  const ThresholdPower t = threshold_at(pt, s.alpha, n_b);
  r.P_th = t.total;
  r.P_th0 = t.bare;
  r.P_thd = t.defect;
  return r;
}

FixedPointReport solve_nb_fixed_point(const SystemParams& params, const FixedPointOptions& opt) {
  if (!(opt.initial >= 0.0)) throw ParameterError("initial phonon number must be >= 0");
  if (!(opt.relaxation > 0.0 && opt.relaxation <= 1.0)) {
    throw ParameterError("relaxation must lie in (0, 1]");
  }
  const double mech_loss = params.mechanical.loss;
  auto map = [&](double n) { return stimulated_phonon_number(gain(params, n).G, mech_loss); };
  auto scaled = [](double residual, double n) { return residual / std::max(1.0, n); };

  FixedPointReport rep;
  double n = opt.initial;
  double f = map(n);
  rep.history.push_back(n);

  // n - N(n) < 0 at n = 0 and > 0 for large n (the gain collapses as alpha
  // grows), so a root is always bracketed once an upper point is found. The
  // relaxed step is kept while it stays inside the bracket.
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double prev_n = n;
  double prev_f = f;
  double eta = opt.relaxation;
  for (int it = 0;; ++it) {
    const bool overflow = !std::isfinite(f);
    rep.residual = overflow ? f : std::abs(n - f);
    rep.n_b_star = n;
    rep.iterations = it;
    if (!overflow && scaled(rep.residual, n) <= opt.tolerance) {
      rep.converged = true;
      return rep;
    }
    if (it >= opt.max_iterations) {
      rep.note = overflow ? "maximum iterations reached; N_b(G(n)) overflows at the last iterate"
                          : "maximum iterations reached";
      return rep;
    }
    if (overflow || n < f) lo = std::max(lo, n);
    else hi = std::min(hi, n);

    double next;
    if (overflow) {
      next = std::isfinite(hi) ? 0.0 : std::max(1.0, 10.0 * n);
    } else {
      if (opt.adaptive && it > 0 && n != prev_n && std::isfinite(prev_f)) {
        // Secant estimate of the map slope s gives the relaxation 1/(1 - s).
        const double slope = (f - prev_f) / (n - prev_n);
        eta = slope < 1.0 ? std::clamp(1.0 / (1.0 - slope), 1e-3, 10.0) : opt.relaxation;
      }
      next = std::max(0.0, (1.0 - eta) * n + eta * f);
    }
    if (std::isfinite(hi) && !(next > lo && next < hi)) {
      next = lo > 0.0 && hi / lo > 4.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    } else if (!std::isfinite(hi) && !(next > lo)) {
      next = std::max(1.0, 10.0 * lo);
    }
    prev_n = n;
    prev_f = f;
    n = next;
    f = map(n);
    rep.history.push_back(n);
  }
}

std::string gain_csv_header() {
  return "n_b,G,G0,Gd,omega_prime,Re_C,Im_C,alpha,delta_n,N_b,P_th,P_th0,P_thd,"
         "Re_a_plus,Im_a_plus,Re_a_minus,Im_a_minus,Re_p,Im_p";
}

std::string to_csv_row(const GainResult& r) {
  return csv::join({r.n_b, r.G, r.G0, r.Gd, r.omega_shift, r.drive.real(), r.drive.imag(), r.alpha,
                    r.delta_n, r.N_b, r.P_th, r.P_th0, r.P_thd, r.a_plus.real(), r.a_plus.imag(),
                    r.a_minus.real(), r.a_minus.imag(), r.p.real(), r.p.imag()});
}

}  // namespace tlsphonon
