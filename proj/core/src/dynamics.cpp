#include "tlsphonon/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "tlsphonon/csv.hpp"
#include "tlsphonon/errors.hpp"
#include "tlsphonon/steadystate.hpp"

namespace tlsphonon {

namespace {

constexpr cplx I{0.0, 1.0};

// Vector-space operations the Runge-Kutta stages need.
MeanFieldState axpy(const MeanFieldState& y, double h, const MeanFieldState& k) {
  return {y.a_plus + h * k.a_plus, y.a_minus + h * k.a_minus, y.b + h * k.b,
          y.sigma_minus + h * k.sigma_minus, y.sigma_z + h * k.sigma_z};
}

ReducedState axpy(const ReducedState& y, double h, const ReducedState& k) {
  return {y.p + h * k.p, y.b + h * k.b, y.sigma_minus + h * k.sigma_minus, y.sigma_z + h * k.sigma_z,
          y.delta_n + h * k.delta_n};
}

template <class State>
State rk4_step(const auto& rhs, const State& y, double h) {
  const State k1 = rhs(y);
  const State k2 = rhs(axpy(y, h / 2, k1));
  const State k3 = rhs(axpy(y, h / 2, k2));
  const State k4 = rhs(axpy(y, h, k3));
  State out = axpy(y, h / 6, k1);
  out = axpy(out, h / 3, k2);
  out = axpy(out, h / 3, k3);
  return axpy(out, h / 6, k4);
}

bool finite(const MeanFieldState& s) {
  return std::isfinite(std::norm(s.a_plus)) && std::isfinite(std::norm(s.a_minus)) &&
         std::isfinite(std::norm(s.b)) && std::isfinite(std::norm(s.sigma_minus)) &&
         std::isfinite(s.sigma_z);
}

bool finite(const ReducedState& s) {
  return std::isfinite(std::norm(s.p)) && std::isfinite(std::norm(s.b)) &&
         std::isfinite(std::norm(s.sigma_minus)) && std::isfinite(s.sigma_z) &&
         std::isfinite(s.delta_n);
}

// Weighted max-norm of the step-doubling error estimate.
double error_norm(const MeanFieldState& coarse, const MeanFieldState& fine, double rtol, double atol) {
  auto e = [&](cplx c, cplx f) { return std::abs(c - f) / (atol + rtol * std::abs(f)); };
  return std::max({e(coarse.a_plus, fine.a_plus), e(coarse.a_minus, fine.a_minus), e(coarse.b, fine.b),
                   e(coarse.sigma_minus, fine.sigma_minus), e(coarse.sigma_z, fine.sigma_z)}) / 15.0;
}

double error_norm(const ReducedState& coarse, const ReducedState& fine, double rtol, double atol) {
  auto e = [&](cplx c, cplx f) { return std::abs(c - f) / (atol + rtol * std::abs(f)); };
  return std::max({e(coarse.p, fine.p), e(coarse.b, fine.b), e(coarse.sigma_minus, fine.sigma_minus),
                   e(coarse.sigma_z, fine.sigma_z), e(coarse.delta_n, fine.delta_n)}) / 15.0;
}

void check_settings(const IntegratorSettings& s) {
  if (!(s.dt > 0.0)) throw ParameterError("integrator dt must be > 0");
  if (!(s.t_final > 0.0)) throw ParameterError("integrator t_final must be > 0");
  if (s.stride < 1) throw ParameterError("output stride must be >= 1");
  if (s.method == Method::Rk4Adaptive && !(s.rel_tol > 0.0 && s.abs_tol > 0.0)) {
    throw ParameterError("adaptive tolerances must be > 0");
  }
}

template <class State, class Model, class Post>
Trajectory<State> integrate(const Model& model, State y, const IntegratorSettings& settings, Post post) {
  check_settings(settings);
  if (!finite(y)) throw ParameterError("initial state is not finite");

  Trajectory<State> traj;
  traj.settings = settings;
  const double resolution = settings.dt * model.fastest_frequency();
  if (resolution > 0.1) {
    std::ostringstream os;
    os << "dt * fastest frequency = " << resolution << " exceeds 0.1; the step under-resolves the dynamics";
    traj.warnings.push_back(os.str());
  }

  post(y);
  traj.times.push_back(0.0);
  traj.states.push_back(y);

  if (settings.method == Method::Rk4) {
    const auto steps = static_cast<long long>(std::ceil(settings.t_final / settings.dt - 1e-9));
    double t = 0.0;
    for (long long k = 1; k <= steps; ++k) {
      const double t_next = k == steps ? settings.t_final : static_cast<double>(k) * settings.dt;
      y = rk4_step(model, y, t_next - t);
      post(y);
      t = t_next;
      if (!finite(y)) throw DivergenceError(t);
      if (k % settings.stride == 0 || k == steps) {
        traj.times.push_back(t);
        traj.states.push_back(y);
      }
    }
    return traj;
  }

  double t = 0.0;
  double h = settings.dt;
  long long accepted = 0;
  const double h_min = settings.t_final * 1e-15;
  while (t < settings.t_final) {
    const bool last = t + h >= settings.t_final;
    const double step = last ? settings.t_final - t : h;
    const State coarse = rk4_step(model, y, step);
    const State fine = rk4_step(model, rk4_step(model, y, step / 2), step / 2);
    if (!finite(fine)) throw DivergenceError(t + step);
    const double err = error_norm(coarse, fine, settings.rel_tol, settings.abs_tol);
    if (err <= 1.0) {
      t = last ? settings.t_final : t + step;
      y = fine;
      post(y);
      ++accepted;
      if (accepted % settings.stride == 0 || t >= settings.t_final) {
        traj.times.push_back(t);
        traj.states.push_back(y);
      }
    }
    const double factor = err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 4.0);
    h = step * factor;
    if (h < h_min) throw DivergenceError(t);
  }
  return traj;
}

}  // namespace

FullModel::FullModel(const SystemParams& params) {
  const DerivedQuantities d = derive_quantities(params);
  const TlsParams tls = params.tls();
  const double gamma = params.optical.cavity_loss;
  upper_ = -I * d.upper_supermode - gamma;
  lower_ = -I * d.lower_supermode - gamma;
  mech_ = -I * params.mechanical.freq - params.mechanical.loss;
  tls_ = -I * tls.freq - tls.loss;
  half_coupling_ = d.coupling_rate() / 2.0;
  drive_ = d.pump_amplitude / std::numbers::sqrt2;
  g_ = tls.coupling;
  tls_loss_ = tls.loss;
  fastest_ = std::max({params.mechanical.freq, tls.freq, 2.0 * params.optical.supermode_coupling,
                       std::abs(d.upper_supermode), std::abs(d.lower_supermode)});
}

MeanFieldState FullModel::operator()(const MeanFieldState& s) const {
  MeanFieldState ds;
  ds.a_plus = upper_ * s.a_plus + I * half_coupling_ * s.a_minus * s.b + drive_;
  ds.a_minus = lower_ * s.a_minus + I * half_coupling_ * s.a_plus * std::conj(s.b) + drive_;
  ds.b = mech_ * s.b + I * half_coupling_ * std::conj(s.a_minus) * s.a_plus - I * g_ * s.sigma_minus;
  ds.sigma_minus = tls_ * s.sigma_minus + I * g_ * s.b * s.sigma_z;
  ds.sigma_z = -2.0 * tls_loss_ * (s.sigma_z + 1.0) + 4.0 * g_ * std::imag(std::conj(s.sigma_minus) * s.b);
  return ds;
}

ReducedModel::ReducedModel(const SystemParams& params, ReducedClosure closure)
    : params_(params), closure_(closure) {
  const DerivedQuantities d = derive_quantities(params);
  const TlsParams tls = params.tls();
  coherence_ = -2.0 * I * params.optical.supermode_coupling - 2.0 * params.optical.cavity_loss;
  mech_ = -I * params.mechanical.freq - params.mechanical.loss;
  tls_ = -I * tls.freq - tls.loss;
  half_coupling_ = d.coupling_rate() / 2.0;
  drive_amp_ = d.pump_amplitude;
  g_ = tls.coupling;
  tls_loss_ = tls.loss;
  fastest_ = std::max({params.mechanical.freq, tls.freq, 2.0 * params.optical.supermode_coupling});
}

double ReducedModel::closure_inversion(cplx b) const {
  return steady_optics(params_, b, std::norm(b)).delta_n;
}

ReducedState ReducedModel::operator()(const ReducedState& s) const {
  const OpticalSteadyState optics = steady_optics(params_, s.b, std::norm(s.b));
  const double inversion = closure_ == ReducedClosure::FullClosure ? optics.delta_n : s.delta_n;
  const cplx drive = drive_amp_ * (optics.a_plus + std::conj(optics.a_minus)) / std::numbers::sqrt2;

  ReducedState ds;
  ds.p = coherence_ * s.p - I * half_coupling_ * inversion * s.b + drive;
  ds.b = mech_ * s.b + I * half_coupling_ * s.p - I * g_ * s.sigma_minus;
  ds.sigma_minus = tls_ * s.sigma_minus + I * g_ * s.b * s.sigma_z;
  ds.sigma_z = -2.0 * tls_loss_ * (s.sigma_z + 1.0) + 4.0 * g_ * std::imag(std::conj(s.sigma_minus) * s.b);
  ds.delta_n = 0.0;
  return ds;
}

Trajectory<MeanFieldState> integrate_full(const SystemParams& params, const MeanFieldState& init,
                                          const IntegratorSettings& settings) {
  const FullModel model(params);
  return integrate(model, init, settings, [](MeanFieldState&) {});
}

Trajectory<ReducedState> integrate_reduced(const SystemParams& params, const ReducedState& init,
                                           const IntegratorSettings& settings) {
  const ReducedModel model(params, settings.closure);
  if (settings.closure == ReducedClosure::FullClosure) {
    return integrate(model, init, settings,
                     [&](ReducedState& s) { s.delta_n = model.closure_inversion(s.b); });
  }
  return integrate(model, init, settings, [](ReducedState&) {});
}

MeanFieldState default_initial_state() { return MeanFieldState{}; }

ReducedState default_reduced_state(const SystemParams& params) {
  ReducedState s;
  s.delta_n = steady_optics(params, cplx{}, 0.0).delta_n;
  return s;
}

MeanFieldState stationary_state(const SystemParams& params) {
  const DerivedQuantities d = derive_quantities(params);
  const TlsParams tls = params.tls();
  if (tls.coupling > 0.0 && !(tls.loss > 0.0)) {
    throw ParameterError("stationary state needs a lossy TLS when g_d > 0");
  }
  const double gamma = params.optical.cavity_loss;
  const double k = d.coupling_rate() / 2.0;
  const double drive = d.pump_amplitude / std::numbers::sqrt2;
  const cplx up = I * d.upper_supermode + gamma;
  const cplx lo = I * d.lower_supermode + gamma;
  const cplx mech = I * params.mechanical.freq + params.mechanical.loss;
  const double tls_norm = tls.loss * tls.loss + tls.freq * tls.freq;

  MeanFieldState s;
  s.b = 0.0;
  for (int it = 0; it < 1000; ++it) {
    // Optics for fixed b: [[up, -i k b], [-i k b*, lo]] (a+, a-) = drive (1, 1).
    const cplx m01 = -I * k * s.b;
    const cplx m10 = -I * k * std::conj(s.b);
    const cplx det = up * lo - m01 * m10;
    if (det == 0.0) throw SingularParameterError("singular optical response in stationary state");
    s.a_plus = drive * (lo - m01) / det;
    s.a_minus = drive * (up - m10) / det;
    s.sigma_z = tls.coupling > 0.0 ? -1.0 / (1.0 + 2.0 * tls.coupling * tls.coupling * std::norm(s.b) / tls_norm)
                                   : -1.0;
    s.sigma_minus = tls.coupling > 0.0 ? I * tls.coupling * s.b * s.sigma_z / (I * tls.freq + tls.loss)
                                       : cplx{};
    const cplx next = (I * k * std::conj(s.a_minus) * s.a_plus - I * tls.coupling * s.sigma_minus) / mech;
    const double change = std::abs(next - s.b);
    s.b = next;
    if (change <= 1e-15 * std::max(std::abs(next), 1e-300)) break;
    if (!std::isfinite(std::abs(next))) throw SingularParameterError("stationary-state iteration diverged");
  }
  return s;
}

ReducedState reduced_stationary_state(const SystemParams& params, ReducedClosure closure) {
  const TlsParams tls = params.tls();
  if (tls.coupling > 0.0 && !(tls.loss > 0.0)) {
    throw ParameterError("stationary state needs a lossy TLS when g_d > 0");
  }
  const DerivedQuantities d = derive_quantities(params);
  const double k = d.coupling_rate() / 2.0;
  const cplx coherence = 2.0 * I * params.optical.supermode_coupling + 2.0 * params.optical.cavity_loss;
  const cplx mech = I * params.mechanical.freq + params.mechanical.loss;
  const double tls_norm = tls.loss * tls.loss + tls.freq * tls.freq;
  const double fixed_inversion = steady_optics(params, cplx{}, 0.0).delta_n;

  ReducedState s;
  s.b = 0.0;
  s.delta_n = fixed_inversion;
  for (int it = 0; it < 1000; ++it) {
    const OpticalSteadyState optics = steady_optics(params, s.b, std::norm(s.b));
    if (closure == ReducedClosure::FullClosure) s.delta_n = optics.delta_n;
    const cplx drive = d.pump_amplitude * (optics.a_plus + std::conj(optics.a_minus)) / std::numbers::sqrt2;
    s.p = (drive - I * k * s.delta_n * s.b) / coherence;
    s.sigma_z = tls.coupling > 0.0 ? -1.0 / (1.0 + 2.0 * tls.coupling * tls.coupling * std::norm(s.b) / tls_norm)
                                   : -1.0;
    s.sigma_minus = tls.coupling > 0.0 ? I * tls.coupling * s.b * s.sigma_z / (I * tls.freq + tls.loss)
                                       : cplx{};
    const cplx next = (I * k * s.p - I * tls.coupling * s.sigma_minus) / mech;
    const double change = std::abs(next - s.b);
    s.b = next;
    if (change <= 1e-15 * std::max(std::abs(next), 1e-300)) break;
    if (!std::isfinite(std::abs(next))) throw SingularParameterError("stationary-state iteration diverged");
  }
  return s;
}

GrowthFit fit_log_slope(std::span<const double> times, std::span<const cplx> amplitudes, double t0, double t1,
                        cplx reference) {
  if (times.size() != amplitudes.size()) throw ParameterError("times and amplitudes differ in length");
  if (times.empty() || !(t0 < t1) || t0 < times.front() || t1 > times.back()) {
    throw ParameterError("growth-rate window lies outside the trajectory");
  }
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t n = 0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t0 || times[i] > t1) continue;
    const double mag = std::abs(amplitudes[i] - reference);
    if (!(mag > 0.0)) throw ParameterError("|b| touches zero inside the growth-rate window");
    pts.emplace_back(times[i] - t0, std::log(mag));
  }
  n = pts.size();
  if (n < 3) throw ParameterError("growth-rate window holds fewer than 3 samples");
  for (auto [t, y] : pts) {
    st += t;
    sy += y;
  }
  const double tm = st / n, ym = sy / n;
  for (auto [t, y] : pts) {
    stt += (t - tm) * (t - tm);
    sty += (t - tm) * (y - ym);
  }
  GrowthFit fit;
  fit.samples = n;
  fit.rate = sty / stt;
  double ssr = 0.0;
  for (auto [t, y] : pts) {
    const double r = y - ym - fit.rate * (t - tm);
    ssr += r * r;
  }
  fit.error = std::sqrt(ssr / static_cast<double>(n - 2) / stt);
  return fit;
}

namespace {
template <class State>
GrowthFit growth_rate_impl(const Trajectory<State>& traj, double t0, double t1, cplx reference) {
  std::vector<cplx> b;
  b.reserve(traj.states.size());
  for (const auto& s : traj.states) b.push_back(s.b);
  return fit_log_slope(traj.times, b, t0, t1, reference);
}
}  // namespace

GrowthFit growth_rate(const Trajectory<MeanFieldState>& traj, double t0, double t1, cplx reference) {
  return growth_rate_impl(traj, t0, t1, reference);
}

GrowthFit growth_rate(const Trajectory<ReducedState>& traj, double t0, double t1, cplx reference) {
  return growth_rate_impl(traj, t0, t1, reference);
}

namespace {
template <class State>
TimeWindow growth_window_impl(const Trajectory<State>& traj, double settle, cplx reference, double max_factor) {
  if (traj.times.empty() || settle >= traj.times.back()) {
    throw ParameterError("settling time lies beyond the trajectory");
  }
  std::size_t i0 = 0;
  while (traj.times[i0] < settle) ++i0;
  const double base = std::abs(traj.states[i0].b - reference);
  TimeWindow w{traj.times[i0], traj.times.back()};
  for (std::size_t i = i0; i < traj.times.size(); ++i) {
    const double mag = std::abs(traj.states[i].b - reference);
    if (mag >= base * max_factor || mag <= base / max_factor) {
      w.end = traj.times[i];
      break;
    }
  }
  return w;
}
}  // namespace

TimeWindow growth_window(const Trajectory<MeanFieldState>& traj, double settle, cplx reference,
                         double max_factor) {
  return growth_window_impl(traj, settle, reference, max_factor);
}

TimeWindow growth_window(const Trajectory<ReducedState>& traj, double settle, cplx reference,
                         double max_factor) {
  return growth_window_impl(traj, settle, reference, max_factor);
}

void write_trajectory_csv(std::ostream& os, const Trajectory<MeanFieldState>& traj) {
  os << "t,Re_a_plus,Im_a_plus,Re_a_minus,Im_a_minus,Re_b,Im_b,Re_sigma_minus,Im_sigma_minus,sigma_z,abs_b\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& s = traj.states[i];
    os << csv::join({traj.times[i], s.a_plus.real(), s.a_plus.imag(), s.a_minus.real(), s.a_minus.imag(),
                     s.b.real(), s.b.imag(), s.sigma_minus.real(), s.sigma_minus.imag(), s.sigma_z,
                     std::abs(s.b)})
       << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory<ReducedState>& traj) {
  os << "t,Re_p,Im_p,Re_b,Im_b,Re_sigma_minus,Im_sigma_minus,sigma_z,delta_n,abs_b\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& s = traj.states[i];
    os << csv::join({traj.times[i], s.p.real(), s.p.imag(), s.b.real(), s.b.imag(), s.sigma_minus.real(),
                     s.sigma_minus.imag(), s.sigma_z, s.delta_n, std::abs(s.b)})
       << '\n';
  }
}

}  // namespace tlsphonon
