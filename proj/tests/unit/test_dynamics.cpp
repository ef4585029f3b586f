#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "testing.hpp"
#include "tlsphonon/dynamics.hpp"
#include "tlsphonon/errors.hpp"
#include "tlsphonon/steadystate.hpp"

#if TLSPHONON_HAVE_EIGEN
#include <Eigen/Eigenvalues>
#endif

using namespace tlsphonon;
using testing::gamma_c;
using testing::omega_m;

namespace {

// No drive, no defect coupling: b is a free damped oscillator.
SystemParams free_oscillator() {
  SystemParams p = testing::figure_params(0.0);
  std::get<TlsParams>(p.defect).coupling = 0.0;
  return p;
}

double oscillator_error(double dt) {
  const SystemParams p = free_oscillator();
  MeanFieldState s = default_initial_state();
  s.b = {1e-3, 0.0};
  IntegratorSettings set;
  set.dt = dt;
  set.t_final = 2e-7;
  const auto tr = integrate_full(p, s, set);
  const cplx exact = s.b * std::exp(cplx(-p.mechanical.loss, -p.mechanical.freq) * tr.times.back());
  return std::abs(tr.states.back().b - exact) / std::abs(exact);
}

double invariant(const MeanFieldState& s) { return s.sigma_z * s.sigma_z + 4.0 * std::norm(s.sigma_minus); }

}  // namespace

TEST_CASE("free damped oscillator follows the exact solution") {
  // RK4 phase error ~ omega t (omega dt)^4 / 120 = 1.1e-8 here.
  CHECK(oscillator_error(1e-10) < 2e-8);
  CHECK(oscillator_error(2.5e-11) < 1e-10);
}

TEST_CASE("fourth-order convergence under step halving") {
  const double e1 = oscillator_error(4e-10);
  const double e2 = oscillator_error(2e-10);
  const double ratio = e1 / e2;
  CAPTURE(e1);
  CAPTURE(e2);
  CHECK(ratio > 14.0);
  CHECK(ratio < 18.0);
}

TEST_CASE("Bloch length is conserved without loss or drive") {
  SystemParams p = testing::figure_params(0.0, 0.5, 0.5, 0.0, 1e6);
  p.mechanical.loss = 0.0;
  MeanFieldState s = default_initial_state();
  s.b = {0.1, 0.0};
  IntegratorSettings set;
  set.dt = 5e-11;  // drift ~ dt^5: 5.7e-9 at 1e-10, 2e-10 here
  set.t_final = 1000.0 * 2.0 * testing::pi / omega_m;
  set.stride = 2000;
  const auto tr = integrate_full(p, s, set);
  double worst = 0.0;
  for (const auto& st : tr.states) worst = std::max(worst, std::abs(invariant(st) - 1.0));
  CHECK(worst < 1e-9);
  // The defect was actually driven away from the ground state.
  double highest = -1.0;
  for (const auto& st : tr.states) highest = std::max(highest, st.sigma_z);
  CHECK(highest > -0.99);
}

TEST_CASE("adaptive stepping agrees with fixed steps") {
  const SystemParams p = free_oscillator();
  MeanFieldState s = default_initial_state();
  IntegratorSettings set;
  set.t_final = 2e-7;
  set.method = Method::Rk4Adaptive;
  const auto tr = integrate_full(p, s, set);
  const cplx exact = s.b * std::exp(cplx(-p.mechanical.loss, -p.mechanical.freq) * tr.times.back());
  CHECK(tr.times.back() == doctest::Approx(2e-7).epsilon(1e-15));
  CHECK(std::abs(tr.states.back().b - exact) < 1e-6 * std::abs(exact));
}

TEST_CASE("defect relaxes at twice its loss rate") {
  SystemParams p = free_oscillator();
  const double gq = 2e6;
  std::get<TlsParams>(p.defect).loss = gq;
  MeanFieldState s = default_initial_state();
  s.sigma_z = 0.0;
  s.sigma_minus = {0.5, 0.0};
  IntegratorSettings set;
  set.dt = 1e-10;
  set.t_final = 5e-7;
  const auto tr = integrate_full(p, s, set);
  const double t = tr.times.back();
  CHECK(tr.states.back().sigma_z + 1.0 == doctest::Approx(std::exp(-2.0 * gq * t)).epsilon(1e-9));
  CHECK(std::abs(tr.states.back().sigma_minus) == doctest::Approx(0.5 * std::exp(-gq * t)).epsilon(1e-9));
}

TEST_CASE("log-slope fits of synthetic signals") {
  for (double rate : {0.5e6, -0.24e6}) {
    std::vector<double> t;
    std::vector<cplx> b;
    for (int i = 0; i <= 1000; ++i) {
      t.push_back(i * 1e-8);
      b.push_back(1e-3 * std::exp(cplx(rate, -omega_m) * t.back()) + cplx(2.0, 1.0));
    }
    const GrowthFit fit = fit_log_slope(t, b, 1e-7, 9e-6, cplx(2.0, 1.0));
    CHECK(fit.rate == doctest::Approx(rate).epsilon(1e-9));
    CHECK(fit.error < 1e-6 * std::abs(rate));
    CHECK(fit.samples > 800);
  }
}

TEST_CASE("growth window rejects bad input") {
  std::vector<double> t{0.0, 1.0, 2.0};
  std::vector<cplx> b{1.0, 2.0, 4.0};
  CHECK_THROWS_AS(fit_log_slope(t, b, 0.0, 5.0), ParameterError);
  CHECK_THROWS_AS(fit_log_slope(t, b, 0.5, 1.5), ParameterError);  // too few samples
  std::vector<cplx> zero{1.0, 0.0, 4.0};
  CHECK_THROWS_AS(fit_log_slope(t, zero, 0.0, 2.0), ParameterError);

  const auto tr = integrate_full(free_oscillator(), default_initial_state(), {});
  CHECK_THROWS_AS(growth_window(tr, 1.0), ParameterError);
}

TEST_CASE("integrator settings are validated") {
  IntegratorSettings set;
  set.dt = 0.0;
  CHECK_THROWS_AS(integrate_full(free_oscillator(), default_initial_state(), set), ParameterError);
  set = {};
  set.stride = 0;
  CHECK_THROWS_AS(integrate_full(free_oscillator(), default_initial_state(), set), ParameterError);
  set = {};
  set.dt = 1e-7;  // far outside the stability region of RK4
  set.t_final = 1e-4;
  MeanFieldState s = default_initial_state();
  CHECK_THROWS_AS(integrate_full(testing::figure_params(), s, set), DivergenceError);
}

TEST_CASE("coarse steps draw a warning") {
  IntegratorSettings set;
  set.dt = 2e-9;
  set.t_final = 1e-7;
  const auto tr = integrate_full(free_oscillator(), default_initial_state(), set);
  CHECK_FALSE(tr.warnings.empty());
}

TEST_CASE("runs are reproducible bit for bit") {
  IntegratorSettings set;
  set.dt = 2e-10;
  set.t_final = 1e-6;
  set.stride = 50;
  const SystemParams p = testing::figure_params(5e-6);
  const auto a = integrate_full(p, default_initial_state(), set);
  const auto b = integrate_full(p, default_initial_state(), set);
  std::ostringstream sa, sb;
  write_trajectory_csv(sa, a);
  write_trajectory_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(a.states.size() == a.times.size());
}

TEST_CASE("stationary state solves the full equations") {
  const SystemParams p = testing::figure_params(5e-6, 0.4, 0.5, 2.0 * gamma_c, 0.5e6);
  const MeanFieldState s = stationary_state(p);
  const MeanFieldState d = FullModel(p)(s);
  CHECK(std::abs(d.b) < 1e-6 * omega_m * std::abs(s.b));
  CHECK(std::abs(d.a_plus) < 1e-6 * omega_m * std::abs(s.a_plus));
  CHECK(std::abs(d.sigma_z) < 1e-9 * omega_m);
  CHECK_THROWS_AS(stationary_state(testing::figure_params(5e-6, 0.5, 0.5, 0.0)), ParameterError);
}

TEST_CASE("reduced model growth matches the analytic gain") {
  // Close to threshold the adiabatic elimination behind the closed form is
  // accurate; the comparison uses the phonon number of the stationary point.
  for (double delta : {0.4, 0.5, 0.6}) {
    for (double power : {1e-6, 5e-6}) {
      const SystemParams p = testing::figure_params(power, delta, 0.5, gamma_c, 0.5e6);
      const ReducedState st = reduced_stationary_state(p, ReducedClosure::FixedInversion);
      ReducedState s = st;
      s.b += 1e-4;
      IntegratorSettings set;
      set.dt = 2e-10;
      set.t_final = 8e-6;
      set.stride = 10;
      const auto tr = integrate_reduced(p, s, set);
      const TimeWindow w = growth_window(tr, 0.5e-6, st.b);
      const double measured = growth_rate(tr, w.start, w.end, st.b).rate;
      const double expected = gain(p, std::norm(st.b)).G - p.mechanical.loss;
      CAPTURE(delta);
      CAPTURE(power);
      CHECK(std::abs(measured - expected) <= 0.1 * std::abs(expected));
    }
  }
}

#if TLSPHONON_HAVE_EIGEN
TEST_CASE("full-model growth equals the leading eigenvalue of its linearization") {
  const SystemParams p = testing::figure_params(3e-6, 0.5, 0.5, gamma_c, 0.5e6);
  const MeanFieldState st = stationary_state(p);
  const FullModel f(p);

  auto pack = [](const MeanFieldState& s) {
    Eigen::VectorXd v(9);
    v << s.a_plus.real(), s.a_plus.imag(), s.a_minus.real(), s.a_minus.imag(), s.b.real(), s.b.imag(),
        s.sigma_minus.real(), s.sigma_minus.imag(), s.sigma_z;
    return v;
  };
  auto unpack = [](const Eigen::VectorXd& v) {
    MeanFieldState s;
    s.a_plus = {v[0], v[1]};
    s.a_minus = {v[2], v[3]};
    s.b = {v[4], v[5]};
    s.sigma_minus = {v[6], v[7]};
    s.sigma_z = v[8];
    return s;
  };
  const Eigen::VectorXd x = pack(st);
  Eigen::MatrixXd jac(9, 9);
  for (int j = 0; j < 9; ++j) {
    const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
    Eigen::VectorXd up = x, dn = x;
    up[j] += h;
    dn[j] -= h;
    jac.col(j) = (pack(f(unpack(up))) - pack(f(unpack(dn)))) / (2.0 * h);
  }
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(jac).eigenvalues();
  double leading = -1e300;
  for (const auto& e : ev) leading = std::max(leading, e.real());

  MeanFieldState s = st;
  s.b += 1e-4;
  IntegratorSettings set;
  set.dt = 2e-10;
  set.t_final = 10e-6;
  set.stride = 10;
  const auto tr = integrate_full(p, s, set);
  const TimeWindow w = growth_window(tr, 1e-6, st.b);
  const double measured = growth_rate(tr, w.start, w.end, st.b).rate;
  CAPTURE(leading);
  CHECK(leading > 0.0);
  CHECK(measured == doctest::Approx(leading).epsilon(0.03));
}
#endif

TEST_CASE("integrated inversion settles on the adiabatic value") {
  // Below threshold b stays small, so the optics settle to their b = 0 state.
  const SystemParams p = testing::figure_params(1e-6);
  MeanFieldState s = default_initial_state();
  s.b = 0.0;
  IntegratorSettings set;
  set.dt = 1e-10;
  set.t_final = 3e-6;
  const auto tr = integrate_full(p, s, set);
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    if (tr.times[i] <= 2.5e-6) continue;
    sum += std::norm(tr.states[i].a_plus) - std::norm(tr.states[i].a_minus);
    ++n;
  }
  CHECK(sum / n == doctest::Approx(gain(p, 0.0).delta_n).epsilon(1e-3));
}

TEST_CASE("defect-free reduced model grows at the bare gain") {
  for (double power : {0.5e-6, 1e-6, 3e-6}) {
    for (double delta : {0.3, 0.5}) {
      const SystemParams p = testing::figure_params(power, delta, 0.5, gamma_c, 0.0);
      const ReducedState st = reduced_stationary_state(p, ReducedClosure::FixedInversion);
      ReducedState s = st;
      s.b += 1e-4;
      IntegratorSettings set;
      set.dt = 2e-10;
      set.t_final = 20e-6;
      set.stride = 10;
      const auto tr = integrate_reduced(p, s, set);
      const TimeWindow w = growth_window(tr, 1e-6, st.b);
      const double measured = growth_rate(tr, w.start, w.end, st.b).rate;
      const GainResult g = gain(p, std::norm(st.b));
      CAPTURE(power);
      CAPTURE(delta);
      CHECK(g.Gd == 0.0);
      CHECK(measured == doctest::Approx(g.G0 - p.mechanical.loss).epsilon(0.05));
    }
  }
}
