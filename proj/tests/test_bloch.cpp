#include "catch_amalgamated.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "wgqed/bloch.hpp"

using namespace wgqed;

namespace {

// Independent cross-check integrator: adaptive embedded Cash-Karp 4(5)
// on the same Bloch right-hand side, evaluating the Gaussian drive
// directly instead of through the precomputed step table.
struct bloch_rhs {
  const phys_params& p;
  const pulse_spec& ps;
  cplx v;

  std::array<double, 3> operator()(double t, const std::array<double, 3>& y) const {
    double g = effective_rabi(p, ps, t);
    double ga = p.gamma();
    cplx sp(y[1], y[2]);
    cplx dsp = -(cplx(ga, p.delta)) * sp + 2.0 * g * std::conj(v) * y[0];
    double dsz = -2.0 * ga * y[0] - ga - 2.0 * g * (v * sp).real();
    return {dsz, dsp.real(), dsp.imag()};
  }
};

template <typename Rhs>
std::array<double, 3> integrate_adaptive(const Rhs& f, std::array<double, 3> y, double t0,
                                         double t1, double tol) {
  static const double a[6] = {0.0, 0.2, 0.3, 0.6, 1.0, 0.875};
  static const double b[6][5] = {
      {0, 0, 0, 0, 0},
      {0.2, 0, 0, 0, 0},
      {3.0 / 40, 9.0 / 40, 0, 0, 0},
      {0.3, -0.9, 1.2, 0, 0},
      {-11.0 / 54, 2.5, -70.0 / 27, 35.0 / 27, 0},
      {1631.0 / 55296, 175.0 / 512, 575.0 / 13824, 44275.0 / 110592, 253.0 / 4096}};
  static const double c5[6] = {37.0 / 378, 0, 250.0 / 621, 125.0 / 594, 0, 512.0 / 1771};
  static const double c4[6] = {2825.0 / 27648, 0,           18575.0 / 48384,
                               13525.0 / 55296, 277.0 / 14336, 0.25};
  double t = t0;
  double h = (t1 - t0) / 100.0;
  while (t < t1) {
    if (t + h > t1) h = t1 - t;
    std::array<double, 3> k[6];
    for (int s = 0; s < 6; ++s) {
      std::array<double, 3> u = y;
      for (int q = 0; q < s; ++q)
        for (int d = 0; d < 3; ++d) u[d] += h * b[s][q] * k[q][d];
      k[s] = f(t + a[s] * h, u);
    }
    double err = 0.0;
    std::array<double, 3> y5 = y;
    for (int d = 0; d < 3; ++d) {
      double d5 = 0.0, d4 = 0.0;
      for (int s = 0; s < 6; ++s) {
        d5 += c5[s] * k[s][d];
        d4 += c4[s] * k[s][d];
      }
      y5[d] += h * d5;
      err = std::max(err, std::abs(h * (d5 - d4)));
    }
    if (err < tol) {
      t += h;
      y = y5;
    }
    double scale = 0.9 * std::pow(tol / std::max(err, 1e-300), 0.2);
    h *= std::clamp(scale, 0.2, 5.0);
  }
  return y;
}

// Independent route for the two-time correlator: direct density-matrix
// master equation with jump rate 2 gamma plus the regression rule.  The
// Hamiltonian H = -delta s+s- + i g (conj(v) s- - v s+) reproduces the
// Bloch system exactly; the correlator is Tr[sz M(t)] with M evolved
// from sz rho(t') under the same generator.
struct density_matrix {
  cplx ee, eg, ge, gg;
};

density_matrix master_rhs(const density_matrix& r, const phys_params& p, cplx v, double g) {
  const cplx i1(0.0, 1.0);
  // commutator pieces of H = -delta |e><e| + i g (conj(v)|g><e| - v|e><g|)
  cplx hee = -p.delta;
  cplx heg = -i1 * g * v;
  cplx hge = i1 * g * std::conj(v);
  density_matrix c;
  c.ee = -i1 * (heg * r.ge - r.eg * hge);
  c.gg = -i1 * (hge * r.eg - r.ge * heg);
  c.eg = -i1 * (hee * r.eg + heg * r.gg - r.ee * heg);
  c.ge = -i1 * (hge * r.ee + 0.0 - r.gg * hge - r.ge * hee);
  // dissipator at rate 2 gamma on the lowering operator
  double k = 2.0 * p.gamma();
  c.ee += -k * r.ee;
  c.gg += k * r.ee;
  c.eg += -0.5 * k * r.eg;
  c.ge += -0.5 * k * r.ge;
  return c;
}

density_matrix dm_axpy(const density_matrix& r, double s, const density_matrix& d) {
  return {r.ee + s * d.ee, r.eg + s * d.eg, r.ge + s * d.ge, r.gg + s * d.gg};
}

void dm_rk4_step(density_matrix& r, const phys_params& p, const pulse_spec& ps, cplx v, double t,
                 double dt) {
  double g0 = effective_rabi(p, ps, t);
  double gh = effective_rabi(p, ps, t + 0.5 * dt);
  double g1 = effective_rabi(p, ps, t + dt);
  density_matrix k1 = master_rhs(r, p, v, g0);
  density_matrix k2 = master_rhs(dm_axpy(r, 0.5 * dt, k1), p, v, gh);
  density_matrix k3 = master_rhs(dm_axpy(r, 0.5 * dt, k2), p, v, gh);
  density_matrix k4 = master_rhs(dm_axpy(r, dt, k3), p, v, g1);
  r.ee += dt / 6.0 * (k1.ee + 2.0 * k2.ee + 2.0 * k3.ee + k4.ee);
  r.eg += dt / 6.0 * (k1.eg + 2.0 * k2.eg + 2.0 * k3.eg + k4.eg);
  r.ge += dt / 6.0 * (k1.ge + 2.0 * k2.ge + 2.0 * k3.ge + k4.ge);
  r.gg += dt / 6.0 * (k1.gg + 2.0 * k2.gg + 2.0 * k3.gg + k4.gg);
}

density_matrix times_sz_left(const density_matrix& r) {
  // sz rho with sz = diag(1/2, -1/2)
  return {0.5 * r.ee, 0.5 * r.eg, -0.5 * r.ge, -0.5 * r.gg};
}

cplx trace_sz(const density_matrix& r) { return 0.5 * r.ee - 0.5 * r.gg; }

}  // namespace

TEST_CASE("undriven atom stays in the ground state") {
  phys_params p;
  coherent_drive d;  // na = nb = 0
  sim_grid g{0.0, 14.0, 301};
  auto sol = solve_coherent_inversion(p, d, 1.0, g);
  for (const auto& s : sol) {
    CHECK(std::abs(s.sz + 0.5) < 1e-12);
    CHECK(std::abs(s.sp) < 1e-12);
  }
}

TEST_CASE("driven inversion matches the pinned peak and an adaptive integrator") {
  phys_params p;  // gamma0 = 1, ratio = 1, delta = 0, t_atom = 6
  pulse_spec ps;  // Omega = 1
  coherent_drive d{1.0, 0.0, 0.0};
  sim_grid g = make_grid(p, ps, 8.0, 841);  // dt = 1/60

  auto sol = solve_coherent_inversion(p, d, 1.0, g);
  double mx = -1.0;
  for (const auto& s : sol) mx = std::max(mx, s.sz);
  CHECK(mx == Catch::Approx(-0.4323886717).margin(5e-7));

  // independent adaptive path, checked pointwise at a few grid times
  bloch_rhs rhs{p, ps, d.v()};
  for (std::size_t i : {300u, 390u, 420u, 600u, 840u}) {
    auto y = integrate_adaptive(rhs, {-0.5, 0.0, 0.0}, 0.0, g.t(i), 1e-12);
    CHECK(std::abs(y[0] - sol[i].sz) < 1e-7);
    CHECK(std::abs(cplx(y[1], y[2]) - sol[i].sp) < 1e-7);
  }
}

TEST_CASE("two-time correlator matches pinned values and a density-matrix route") {
  phys_params p;
  pulse_spec ps;
  coherent_drive d{1.0, 0.0, 0.0};
  sim_grid g = make_grid(p, ps, 8.0, 841);
  auto one = solve_coherent_inversion(p, d, 1.0, g);

  auto row5 = coherent_two_time_row(p, d, 1.0, g, one, 300);  // anchor t' = 5
  CHECK(row5[0].real() == Catch::Approx(0.25).margin(1e-15));
  CHECK(row5[60].real() == Catch::Approx(0.2160962295).margin(1e-6));
  CHECK(std::abs(row5[60].imag()) < 1e-9);

  auto row6 = coherent_two_time_row(p, d, 1.0, g, one, 360);  // anchor t' = 6
  CHECK(row6[60].real() == Catch::Approx(0.2024495625).margin(1e-6));

  // density-matrix quantum-regression route for K(6, 5), fully
  // independent of the regression-vector solver
  density_matrix rho{0.0, 0.0, 0.0, 1.0};
  double dt = 1.0 / 240.0;
  double t = 0.0;
  for (int i = 0; i < 1200; ++i, t += dt) dm_rk4_step(rho, p, ps, d.v(), t, dt);
  // sanity: one-time inversion agrees at t' = 5
  CHECK(trace_sz(rho).real() == Catch::Approx(one[300].sz).margin(1e-8));
  density_matrix m = times_sz_left(rho);
  for (int i = 0; i < 240; ++i, t += dt) dm_rk4_step(m, p, ps, d.v(), t, dt);
  cplx k65 = trace_sz(m);
  CHECK(k65.real() == Catch::Approx(0.2160962295).margin(1e-6));
  CHECK(std::abs(k65.imag()) < 1e-9);
}

TEST_CASE("dense two-time matrix is Hermitian with exact quarter diagonal") {
  phys_params p;
  p.delta = 1.3;
  coherent_drive d{2.0, 0.7, 1.1};
  sim_grid g{0.0, 14.0, 141};
  auto one = solve_coherent_inversion(p, d, 1.0, g);
  auto k = solve_coherent_two_time(p, d, 1.0, g, one);
  const std::size_t n = g.n_points;
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(k[i * n + i] == cplx(0.25, 0.0));
    for (std::size_t j = 0; j < i; ++j)
      CHECK(std::abs(k[i * n + j] - std::conj(k[j * n + i])) < 1e-14);
  }
  CHECK_THROWS_AS(solve_coherent_two_time(p, d, 1.0, sim_grid{0.0, 14.0, 3001}, one), param_error);
}

TEST_CASE("swapping the pulses and negating the phase mirrors the drive") {
  coherent_drive d{2.0, 0.5, 0.7};
  coherent_drive m{0.5, 2.0, -0.7};
  // the mirrored drive is what the backward observer of d sees
  CHECK(std::abs(m.v() - d.v_backward()) < 1e-15);
  CHECK(std::abs(m.v_backward() - d.v()) < 1e-15);

  // the two drive amplitudes differ only by the global phase e^{i phi},
  // so the inversion is identical and the coherence picks up that phase
  phys_params p;
  sim_grid g{0.0, 14.0, 561};
  auto a = solve_coherent_inversion(p, d, 1.0, g);
  auto b = solve_coherent_inversion(p, m, 1.0, g);
  cplx rot = std::polar(1.0, d.phi);
  for (std::size_t i = 0; i < g.n_points; ++i) {
    CHECK(std::abs(a[i].sz - b[i].sz) < 1e-12);
    CHECK(std::abs(b[i].sp - rot * a[i].sp) < 1e-12);
  }
}

TEST_CASE("fixed-step solution converges at fourth order") {
  phys_params p;
  p.delta = 0.8;
  pulse_spec ps;
  coherent_drive d{1.5, 0.0, 0.0};
  auto probe = [&](std::size_t n) {
    sim_grid g = make_grid(p, ps, 8.0, n);
    auto sol = solve_coherent_inversion(p, d, 1.0, g);
    return sol[(n - 1) * 5 / 7].sz;  // t = 10
  };
  double v1 = probe(701), v2 = probe(1401), v3 = probe(2801);
  double ratio = (v1 - v2) / (v2 - v3);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("single-photon pulse leaves the vacuum-sector correlators constant") {
  correlator_grid c = fock_single_pulse_correlators(sim_grid{0.0, 14.0, 129});
  for (double s : c.one_time) CHECK(s == -0.5);
  for (cplx k : c.two_time) CHECK(k == cplx(0.25, 0.0));

  // degenerate one-point grid keeps the same constants
  correlator_grid c1 = fock_single_pulse_correlators(sim_grid{0.0, 0.0, 1});
  REQUIRE(c1.one_time.size() == 1);
  CHECK(c1.one_time[0] == -0.5);
  CHECK(c1.two_time[0] == cplx(0.25, 0.0));
}

TEST_CASE("collision elements: undriven limit and radiative relaxation") {
  phys_params off;
  off.ratio = 0.0;
  sim_grid g{0.0, 14.0, 301};
  auto e = solve_fock_collision_elements(off, 1.0, g);
  for (double z : e.sz11) CHECK(z == Catch::Approx(-1.0).margin(1e-14));
  for (cplx c : e.cross) CHECK(std::abs(c) < 1e-14);

  // after the pulse has passed, sz11 relaxes to -1 at rate 2 gamma
  phys_params p;
  pulse_spec ps;
  sim_grid gd = make_grid(p, ps, 8.0, 1681);
  auto ed = solve_fock_collision_elements(p, 1.0, gd);
  double a1 = ed.sz11[gd.index_of(12.0)] + 1.0;
  double a2 = ed.sz11[gd.index_of(13.5)] + 1.0;
  REQUIRE(a1 > 0.0);
  REQUIRE(a2 > 0.0);
  double rate = std::log(a1 / a2) / 1.5;
  CHECK(rate == Catch::Approx(2.0 * p.gamma()).epsilon(0.02));
}

TEST_CASE("collision elements match the pinned continuum values") {
  phys_params p;
  p.t_atom = 6.0 / 0.3;
  pulse_spec ps;
  ps.bandwidth = 0.3;
  sim_grid g = make_grid(p, ps, 8.0, 2802);  // the grid the values were pinned on
  auto e = solve_fock_collision_elements(p, 0.3, g);
  std::size_t at = 1200;  // t ~ t_atom
  CHECK(e.sz11[at] == Catch::Approx(-0.8976424075).margin(1e-7));
  CHECK(e.cross[at].real() == Catch::Approx(-0.3199337314).margin(1e-7));
  CHECK(std::abs(e.cross[at].imag()) < 1e-9);

  auto row = fock_collision_two_time_row(p, 0.3, g, e, 1140);  // anchor 60 steps earlier
  CHECK(row[0].real() == Catch::Approx(0.5).margin(1e-15));
  CHECK(row[60].real() == Catch::Approx(0.4243414170).margin(1e-7));
}

TEST_CASE("dense collision correlator is Hermitian with exact half diagonal") {
  phys_params p;
  p.delta = -0.9;
  sim_grid g{0.0, 14.0, 121};
  auto full = solve_fock_collision(p, 1.0, g);
  const std::size_t n = g.n_points;
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(full.two_time[i * n + i] == cplx(0.5, 0.0));
    for (std::size_t j = 0; j < i; ++j)
      CHECK(std::abs(full.two_time[i * n + j] - std::conj(full.two_time[j * n + i])) < 1e-14);
  }
  // dense matrix rows agree with the streaming row solver
  auto row = fock_collision_two_time_row(p, 1.0, g, full.elements, 40);
  for (std::size_t i = 40; i < n; ++i)
    CHECK(std::abs(full.two_time[i * n + 40] - row[i - 40]) < 1e-15);
}
