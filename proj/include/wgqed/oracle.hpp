#ifndef WGQED_ORACLE_HPP
#define WGQED_ORACLE_HPP

// Independent single-excitation reference: the atom plus an explicitly
// discretized bidirectional continuum, integrated as a Schrodinger
// equation in the interaction picture.  Shares no numerics with the
// Bloch/correlator route (different equations, different frame,
// different step rule); used to cross-check single-photon transmittance,
// reflectance, loss, and the collision inversion.
//
// Right- and left-moving amplitudes alpha_j, beta_j couple to the atom
// through a flat coupling g = sqrt(gamma1 d_omega / 2 pi) over modes
// detuned by d_j in [-W, W]; the non-guided channel enters as the decay
// -gamma0 c.  A single-photon Gaussian pulse is the initial condition
// on alpha (and, for a collision, its mirror image on beta).

#include <algorithm>
#include <cstddef>
#include <vector>

#include "wgqed/model.hpp"

namespace wgqed {

struct oracle_options {
  std::size_t n_modes = 0;    // 0: resolve 1.3 * W * t_final / pi, at least 1024
  double window_mult = 25.0;  // continuum half-width in units of max(omega, gamma)
  double dt_mult = 40.0;      // steps per shortest mode period 2 pi / W
};

struct oracle_result {
  double t = 0.0;  // photons leaving right, per incident forward photon
  double r = 0.0;  // photons leaving left
  double l = 0.0;  // photons lost from the guide
  double norm0 = 0.0;
  std::size_t n_modes = 0;
  double window = 0.0;
  std::size_t steps = 0;
  std::vector<double> t_sample;  // sample times for the inversion record
  std::vector<double> sz11;      // |c(t)|^2 - norm0/2: <sz> in the incident
                                 // sector (collision: <1|sz|1>, <1|1> = 2)
};

inline oracle_result oracle_scatter(const phys_params& p, double omega, bool collision,
                                    const oracle_options& opt = {}) {
  p.validate();
  if (omega <= 0.0) throw param_error("bandwidth must be > 0");
  const double ga = p.gamma();
  const double w_half = opt.window_mult * std::max(omega, ga);
  const double t_final = p.t_atom + 8.0 / omega + 8.0 / ga;
  std::size_t n = opt.n_modes;
  if (n == 0)
    n = std::max<std::size_t>(1024, std::size_t(std::ceil(1.3 * w_half * t_final / pi)));

  std::vector<double> d(n), mu(n);
  const double dw = 2.0 * w_half / double(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = -w_half + double(j) * dw;
    mu[j] = d[j] + p.delta;
  }
  const double g = std::sqrt(p.gamma1() * dw / (2.0 * pi));

  std::vector<cplx> al(n), be(n), ea(n);
  double norm0 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double phi = std::pow(2.0 / (pi * omega * omega), 0.25) *
                 std::exp(-d[j] * d[j] / (omega * omega));
    al[j] = phi * std::sqrt(dw);
    be[j] = collision ? al[j] * std::exp(cplx(0.0, 2.0 * d[j] * p.t_atom)) : cplx(0.0, 0.0);
    ea[j] = std::exp(cplx(0.0, -d[j] * p.t_atom));
    norm0 += std::norm(al[j]) + std::norm(be[j]);
  }

  const double dt_raw = 2.0 * pi / (opt.dt_mult * w_half);
  const std::size_t steps = std::size_t(std::ceil(t_final / dt_raw));
  const double dt = t_final / double(steps);
  std::vector<cplx> rot(n);  // in-step half-interval mode rotation
  for (std::size_t j = 0; j < n; ++j) rot[j] = std::exp(cplx(0.0, mu[j] * 0.5 * dt));

  oracle_result out;
  out.norm0 = norm0;
  out.n_modes = n;
  out.window = w_half;
  out.steps = steps;
  const std::size_t stride = std::max<std::size_t>(1, steps / 2000);

  cplx c(0.0, 0.0);
  const cplx ig(0.0, g);
  std::vector<cplx> pa0(n), pah(n), pa1(n);
  std::vector<cplx> k1a(n), k2a(n), k3a(n), k4a(n), k1b(n), k2b(n), k3b(n), k4b(n);

  auto stage = [&](cplx ct, double lam, const std::vector<cplx>& ka_in,
                   const std::vector<cplx>& kb_in, const std::vector<cplx>& pa, cplx& kc_out,
                   std::vector<cplx>& ka_out, std::vector<cplx>& kb_out) {
    cplx s(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      cplx atr = al[j] + lam * ka_in[j];
      cplx btr = be[j] + lam * kb_in[j];
      s += (std::conj(ea[j]) * atr + ea[j] * btr) * std::conj(pa[j]);
    }
    kc_out = -p.gamma0 * ct - ig * s;
    for (std::size_t j = 0; j < n; ++j) {
      cplx w = -ig * pa[j] * ct;
      ka_out[j] = ea[j] * w;
      kb_out[j] = std::conj(ea[j]) * w;
    }
  };

  out.t_sample.push_back(0.0);
  out.sz11.push_back(std::norm(c) - 0.5 * norm0);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = double(i) * dt;
    for (std::size_t j = 0; j < n; ++j) {
      pa0[j] = std::exp(cplx(0.0, mu[j] * t));
      pah[j] = pa0[j] * rot[j];
      pa1[j] = pah[j] * rot[j];
    }
    cplx k1c, k2c, k3c, k4c;
    stage(c, 0.0, k1a, k1b, pa0, k1c, k1a, k1b);
    stage(c + 0.5 * dt * k1c, 0.5 * dt, k1a, k1b, pah, k2c, k2a, k2b);
    stage(c + 0.5 * dt * k2c, 0.5 * dt, k2a, k2b, pah, k3c, k3a, k3b);
    stage(c + dt * k3c, dt, k3a, k3b, pa1, k4c, k4a, k4b);
    c += dt / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c);
    for (std::size_t j = 0; j < n; ++j) {
      al[j] += dt / 6.0 * (k1a[j] + 2.0 * k2a[j] + 2.0 * k3a[j] + k4a[j]);
      be[j] += dt / 6.0 * (k1b[j] + 2.0 * k2b[j] + 2.0 * k3b[j] + k4b[j]);
    }
    if ((i + 1) % stride == 0 || i + 1 == steps) {
      out.t_sample.push_back(double(i + 1) * dt);
      out.sz11.push_back(std::norm(c) - 0.5 * norm0);
    }
  }

  for (std::size_t j = 0; j < n; ++j) {
    out.t += std::norm(al[j]);
    out.r += std::norm(be[j]);
  }
  out.l = norm0 - out.t - out.r - std::norm(c);
  return out;
}

// Convergence-gated reference: recompute with doubled mode count and
// doubled continuum window; if T or R moves by rel_tol or more the
// discretization is not trusted and an accuracy_error is thrown.
inline oracle_result oracle_converged(const phys_params& p, double omega, bool collision,
                                      double rel_tol = 0.005) {
  oracle_result base = oracle_scatter(p, omega, collision);
  oracle_options dense;
  dense.n_modes = 2 * base.n_modes;
  oracle_result rn = oracle_scatter(p, omega, collision, dense);
  oracle_options wide;
  wide.window_mult = 50.0;
  oracle_result rw = oracle_scatter(p, omega, collision, wide);
  auto ok = [&](double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-9) < rel_tol;
  };
  if (!(ok(rn.t, base.t) && ok(rw.t, base.t) && ok(rn.r, base.r) && ok(rw.r, base.r)))
    throw accuracy_error("discretized-continuum reference not converged under mode/window doubling");
  return base;
}

}  // namespace wgqed

#endif
