#ifndef WGQED_BLOCH_HPP
#define WGQED_BLOCH_HPP

// Atomic correlator dynamics: optical Bloch equations for coherent
// drive, quantum-regression two-time correlators, and the inhomogeneous
// systems for the collision of two single-photon pulses.
//
// All solvers use classical fixed-step RK4 on the shared uniform grid;
// the smooth Gaussian drive needs no adaptivity and the quadratures
// downstream want the same grid anyway.

#include <cstddef>
#include <vector>

#include "wgqed/model.hpp"

namespace wgqed {

struct bloch_vector {
  double sz;  // inversion expectation, in [-1/2, 1/2]
  cplx sp;    // frame-rotated raising-operator expectation
};

// Two counter-propagating coherent pulses enter the atomic equations
// only through the c-number amplitude v = sqrt(na) + e^{i phi} sqrt(nb).
// Seen from the backward direction the roles swap and the phase flips.
struct coherent_drive {
  double na = 0.0;
  double nb = 0.0;
  double phi = 0.0;

  cplx v() const {
    return std::sqrt(na) + std::polar(std::sqrt(nb), phi);
  }
  cplx v_backward() const {
    return std::sqrt(nb) + std::polar(std::sqrt(na), -phi);
  }
};

namespace detail {

// One RK4 step of the coherent Bloch system
//   d sz = -2 gamma sz - gamma - 2 g(t) Re(v sp)
//   d sp = -(gamma + i delta) sp + 2 g(t) conj(v) sz
// with drive samples g0, gh, g1 at t, t+dt/2, t+dt.
inline void bloch_rk4_step(bloch_vector& s, const phys_params& p, cplx v,
                           double g0, double gh, double g1, double dt) {
  const double ga = p.gamma();
  const cplx lam(-ga, -p.delta);
  auto fz = [&](double sz, cplx sp, double g) {
    return -2.0 * ga * sz - ga - 2.0 * g * (v * sp).real();
  };
  auto fp = [&](double sz, cplx sp, double g) {
    return lam * sp + 2.0 * g * std::conj(v) * sz;
  };
  double k1z = fz(s.sz, s.sp, g0);
  cplx k1p = fp(s.sz, s.sp, g0);
  double k2z = fz(s.sz + 0.5 * dt * k1z, s.sp + 0.5 * dt * k1p, gh);
  cplx k2p = fp(s.sz + 0.5 * dt * k1z, s.sp + 0.5 * dt * k1p, gh);
  double k3z = fz(s.sz + 0.5 * dt * k2z, s.sp + 0.5 * dt * k2p, gh);
  cplx k3p = fp(s.sz + 0.5 * dt * k2z, s.sp + 0.5 * dt * k2p, gh);
  double k4z = fz(s.sz + dt * k3z, s.sp + dt * k3p, g1);
  cplx k4p = fp(s.sz + dt * k3z, s.sp + dt * k3p, g1);
  s.sz += dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
  s.sp += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
}

// Regression state for <s(t) sz(t_j)>: x pairs with sz, pp with the
// raising operator and mm with the lowering operator.
struct regression_state {
  cplx x, pp, mm;
};

// One RK4 step of the regression system sharing the Bloch matrix; the
// inhomogeneous term is frozen at the anchor, b1 = -gamma*sz(t_j).
inline void regression_rk4_step(regression_state& s, const phys_params& p, cplx v,
                                cplx b1, double g0, double gh, double g1, double dt) {
  const double ga = p.gamma();
  const cplx lp(-ga, -p.delta);  // raising-side decay/rotation
  const cplx lm(-ga, p.delta);   // lowering-side (conjugate)
  auto fx = [&](const regression_state& u, double g) {
    return -2.0 * ga * u.x + b1 - g * (v * u.pp + std::conj(v) * u.mm);
  };
  auto fp = [&](const regression_state& u, double g) {
    return lp * u.pp + 2.0 * g * std::conj(v) * u.x;
  };
  auto fm = [&](const regression_state& u, double g) {
    return lm * u.mm + 2.0 * g * v * u.x;
  };
  regression_state k1{fx(s, g0), fp(s, g0), fm(s, g0)};
  regression_state u2{s.x + 0.5 * dt * k1.x, s.pp + 0.5 * dt * k1.pp, s.mm + 0.5 * dt * k1.mm};
  regression_state k2{fx(u2, gh), fp(u2, gh), fm(u2, gh)};
  regression_state u3{s.x + 0.5 * dt * k2.x, s.pp + 0.5 * dt * k2.pp, s.mm + 0.5 * dt * k2.mm};
  regression_state k3{fx(u3, gh), fp(u3, gh), fm(u3, gh)};
  regression_state u4{s.x + dt * k3.x, s.pp + dt * k3.pp, s.mm + dt * k3.mm};
  regression_state k4{fx(u4, g1), fp(u4, g1), fm(u4, g1)};
  s.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
  s.pp += dt / 6.0 * (k1.pp + 2.0 * k2.pp + 2.0 * k3.pp + k4.pp);
  s.mm += dt / 6.0 * (k1.mm + 2.0 * k2.mm + 2.0 * k3.mm + k4.mm);
}

// Drive samples g(t_i), g(t_i + dt/2), g(t_i + dt) for every step.
struct drive_table {
  std::vector<double> g0, gh;

  drive_table(const phys_params& p, double omega, const sim_grid& grid) {
    pulse_spec ps;
    ps.bandwidth = omega;
    const std::size_t n = grid.n_points;
    g0.resize(n);
    gh.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      g0[i] = effective_rabi(p, ps, grid.t(i));
      gh[i] = effective_rabi(p, ps, grid.t(i) + 0.5 * grid.dt());
    }
  }
};

}  // namespace detail

// Coherent-drive Bloch trajectory from the ground state.
inline std::vector<bloch_vector> solve_coherent_inversion(const phys_params& p,
                                                          const coherent_drive& d,
                                                          double omega,
                                                          const sim_grid& grid) {
  p.validate();
  if (d.na < 0.0 || d.nb < 0.0) throw param_error("mean photon numbers must be >= 0");
  detail::drive_table gt(p, omega, grid);
  const double dt = grid.dt();
  const cplx v = d.v();
  std::vector<bloch_vector> out(grid.n_points);
  bloch_vector s{-0.5, cplx(0.0, 0.0)};
  out[0] = s;
  for (std::size_t i = 0; i + 1 < grid.n_points; ++i) {
    detail::bloch_rk4_step(s, p, v, gt.g0[i], gt.gh[i], gt.g0[i + 1], dt);
    out[i + 1] = s;
  }
  return out;
}

namespace detail {

inline std::vector<cplx> coherent_row_impl(const phys_params& p, cplx v, const drive_table& gt,
                                           const sim_grid& grid,
                                           const std::vector<bloch_vector>& one_time,
                                           std::size_t j, std::size_t i_stop) {
  const double dt = grid.dt();
  const cplx b1 = -p.gamma() * one_time[j].sz;
  regression_state s{cplx(0.25, 0.0), -0.5 * one_time[j].sp, 0.5 * std::conj(one_time[j].sp)};
  std::vector<cplx> row(i_stop - j + 1);
  row[0] = s.x;
  for (std::size_t i = j; i < i_stop; ++i) {
    regression_rk4_step(s, p, v, b1, gt.g0[i], gt.gh[i], gt.g0[i + 1], dt);
    row[i + 1 - j] = s.x;
  }
  return row;
}

}  // namespace detail

// One regression row: K(t_i, t_j) = <sz(t_i) sz(t_j)> for i >= j, from
// the anchor conditions <sz sz> = 1/4, <s'+ sz> = -sp(t_j)/2,
// <s'- sz> = +conj(sp(t_j))/2 forced by the spin algebra.
inline std::vector<cplx> coherent_two_time_row(const phys_params& p, const coherent_drive& d,
                                               double omega, const sim_grid& grid,
                                               const std::vector<bloch_vector>& one_time,
                                               std::size_t j) {
  if (one_time.size() != grid.n_points)
    throw param_error("one-time solution does not match the grid");
  detail::drive_table gt(p, omega, grid);
  return detail::coherent_row_impl(p, d.v(), gt, grid, one_time, j, grid.n_points - 1);
}

inline constexpr std::size_t dense_two_time_limit = 3000;

// Dense two-time matrix K(t_i, t_j), row-major n x n.  The lower
// triangle i >= j comes from the per-anchor regression; the upper
// triangle is filled by Hermitian symmetry K(t_i,t_j) = conj(K(t_j,t_i)).
inline std::vector<cplx> solve_coherent_two_time(const phys_params& p, const coherent_drive& d,
                                                 double omega, const sim_grid& grid,
                                                 const std::vector<bloch_vector>& one_time) {
  const std::size_t n = grid.n_points;
  if (n > dense_two_time_limit)
    throw param_error("dense two-time matrix limited to " +
                      std::to_string(dense_two_time_limit) + " grid points");
  std::vector<cplx> k(n * n);
  detail::drive_table gt(p, omega, grid);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<cplx> row = detail::coherent_row_impl(p, d.v(), gt, grid, one_time, j, n - 1);
    for (std::size_t i = j; i < n; ++i) k[i * n + j] = row[i - j];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) k[i * n + j] = std::conj(k[j * n + i]);
  return k;
}

struct correlator_grid {
  sim_grid grid;
  std::vector<double> one_time;  // <sz(t_i)>
  std::vector<cplx> two_time;    // row-major; may be empty on large grids
};

// A single-photon Fock pulse drives nothing at the one- and two-operator
// level: the inversion stays at -1/2 and <sz sz> at 1/4 exactly.
inline correlator_grid fock_single_pulse_correlators(const sim_grid& grid) {
  correlator_grid c;
  c.grid = grid;
  c.one_time.assign(grid.n_points, -0.5);
  if (grid.n_points <= dense_two_time_limit)
    c.two_time.assign(grid.n_points * grid.n_points, cplx(0.25, 0.0));
  return c;
}

// Matrix elements for the collision of two counter-propagating
// single-photon pulses, taken in the unnormalized auxiliary state
// |1> = |0,1> + |1,0> with <1|1> = 2:
//   sz11 = <1|sz(t)|1>,   cross = <0,0,e'|s'-(t)|1>   (drives sz11)
// via  d sz11 = -2 gamma sz11 - 2 gamma - 4 g Re(cross)
//      d cross = (i delta - gamma) cross - 2 g.
struct fock_collision_elements {
  sim_grid grid;
  std::vector<double> sz11;
  std::vector<cplx> cross;
};

inline fock_collision_elements solve_fock_collision_elements(const phys_params& p, double omega,
                                                             const sim_grid& grid) {
  p.validate();
  detail::drive_table gt(p, omega, grid);
  const double dt = grid.dt();
  const double ga = p.gamma();
  const cplx lam(-ga, p.delta);
  fock_collision_elements e;
  e.grid = grid;
  e.sz11.resize(grid.n_points);
  e.cross.resize(grid.n_points);
  double z = -1.0;
  cplx c(0.0, 0.0);
  e.sz11[0] = z;
  e.cross[0] = c;
  auto fz = [&](double zz, cplx cc, double g) {
    return -2.0 * ga * zz - 2.0 * ga - 4.0 * g * cc.real();
  };
  auto fc = [&](double, cplx cc, double g) { return lam * cc - 2.0 * g; };
  for (std::size_t i = 0; i + 1 < grid.n_points; ++i) {
    double g0 = gt.g0[i], gh = gt.gh[i], g1 = gt.g0[i + 1];
    double k1z = fz(z, c, g0);
    cplx k1c = fc(z, c, g0);
    double k2z = fz(z + 0.5 * dt * k1z, c + 0.5 * dt * k1c, gh);
    cplx k2c = fc(z + 0.5 * dt * k1z, c + 0.5 * dt * k1c, gh);
    double k3z = fz(z + 0.5 * dt * k2z, c + 0.5 * dt * k2c, gh);
    cplx k3c = fc(z + 0.5 * dt * k2z, c + 0.5 * dt * k2c, gh);
    double k4z = fz(z + dt * k3z, c + dt * k3c, g1);
    cplx k4c = fc(z + dt * k3z, c + dt * k3c, g1);
    z += dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    c += dt / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c);
    e.sz11[i + 1] = z;
    e.cross[i + 1] = c;
  }
  return e;
}

namespace detail {

// Regression state for the collision correlator <1|sz(t) sz(t')|1>.
struct fock_regression_state {
  cplx q, r2, r3;
};

// d q  = -2 gamma q - gamma sz11(t') - 2 g (r2 + r3)
// d r2 = (i delta - gamma) r2 + g
// d r3 = (-i delta - gamma) r3 + g
inline void fock_regression_rk4_step(fock_regression_state& s, const phys_params& p, cplx b1,
                                     double g0, double gh, double g1, double dt) {
  const double ga = p.gamma();
  const cplx l2(-ga, p.delta);
  const cplx l3(-ga, -p.delta);
  auto fq = [&](const fock_regression_state& u, double g) {
    return -2.0 * ga * u.q + b1 - 2.0 * g * (u.r2 + u.r3);
  };
  auto f2 = [&](const fock_regression_state& u, double g) { return l2 * u.r2 + g; };
  auto f3 = [&](const fock_regression_state& u, double g) { return l3 * u.r3 + g; };
  fock_regression_state k1{fq(s, g0), f2(s, g0), f3(s, g0)};
  fock_regression_state u2{s.q + 0.5 * dt * k1.q, s.r2 + 0.5 * dt * k1.r2, s.r3 + 0.5 * dt * k1.r3};
  fock_regression_state k2{fq(u2, gh), f2(u2, gh), f3(u2, gh)};
  fock_regression_state u3{s.q + 0.5 * dt * k2.q, s.r2 + 0.5 * dt * k2.r2, s.r3 + 0.5 * dt * k2.r3};
  fock_regression_state k3{fq(u3, gh), f2(u3, gh), f3(u3, gh)};
  fock_regression_state u4{s.q + dt * k3.q, s.r2 + dt * k3.r2, s.r3 + dt * k3.r3};
  fock_regression_state k4{fq(u4, g1), f2(u4, g1), f3(u4, g1)};
  s.q += dt / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
  s.r2 += dt / 6.0 * (k1.r2 + 2.0 * k2.r2 + 2.0 * k3.r2 + k4.r2);
  s.r3 += dt / 6.0 * (k1.r3 + 2.0 * k2.r3 + 2.0 * k3.r3 + k4.r3);
}

}  // namespace detail

namespace detail {

inline std::vector<cplx> fock_collision_row_impl(const phys_params& p, const drive_table& gt,
                                                 const sim_grid& grid,
                                                 const fock_collision_elements& e, std::size_t j,
                                                 std::size_t i_stop) {
  const double dt = grid.dt();
  const cplx b1 = -p.gamma() * e.sz11[j];
  fock_regression_state s{cplx(0.5, 0.0), 0.5 * e.cross[j], -0.5 * std::conj(e.cross[j])};
  std::vector<cplx> row(i_stop - j + 1);
  row[0] = s.q;
  for (std::size_t i = j; i < i_stop; ++i) {
    fock_regression_rk4_step(s, p, b1, gt.g0[i], gt.gh[i], gt.g0[i + 1], dt);
    row[i + 1 - j] = s.q;
  }
  return row;
}

}  // namespace detail

// One anchor row of <1|sz(t_i) sz(t_j)|1> for i >= j; diagonal value
// 1/4 <1|1> = 1/2, coherence starts from the one-time cross element.
inline std::vector<cplx> fock_collision_two_time_row(const phys_params& p, double omega,
                                                     const sim_grid& grid,
                                                     const fock_collision_elements& e,
                                                     std::size_t j) {
  if (e.sz11.size() != grid.n_points)
    throw param_error("collision elements do not match the grid");
  detail::drive_table gt(p, omega, grid);
  return detail::fock_collision_row_impl(p, gt, grid, e, j, grid.n_points - 1);
}

struct fock_collision_correlators {
  fock_collision_elements elements;
  std::vector<cplx> two_time;  // row-major n x n
};

inline fock_collision_correlators solve_fock_collision(const phys_params& p, double omega,
                                                       const sim_grid& grid) {
  const std::size_t n = grid.n_points;
  if (n > dense_two_time_limit)
    throw param_error("dense two-time matrix limited to " +
                      std::to_string(dense_two_time_limit) + " grid points");
  fock_collision_correlators out;
  out.elements = solve_fock_collision_elements(p, omega, grid);
  out.two_time.resize(n * n);
  detail::drive_table gt(p, omega, grid);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<cplx> row = detail::fock_collision_row_impl(p, gt, grid, out.elements, j, n - 1);
    for (std::size_t i = j; i < n; ++i) out.two_time[i * n + j] = row[i - j];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      out.two_time[i * n + j] = std::conj(out.two_time[j * n + i]);
  return out;
}

}  // namespace wgqed

#endif
