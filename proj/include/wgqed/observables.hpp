#ifndef WGQED_OBSERVABLES_HPP
#define WGQED_OBSERVABLES_HPP

// Scattered-field observables: forward/backward photon currents, the
// transmittance/reflectance/loss integrals, two-pulse collision photon
// numbers, and the pulse deformation amplitude h(tau).
//
// The detector-time integrals of the scattered field are carried out
// analytically against the Gaussian envelope, leaving a weighted sum
// over the atomic correlators (interference term) and a pair kernel
// that decays as exp(-gamma |t-t'|) (incoherent term).  The double sums
// are therefore band-limited; the two-time correlators stream through a
// sliding window of regression anchors, so integrated observables never
// store the full two-time matrix.

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "wgqed/bloch.hpp"
#include "wgqed/model.hpp"

namespace wgqed {

// Mean photon current envelope of a free Gaussian pulse (per photon).
inline double free_envelope(double omega, double tau) {
  return omega / std::sqrt(2.0 * pi) * std::exp(-0.5 * omega * omega * tau * tau);
}

inline double free_poynting(const pulse_spec& pulse, double tau) {
  return pulse.photon_number() * free_envelope(pulse.bandwidth, tau);
}

// Scattering kernel F(tau, t') relating the retarded detector time tau
// to the atomic emission time t'.  The quadratic Gaussian-overlap
// exponent and the decay/rotation exponent are combined in log space
// before a single exponentiation, so large omega * t_atom cannot
// overflow; F(tau, tau + t_atom) = 1 exactly.
struct kernel_f {
  phys_params params;
  double omega = 1.0;

  cplx operator()(double tau, double tp) const {
    const double ta = params.t_atom;
    const double u = tau + ta - tp;  // time since emission, >= 0 on support
    const double re = 0.25 * omega * omega * (tau + tp - ta) * u - params.gamma() * u;
    const double im = params.delta * u;
    return std::exp(cplx(re, im));
  }
};

// (N - sqrt(N), N + sqrt(N)): coherent-state shot-noise band.
inline std::pair<double, double> shot_noise_bands(double n) {
  if (n < 0.0) throw param_error("photon number must be >= 0");
  double s = std::sqrt(n);
  return {n - s, n + s};
}

// Peak atomic excitation estimate g_eff^2 N / gamma^2; the weak-field
// deformation amplitude is trustworthy well below saturation (~0.1).
inline double peak_excitation_estimate(const phys_params& p, double omega, double mean_n) {
  double g = g_effective(p, omega);
  return g * g * mean_n / (p.gamma() * p.gamma());
}

namespace detail {

inline double trap_w(std::size_t i, std::size_t n) {
  return (i == 0 || i + 1 == n) ? 0.5 : 1.0;
}

// J_i: the detector-time integral of E(tau) F(tau, t_i), i.e. the
// analytic tau-integral of the interference term.  Evaluated by a
// backward recurrence with exponential-weight trapezoid segments:
//   J_i = (omega/sqrt(2 pi)) f_i Q_i,  f_i = exp(-omega^2 (t_i-T_A)^2/4),
//   Q_i = w0 f_i + w1 f_{i+1} + e^{mu dt} Q_{i+1},  mu = i delta - gamma.
inline std::vector<cplx> j_overlap(const phys_params& p, double omega, const sim_grid& grid) {
  const std::size_t n = grid.n_points;
  const double dt = grid.dt();
  const cplx mu(-p.gamma(), p.delta);
  const cplx muh = mu * dt;
  cplx w0, w1;
  if (std::abs(muh) > 1e-4) {
    w1 = (std::exp(muh) * (muh - 1.0) + 1.0) / (mu * mu * dt);
    w0 = (std::exp(muh) - 1.0) / mu - w1;
  } else {
    w1 = dt * (0.5 + muh / 3.0 + muh * muh / 8.0);
    w0 = dt * (0.5 + muh / 6.0 + muh * muh / 24.0);
  }
  const cplx eh = std::exp(muh);
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = grid.t(i) - p.t_atom;
    f[i] = std::exp(-0.25 * omega * omega * u * u);
  }
  std::vector<cplx> j(n);
  const double pref = omega / std::sqrt(2.0 * pi);
  cplx q(0.0, 0.0);
  j[n - 1] = cplx(0.0, 0.0);
  for (std::size_t k = n - 1; k-- > 0;) {
    q = w0 * f[k] + w1 * f[k + 1] + eh * q;
    j[k] = pref * f[k] * q;
  }
  return j;
}

// Half-bandwidth (in steps) of the pair kernel exp(-gamma |t - t'|):
// contributions beyond 16/gamma are below exp(-16) relative.
inline std::size_t band_steps(const phys_params& p, const sim_grid& grid) {
  std::size_t wb = std::size_t(std::ceil(16.0 / (p.gamma() * grid.dt())));
  if (wb + 1 > grid.n_points) wb = grid.n_points - 1;
  return wb;
}

// sum_i w_i (sz_i + 1/2) dt: the time-integrated excitation.
template <class SzLike>
inline double excitation_integral(const sim_grid& grid, const SzLike& sz) {
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.n_points; ++i)
    acc += trap_w(i, grid.n_points) * (sz[i] + 0.5);
  return acc * grid.dt();
}

// Banded double sum with a constant correlator K = k0 (single-photon
// Fock pulse): sum_ij w_i w_j k0 Re(G_ij) dt^2 with
// G_ij = (omega/sqrt(2 pi))/(2 gamma) e^{(i delta - gamma)|t_i - t_j|} ex_i ex_j.
inline double banded_double_sum_const(const phys_params& p, double omega, const sim_grid& grid,
                                      double k0) {
  const std::size_t n = grid.n_points;
  const double dt = grid.dt();
  const double ga = p.gamma();
  std::vector<double> ex(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = grid.t(i) - p.t_atom;
    ex[i] = std::exp(-0.25 * omega * omega * u * u);
  }
  const double pref = omega / std::sqrt(2.0 * pi) / (2.0 * ga);
  // The pair kernel is separable when the correlator is constant, so the
  // double sum reduces to an exact O(n) prefix recurrence
  //   b_i = sum_{j<i} e^{mu (t_i - t_j)} w_j ex_j,  mu = -gamma + i delta,
  // with no band truncation at all.
  const cplx step = std::exp(cplx(-ga * dt, p.delta * dt));
  cplx b = 0.0;
  double total = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    b = step * (b + prev);
    double we = trap_w(i, n) * ex[i];
    total += we * (we + 2.0 * b.real());
    prev = we;
  }
  return k0 * pref * total * dt * dt;
}

// Streaming evaluation of the coherent-drive sums
//   s1 = sum_i w_i sz_i J_i dt                   (interference term)
//   s2 = sum_ij w_i w_j Re(K_ij G_ij) dt^2       (incoherent term, banded)
// with a sliding window of wb+1 regression anchors: at step i the
// column i mod (wb+1) is re-seeded with anchor i, row i is accumulated
// against the live window, then every column advances one RK4 step.
struct coherent_sums {
  cplx s1;
  double s2 = 0.0;
  std::vector<bloch_vector> one_time;
};

inline coherent_sums coherent_stream(const phys_params& p, const coherent_drive& d, double omega,
                                     const sim_grid& grid) {
  const std::size_t n = grid.n_points;
  const double dt = grid.dt();
  const double ga = p.gamma();
  const cplx v = d.v();

  coherent_sums out;
  out.one_time = solve_coherent_inversion(p, d, omega, grid);
  std::vector<cplx> j = j_overlap(p, omega, grid);
  out.s1 = cplx(0.0, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    out.s1 += trap_w(i, n) * out.one_time[i].sz * j[i];
  out.s1 *= dt;

  drive_table gt(p, omega, grid);
  std::vector<double> ex(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = grid.t(i) - p.t_atom;
    ex[i] = std::exp(-0.25 * omega * omega * u * u);
  }
  const double pref = omega / std::sqrt(2.0 * pi) / (2.0 * ga);
  const std::size_t wb = band_steps(p, grid);
  const std::size_t m = wb + 1;
  std::vector<cplx> decay_pow(m);
  for (std::size_t off = 0; off < m; ++off)
    decay_pow[off] = std::exp(cplx(-ga * double(off) * dt, p.delta * double(off) * dt));

  std::vector<regression_state> win(m, regression_state{{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}});
  std::vector<cplx> b1(m, cplx(0.0, 0.0));
  double s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % m;
    win[c] = regression_state{cplx(0.25, 0.0), -0.5 * out.one_time[i].sp,
                              0.5 * std::conj(out.one_time[i].sp)};
    b1[c] = -ga * out.one_time[i].sz;
    const std::size_t jlo = i > wb ? i - wb : 0;
    double row = 0.0;
    for (std::size_t jj = jlo; jj <= i; ++jj) {
      const std::size_t off = i - jj;
      double gr = (decay_pow[off] * win[jj % m].x).real() * pref * ex[i] * ex[jj];
      row += (off == 0 ? 1.0 : 2.0) * gr * trap_w(jj, n);
    }
    s2 += trap_w(i, n) * row * dt * dt;
    if (i + 1 == n) break;
    for (std::size_t c2 = 0; c2 < m; ++c2)
      regression_rk4_step(win[c2], p, v, b1[c2], gt.g0[i], gt.gh[i], gt.g0[i + 1], dt);
  }
  out.s2 = s2;
  return out;
}

// Same sliding-window scheme for the two-Fock-pulse collision
// correlator K(t, t') = <1| sz(t) sz(t') |1> (unnormalized auxiliary
// state, <1|1> = 2, diagonal 1/2).
struct fock_collision_sums {
  double cross = 0.0;  // sum_i w_i sz11_i Re(J_i) dt
  double s2 = 0.0;
  fock_collision_elements elements;
};

inline fock_collision_sums fock_collision_stream(const phys_params& p, double omega,
                                                 const sim_grid& grid) {
  const std::size_t n = grid.n_points;
  const double dt = grid.dt();
  const double ga = p.gamma();

  fock_collision_sums out;
  out.elements = solve_fock_collision_elements(p, omega, grid);
  std::vector<cplx> j = j_overlap(p, omega, grid);
  out.cross = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    out.cross += trap_w(i, n) * out.elements.sz11[i] * j[i].real();
  out.cross *= dt;

  drive_table gt(p, omega, grid);
  std::vector<double> ex(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = grid.t(i) - p.t_atom;
    ex[i] = std::exp(-0.25 * omega * omega * u * u);
  }
  const double pref = omega / std::sqrt(2.0 * pi) / (2.0 * ga);
  const std::size_t wb = band_steps(p, grid);
  const std::size_t m = wb + 1;
  std::vector<cplx> decay_pow(m);
  for (std::size_t off = 0; off < m; ++off)
    decay_pow[off] = std::exp(cplx(-ga * double(off) * dt, p.delta * double(off) * dt));

  std::vector<fock_regression_state> win(
      m, fock_regression_state{{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}});
  std::vector<cplx> b1(m, cplx(0.0, 0.0));
  double s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % m;
    win[c] = fock_regression_state{cplx(0.5, 0.0), 0.5 * out.elements.cross[i],
                                   -0.5 * std::conj(out.elements.cross[i])};
    b1[c] = -ga * out.elements.sz11[i];
    const std::size_t jlo = i > wb ? i - wb : 0;
    double row = 0.0;
    for (std::size_t jj = jlo; jj <= i; ++jj) {
      const std::size_t off = i - jj;
      double gr = (decay_pow[off] * win[jj % m].q).real() * pref * ex[i] * ex[jj];
      row += (off == 0 ? 1.0 : 2.0) * gr * trap_w(jj, n);
    }
    s2 += trap_w(i, n) * row * dt * dt;
    if (i + 1 == n) break;
    for (std::size_t c2 = 0; c2 < m; ++c2)
      fock_regression_rk4_step(win[c2], p, b1[c2], gt.g0[i], gt.gh[i], gt.g0[i + 1], dt);
  }
  out.s2 = s2;
  return out;
}

// Energy-balance route for the Fock collision: <sz> in the full
// two-photon sector, driven by the one-photon coherence,
//   dW = -2 gamma (W + 1/2) - 2 g Re(D),
//   dD = -(i delta + gamma) D + 2 g Z(t),
// with Z(t) = sz11 interpolated at step midpoints.  Mirror symmetry
// gives n_plus = 1 - gamma0 * integral of (W + 1/2).
inline double fock_collision_energy_route(const phys_params& p, double omega,
                                          const sim_grid& grid,
                                          const fock_collision_elements& e) {
  const std::size_t n = grid.n_points;
  const double dt = grid.dt();
  const double ga = p.gamma();
  drive_table gt(p, omega, grid);
  const cplx ld(-ga, -p.delta);
  auto fw = [&](double w, cplx dc, double g) { return -2.0 * ga * (w + 0.5) - 2.0 * g * dc.real(); };
  auto fd = [&](cplx dc, double g, double z) { return ld * dc + 2.0 * g * z; };
  double w = -0.5;
  cplx dc(0.0, 0.0);
  std::vector<double> wt(n);
  wt[0] = w;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double g0 = gt.g0[i], gh = gt.gh[i], g1 = gt.g0[i + 1];
    double z0 = e.sz11[i], z1 = e.sz11[i + 1], zh = 0.5 * (z0 + z1);
    double k1w = fw(w, dc, g0);
    cplx k1d = fd(dc, g0, z0);
    double k2w = fw(w + 0.5 * dt * k1w, dc + 0.5 * dt * k1d, gh);
    cplx k2d = fd(dc + 0.5 * dt * k1d, gh, zh);
    double k3w = fw(w + 0.5 * dt * k2w, dc + 0.5 * dt * k2d, gh);
    cplx k3d = fd(dc + 0.5 * dt * k2d, gh, zh);
    double k4w = fw(w + dt * k3w, dc + dt * k3d, g1);
    cplx k4d = fd(dc + dt * k3d, g1, z1);
    w += dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    dc += dt / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    wt[i + 1] = w;
  }
  return 1.0 - p.gamma0 * excitation_integral(grid, wt);
}

inline sim_grid refine_grid(const sim_grid& g) {
  return sim_grid{g.t_start, g.t_end, 2 * g.n_points - 1};
}

inline void require_converged(double coarse, double fine, const char* what) {
  double rel = std::abs(fine - coarse) / std::max(std::abs(fine), 1e-9);
  if (rel >= 1e-4)
    throw accuracy_error(std::string(what) +
                         " quadrature not converged: halving the step changed it by " +
                         std::to_string(rel) + " relative");
}

// ------------------------------------------------------------------
// Per-tau profile machinery.
//
// psi_j(tau): analytic weight of emission time t_j in the retarded
// field at detector time tau, exponents combined in log space.  Zero
// for emissions later than tau + t_atom.
inline cplx psi_weight(const phys_params& p, double omega, const sim_grid& grid, std::size_t jj,
                       double tau) {
  const double uj = grid.t(jj) - p.t_atom;
  if (uj > tau) return cplx(0.0, 0.0);
  const double re = -0.25 * omega * omega * uj * uj - p.gamma() * (tau - uj);
  return trap_w(jj, grid.n_points) * grid.dt() * std::exp(cplx(re, -p.delta * uj));
}

struct profile_terms {
  cplx cross_amp;             // multiply by 2 r sqrt(N) V and take Re
  double dbl = 0.0;           // multiply by r^2 |V|^2
  double imag_residue = 0.0;  // |Im| discarded from the incoherent term
};

// Contract the windowed correlator block at one tau.  k_row(j, i_up)
// returns K(t_{j+d}, t_j) for d = 0 .. i_up - j; szlike supplies the
// one-operator expectation entering the interference term.
template <class SzLike, class KRow>
inline profile_terms profile_point(const phys_params& p, double omega, const sim_grid& grid,
                                   const SzLike& szlike, double tau, KRow&& k_row) {
  const std::size_t n = grid.n_points;
  const double pref = omega / std::sqrt(2.0 * pi);
  const double dt = grid.dt();
  double x = (tau + p.t_atom - grid.t_start) / dt;
  std::size_t i_up = x <= 0.0 ? 0 : std::min<std::size_t>(n - 1, std::size_t(std::floor(x)));
  const double frac = x <= 0.0 ? 0.0 : x - double(i_up);
  const std::size_t wb = band_steps(p, grid);
  const std::size_t jlo = i_up > wb ? i_up - wb : 0;
  const std::size_t nw = i_up - jlo + 1;

  std::vector<cplx> psi(nw);
  for (std::size_t a = 0; a < nw; ++a) psi[a] = psi_weight(p, omega, grid, jlo + a, tau);
  // The emission integral terminates at the causal cut u = tau, which
  // falls a fraction frac of a step past node i_up: the terminating
  // trapezoid takes half weight there plus the partial cell.
  psi[nw - 1] *= (0.5 + frac) / trap_w(i_up, n);

  cplx sa(0.0, 0.0);
  for (std::size_t a = 0; a < nw; ++a) sa += szlike[jlo + a] * psi[a];

  cplx sk(0.0, 0.0);
  for (std::size_t a = 0; a < nw; ++a) {
    if (psi[a] == cplx(0.0, 0.0)) continue;
    std::vector<cplx> row = k_row(jlo + a, i_up);
    sk += std::conj(psi[a]) * row[0] * psi[a];
    for (std::size_t b = a + 1; b < nw; ++b)
      sk += 2.0 * (std::conj(psi[b]) * row[b - a] * psi[a]).real();
  }

  profile_terms out;
  const double env_half = std::exp(-0.25 * omega * omega * tau * tau);
  out.cross_amp = pref * env_half * std::exp(cplx(0.0, p.delta * tau)) * sa;
  out.dbl = pref * sk.real();
  out.imag_residue = std::abs(pref * sk.imag());
  return out;
}

}  // namespace detail

// --------------------------------------------------------------------------
// Single-pulse scattering

struct scatter_result {
  std::vector<double> tau_grid;    // retarded detector times
  std::vector<double> s_forward;   // transmitted photon current
  std::vector<double> s_backward;  // reflected photon current
  double transmittance = 0.0;      // per incident photon
  double reflectance = 0.0;
  double loss = 0.0;
  double imag_residue = 0.0;  // largest |Im| discarded from any sample
};

struct profile_options {
  bool enabled = true;
  std::size_t stride = 0;  // 0: choose automatically (~256 samples)
};

// Transmittance, reflectance, loss, and (optionally) the time-resolved
// photon currents of a single Gaussian pulse.  The integrals are
// evaluated on the given grid and on a step-halved grid; if T or R
// moves by 1e-4 relative or more the quadrature has not converged and
// an accuracy_error is thrown.  The refined values are reported.
inline scatter_result transmittance_reflectance(const phys_params& p, const pulse_spec& pulse,
                                                const sim_grid& grid,
                                                const profile_options& opt = {}) {
  p.validate();
  pulse.validate();
  const double omega = pulse.bandwidth;
  const double r = p.ratio * p.gamma0;
  const double n_in = pulse.photon_number();
  const sim_grid fine = detail::refine_grid(grid);

  scatter_result out;
  std::vector<bloch_vector> one_time;  // coherent only, coarse grid

  if (pulse.kind == pulse_kind::fock_one) {
    auto trl = [&](const sim_grid& g) {
      std::vector<cplx> j = detail::j_overlap(p, omega, g);
      double cross = 0.0;
      for (std::size_t i = 0; i < g.n_points; ++i)
        cross += detail::trap_w(i, g.n_points) * j[i].real();
      cross *= g.dt();
      double dbl = detail::banded_double_sum_const(p, omega, g, 0.25);
      return std::pair<double, double>{1.0 - r * cross + r * r * dbl, r * r * dbl};
    };
    auto [tc, rc] = trl(grid);
    auto [tf, rf] = trl(fine);
    detail::require_converged(tc, tf, "transmittance");
    detail::require_converged(rc, rf, "reflectance");
    out.transmittance = tf;
    out.reflectance = rf;
  } else {
    coherent_drive d{n_in, 0.0, 0.0};
    detail::coherent_sums cs = detail::coherent_stream(p, d, omega, grid);
    detail::coherent_sums fs = detail::coherent_stream(p, d, omega, fine);
    double tc = 1.0 + 2.0 * r * cs.s1.real() + r * r * cs.s2;
    double tf = 1.0 + 2.0 * r * fs.s1.real() + r * r * fs.s2;
    double rc = r * r * cs.s2;
    double rf = r * r * fs.s2;
    detail::require_converged(tc, tf, "transmittance");
    detail::require_converged(rc, rf, "reflectance");
    out.transmittance = tf;
    out.reflectance = rf;
    one_time = std::move(cs.one_time);
  }
  out.loss = 1.0 - out.transmittance - out.reflectance;

  if (!opt.enabled) return out;

  const std::size_t n = grid.n_points;
  const std::size_t stride = opt.stride ? opt.stride : std::max<std::size_t>(1, n / 256);
  const bool fock = pulse.kind == pulse_kind::fock_one;
  const double v = std::sqrt(n_in);
  detail::drive_table gt(p, omega, grid);
  std::vector<double> szlike(n, -0.5);
  if (!fock)
    for (std::size_t i = 0; i < n; ++i) szlike[i] = one_time[i].sz;
  auto k_row_const = [&](std::size_t jj, std::size_t i_up) {
    return std::vector<cplx>(i_up - jj + 1, cplx(0.25, 0.0));
  };
  auto k_row_reg = [&](std::size_t jj, std::size_t i_up) {
    return detail::coherent_row_impl(p, cplx(v, 0.0), gt, grid, one_time, jj, i_up);
  };
  for (std::size_t i = 0; i < n; i += stride) {
    double tau = grid.t(i) - p.t_atom;
    detail::profile_terms pt =
        fock ? detail::profile_point(p, omega, grid, szlike, tau, k_row_const)
             : detail::profile_point(p, omega, grid, szlike, tau, k_row_reg);
    double s_fwd = n_in * free_envelope(omega, tau) +
                   2.0 * r * v * (cplx(v, 0.0) * pt.cross_amp).real() + r * r * n_in * pt.dbl;
    out.tau_grid.push_back(tau);
    out.s_forward.push_back(s_fwd);
    out.s_backward.push_back(r * r * n_in * pt.dbl);
    out.imag_residue = std::max(out.imag_residue, r * r * n_in * pt.imag_residue);
  }
  return out;
}

namespace detail {

inline std::vector<cplx> dense_k_row(const std::vector<cplx>& k, std::size_t n, std::size_t jj,
                                     std::size_t i_up) {
  std::vector<cplx> row(i_up - jj + 1);
  for (std::size_t i = jj; i <= i_up; ++i) row[i - jj] = k[i * n + jj];
  return row;
}

inline void require_profile_coverage(const phys_params& p, const sim_grid& grid, double tau,
                                     bool have_dense) {
  if (!have_dense) throw param_error("per-tau currents need the dense two-time matrix");
  if (tau + p.t_atom > grid.t_end + 0.5 * grid.dt())
    throw param_error("correlator grid does not cover this retarded time");
}

}  // namespace detail

// Forward photon current of a single pulse at one retarded time, from a
// correlator grid holding the dense two-time matrix.
inline double poynting_forward(const phys_params& p, const pulse_spec& pulse,
                               const correlator_grid& corr, double tau) {
  p.validate();
  pulse.validate();
  detail::require_profile_coverage(p, corr.grid, tau, !corr.two_time.empty());
  const double omega = pulse.bandwidth;
  const double r = p.ratio * p.gamma0;
  const double n_in = pulse.photon_number();
  const double v = std::sqrt(n_in);
  const std::size_t n = corr.grid.n_points;
  auto k_row = [&](std::size_t jj, std::size_t i_up) {
    return detail::dense_k_row(corr.two_time, n, jj, i_up);
  };
  detail::profile_terms pt = detail::profile_point(p, omega, corr.grid, corr.one_time, tau, k_row);
  return n_in * free_envelope(omega, tau) + 2.0 * r * v * (cplx(v, 0.0) * pt.cross_amp).real() +
         r * r * n_in * pt.dbl;
}

// Reflected photon current of a single pulse: incoherent term only.
inline double poynting_backward(const phys_params& p, const pulse_spec& pulse,
                                const correlator_grid& corr, double tau) {
  p.validate();
  pulse.validate();
  detail::require_profile_coverage(p, corr.grid, tau, !corr.two_time.empty());
  const double omega = pulse.bandwidth;
  const double r = p.ratio * p.gamma0;
  const double n_in = pulse.photon_number();
  const std::size_t n = corr.grid.n_points;
  auto k_row = [&](std::size_t jj, std::size_t i_up) {
    return detail::dense_k_row(corr.two_time, n, jj, i_up);
  };
  detail::profile_terms pt = detail::profile_point(p, omega, corr.grid, corr.one_time, tau, k_row);
  return r * r * n_in * pt.dbl;
}

// --------------------------------------------------------------------------
// Two-pulse collisions

struct collision_result {
  double n_plus = 0.0;   // photons leaving in +z
  double n_minus = 0.0;  // photons leaving in -z
  double loss = 0.0;     // photons scattered out of the guide
};

// Counter-propagating coherent pulses with equal envelopes: the atom
// sees the combined amplitude V = sqrt(na) + e^{i phi} sqrt(nb); the
// forward and backward outputs reweight the same correlator sums by V
// and its phase-mirrored counterpart.  Convergence-gated like the
// single pulse; refined values are reported.
inline collision_result coherent_collision_n(const phys_params& p, const coherent_drive& d,
                                             double omega, const sim_grid& grid) {
  p.validate();
  if (d.na < 0.0 || d.nb < 0.0) throw param_error("mean photon numbers must be >= 0");
  const double r = p.ratio * p.gamma0;
  auto eval = [&](const sim_grid& g) {
    detail::coherent_sums cs = detail::coherent_stream(p, d, omega, g);
    collision_result res;
    const cplx v = d.v(), vb = d.v_backward();
    res.n_plus =
        d.na + 2.0 * r * std::sqrt(d.na) * (v * cs.s1).real() + r * r * std::norm(v) * cs.s2;
    res.n_minus =
        d.nb + 2.0 * r * std::sqrt(d.nb) * (vb * cs.s1).real() + r * r * std::norm(v) * cs.s2;
    std::vector<double> sz(g.n_points);
    for (std::size_t i = 0; i < g.n_points; ++i) sz[i] = cs.one_time[i].sz;
    res.loss = 2.0 * p.gamma0 * detail::excitation_integral(g, sz);
    return res;
  };
  collision_result coarse = eval(grid);
  collision_result fine = eval(detail::refine_grid(grid));
  detail::require_converged(coarse.n_plus, fine.n_plus, "forward photon number");
  detail::require_converged(coarse.n_minus, fine.n_minus, "backward photon number");
  return fine;
}

// Two colliding single-photon Fock pulses; mirror symmetry forces
// n_plus = n_minus, so loss closes the balance at 2 - 2 n_plus.
inline collision_result fock_collision_n(const phys_params& p, double omega,
                                         const sim_grid& grid) {
  p.validate();
  const double r = p.ratio * p.gamma0;
  auto eval = [&](const sim_grid& g) {
    detail::fock_collision_sums fs = detail::fock_collision_stream(p, omega, g);
    return 1.0 + r * fs.cross + r * r * fs.s2;
  };
  double coarse = eval(grid);
  double fine = eval(detail::refine_grid(grid));
  detail::require_converged(coarse, fine, "forward photon number");
  collision_result res;
  res.n_plus = fine;
  res.n_minus = fine;
  res.loss = 2.0 - 2.0 * fine;
  return res;
}

// Photon current of a coherent-coherent collision at one retarded time,
// from dense correlators solved with the combined drive.  `dir` selects
// the +z or -z detector.
inline double poynting_collision(const phys_params& p, const coherent_drive& d, double omega,
                                 const correlator_grid& corr, double tau,
                                 pulse_direction dir = pulse_direction::forward) {
  p.validate();
  detail::require_profile_coverage(p, corr.grid, tau, !corr.two_time.empty());
  const double r = p.ratio * p.gamma0;
  const std::size_t n = corr.grid.n_points;
  auto k_row = [&](std::size_t jj, std::size_t i_up) {
    return detail::dense_k_row(corr.two_time, n, jj, i_up);
  };
  detail::profile_terms pt = detail::profile_point(p, omega, corr.grid, corr.one_time, tau, k_row);
  const bool fwd = dir == pulse_direction::forward;
  const double n_free = fwd ? d.na : d.nb;
  const cplx v_dir = fwd ? d.v() : d.v_backward();
  return n_free * free_envelope(omega, tau) +
         2.0 * r * std::sqrt(n_free) * (v_dir * pt.cross_amp).real() +
         r * r * std::norm(d.v()) * pt.dbl;
}

// Forward photon current of the Fock-Fock collision at one retarded
// time; the 1/2 on the one-operator element undoes <1|1> = 2.
inline double poynting_collision(const phys_params& p, double omega,
                                 const fock_collision_correlators& corr, const sim_grid& grid,
                                 double tau) {
  p.validate();
  detail::require_profile_coverage(p, grid, tau, !corr.two_time.empty());
  const double r = p.ratio * p.gamma0;
  const std::size_t n = grid.n_points;
  std::vector<double> half_z(n);
  for (std::size_t i = 0; i < n; ++i) half_z[i] = 0.5 * corr.elements.sz11[i];
  auto k_row = [&](std::size_t jj, std::size_t i_up) {
    return detail::dense_k_row(corr.two_time, n, jj, i_up);
  };
  detail::profile_terms pt = detail::profile_point(p, omega, grid, half_z, tau, k_row);
  return free_envelope(omega, tau) + 2.0 * r * pt.cross_amp.real() + r * r * pt.dbl;
}

// --------------------------------------------------------------------------
// Pulse deformation amplitude h(tau) and references

namespace detail {

inline cplx h_quadrature(const phys_params& p, double omega, double tau, double retard_coeff) {
  const double upper = tau + p.t_atom;
  if (upper <= 0.0) return cplx(0.0, 0.0);
  const double r = p.ratio * p.gamma0;
  const double rate = std::max({p.gamma(), omega, 0.5 * std::abs(p.delta), 1.0});
  const std::size_t m = std::max<std::size_t>(2000, std::size_t(std::ceil(40.0 * upper * rate)));
  const double h = upper / double(m - 1);
  cplx acc(0.0, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double s = double(i) * h;
    double re =
        -p.gamma() * s + retard_coeff * omega * omega * tau * s - 0.25 * omega * omega * s * s;
    cplx val = std::exp(cplx(re, p.delta * s));
    acc += (i == 0 || i + 1 == m) ? 0.5 * val : val;
  }
  return -0.5 * r * acc * h;
}

}  // namespace detail

// Weak-field deformation amplitude of the transmitted pulse at retarded
// time tau: the scattered field divided by the free field.
inline cplx phase_h(const phys_params& p, double omega, double tau) {
  return detail::h_quadrature(p, omega, tau, -2.0);
}

// Variant with the pulse-overlap retardation factor resummed into the
// emission integral; coincides with phase_h at tau = 0 and reproduces
// the weak-field transmitted profile as E(tau) |1 + h(tau)|^2.  Kept as
// an internal cross-check.
inline cplx phase_h_resummed(const phys_params& p, double omega, double tau) {
  return detail::h_quadrature(p, omega, tau, 0.5);
}

// Monochromatic (omega -> 0) limit: a Lorentzian line of width gamma.
inline cplx lorentzian_h(const phys_params& p) {
  const double r = p.ratio * p.gamma0;
  const double den = p.gamma() * p.gamma() + p.delta * p.delta;
  return cplx(-0.5 * r * p.gamma() / den, -0.5 * r * p.delta / den);
}

}  // namespace wgqed

#endif
