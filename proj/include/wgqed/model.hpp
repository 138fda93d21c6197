#ifndef WGQED_MODEL_HPP
#define WGQED_MODEL_HPP

// Physical parameters, derived rates and simulation grids for a single
// two-level atom coupled to a one-dimensional waveguide.
//
// Units: gamma0 = 1 fixes the time scale and c = 1, so the travel time
// t_atom and the atom position coincide numerically.  Carrier phase
// factors are set to 1 by the choice of coordinate origin; only the
// detuning delta and the relative phase of a backward pulse survive in
// any computed expectation value.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace wgqed {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double default_span = 8.0;

// Configuration / usage problems: CLI exit code 1.
struct param_error : std::runtime_error {
  explicit param_error(const std::string& m) : std::runtime_error(m) {}
};

// Numerical accuracy failures (non-convergent quadrature, oracle
// disagreement): CLI exit code 2.
struct accuracy_error : std::runtime_error {
  explicit accuracy_error(const std::string& m) : std::runtime_error(m) {}
};

// gamma1 = ratio*gamma0/2 is the emission rate into the guided modes,
// gamma = gamma0 + gamma1 the total dipole decay rate.
inline void derive_rates(double gamma0, double ratio, double& gamma1, double& gamma) {
  if (gamma0 <= 0.0) throw param_error("gamma0 must be > 0");
  if (ratio < 0.0) throw param_error("ratio must be >= 0");
  gamma1 = 0.5 * ratio * gamma0;
  gamma = gamma0 + gamma1;
}

struct phys_params {
  double gamma0 = 1.0;  // free-space spontaneous decay rate (the time unit)
  double ratio = 1.0;   // atomic cross section over mode cross section
  double delta = 0.0;   // carrier detuning from the atomic resonance
  double t_atom = 6.0;  // light travel time from initial pulse center to atom

  double gamma1() const { return 0.5 * ratio * gamma0; }
  double gamma() const { return gamma0 + gamma1(); }

  void validate() const {
    double g1, g;
    derive_rates(gamma0, ratio, g1, g);
    if (t_atom <= 0.0) throw param_error("t_atom must be > 0");
  }
};

enum class pulse_kind { coherent, fock_one };
enum class pulse_direction { forward, backward };

struct pulse_spec {
  pulse_direction direction = pulse_direction::forward;
  double bandwidth = 1.0;              // Omega
  pulse_kind kind = pulse_kind::coherent;
  double mean_n = 1.0;                 // coherent only; fock_one carries one photon
  double phase = 0.0;                  // coherent only

  void validate() const {
    if (bandwidth <= 0.0) throw param_error("bandwidth must be > 0");
    if (kind == pulse_kind::coherent && mean_n < 0.0)
      throw param_error("mean photon number must be >= 0");
  }
  double photon_number() const { return kind == pulse_kind::fock_one ? 1.0 : mean_n; }
};

struct sim_grid {
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t n_points = 0;

  double dt() const { return (t_end - t_start) / double(n_points - 1); }
  double t(std::size_t i) const { return t_start + double(i) * dt(); }
  std::size_t index_of(double time) const {
    double x = (time - t_start) / dt();
    long k = std::lround(x);
    if (k < 0) k = 0;
    if (std::size_t(k) >= n_points) k = long(n_points) - 1;
    return std::size_t(k);
  }
};

// Effective peak Rabi frequency of a Gaussian pulse of bandwidth Omega:
// g_eff = sqrt(gamma1*Omega/sqrt(2 pi)).
inline double g_effective(const phys_params& p, double omega) {
  return std::sqrt(p.gamma1() * omega / std::sqrt(2.0 * pi));
}

// Single-photon Rabi envelope g(t) = g_eff * exp(-Omega^2 (t - t_atom)^2 / 4).
inline double effective_rabi(const phys_params& p, const pulse_spec& pulse, double t) {
  double om = pulse.bandwidth;
  double u = t - p.t_atom;
  return g_effective(p, om) * std::exp(-0.25 * om * om * u * u);
}

// Grid from 0 to t_atom + span/Omega.  n_points = 0 selects the default
// density of 40 steps per period of the fastest scale, counting decay,
// envelope, detuning, and the peak Rabi rate 2 g_eff sqrt(N) (with a
// 1.5x margin on the Rabi term, which feeds quantities with partial
// cancellations) so that strongly driven runs stay converged.  The
// detuning weight 0.75 keeps the trapezoid curvature error of the
// oscillatory output quadratures, ~ (dt delta)^2 / 12, under the 1e-4
// step-halving gate.  An explicit n_points may be coarser but must
// still resolve both decay and envelope
// (dt <= min(1/(20 gamma), 1/(20 Omega))).
inline sim_grid make_grid(const phys_params& p, const pulse_spec& pulse,
                          double span = default_span, std::size_t n_points = 0) {
  p.validate();
  pulse.validate();
  if (span < 4.0) throw param_error("grid span must be >= 4");
  double om = pulse.bandwidth;
  double t_end = p.t_atom + span / om;
  if (n_points == 0) {
    double rate = std::max({p.gamma(), om, 0.75 * std::abs(p.delta)}) +
                  3.0 * g_effective(p, om) * std::sqrt(pulse.photon_number());
    n_points = std::size_t(std::ceil(t_end * 40.0 * rate)) + 1;
    if (n_points < 64) n_points = 64;
  }
  if (n_points < 64) throw param_error("grid needs at least 64 points");
  sim_grid g{0.0, t_end, n_points};
  double dt_max = std::min(1.0 / (20.0 * p.gamma()), 1.0 / (20.0 * om));
  if (g.dt() > dt_max)
    throw param_error("grid too coarse: dt = " + std::to_string(g.dt()) +
                      " exceeds " + std::to_string(dt_max));
  return g;
}

}  // namespace wgqed

#endif
