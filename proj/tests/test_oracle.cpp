#include "catch_amalgamated.hpp"

#include <cmath>

#include "wgqed/oracle.hpp"
#include "wgqed/observables.hpp"

using namespace wgqed;

TEST_CASE("decoupled atom: the discretized continuum transmits everything") {
  phys_params p;
  p.ratio = 0.0;
  oracle_result res = oracle_scatter(p, 1.0, false);
  CHECK(res.t == Catch::Approx(1.0).margin(2e-3));
  CHECK(std::abs(res.r) < 1e-10);
  CHECK(std::abs(res.l) < 1e-10);
  CHECK(res.norm0 == Catch::Approx(1.0).margin(2e-3));
}

TEST_CASE("independent routes agree on single-photon transport") {
  phys_params p;
  pulse_spec ps;
  ps.kind = pulse_kind::fock_one;
  profile_options off;
  off.enabled = false;
  scatter_result q = transmittance_reflectance(p, ps, make_grid(p, ps), off);
  oracle_result o = oracle_scatter(p, 1.0, false);

  CHECK(std::abs(q.transmittance - o.t) < 0.02 * o.t);
  CHECK(std::abs(q.reflectance - o.r) < 0.02 * o.r);
  CHECK(std::abs(q.loss - o.l) < 0.02 * o.l);

  // bookkeeping of the reference itself
  CHECK(o.l >= 0.0);
  CHECK(o.t + o.r <= o.norm0 + 1e-9);
}

TEST_CASE("collision inversion record matches the correlator elements") {
  phys_params p;
  p.t_atom = 6.0 / 0.3;
  oracle_result o = oracle_scatter(p, 0.3, true);

  pulse_spec ps;
  ps.bandwidth = 0.3;
  ps.kind = pulse_kind::fock_one;
  sim_grid g = make_grid(p, ps);
  fock_collision_elements e = solve_fock_collision_elements(p, 0.3, g);

  REQUIRE(o.t_sample.size() == o.sz11.size());
  std::size_t compared = 0;
  for (std::size_t s = 0; s < o.t_sample.size(); ++s) {
    double t = o.t_sample[s];
    if (t < g.t_start || t > g.t_end) continue;
    double x = (t - g.t_start) / g.dt();
    std::size_t i = std::size_t(x);
    if (i + 1 >= g.n_points) continue;
    double w = x - double(i);
    double ref = (1.0 - w) * e.sz11[i] + w * e.sz11[i + 1];
    CHECK(std::abs(o.sz11[s] - ref) < 0.02);
    ++compared;
  }
  CHECK(compared >= 32);
}

TEST_CASE("reference survives its own convergence gate") {
  phys_params p;
  CHECK_NOTHROW(oracle_converged(p, 1.0, false));
}
