#ifndef WGQED_SWEEP_HPP
#define WGQED_SWEEP_HPP

// Figure-style parameter sweeps: each subcommand owns one axis, a fixed
// column set, and a per-point computation.  Points are distributed over
// a worker pool through an atomic index into preallocated row storage,
// so the output is byte-identical for any worker count.  A failed point
// leaves a nan row and a diagnostic; it never aborts the sweep.

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

#include "wgqed/config.hpp"
#include "wgqed/csv.hpp"
#include "wgqed/model.hpp"
#include "wgqed/observables.hpp"
#include "wgqed/oracle.hpp"
#include "wgqed/version.hpp"

namespace wgqed {

// The two standard probe bandwidths for deformation-amplitude curves
// and the four standard bandwidths for saturation curves.
inline constexpr double probe_bandwidths[2] = {0.1, 1.0};
inline constexpr double saturation_bandwidths[4] = {0.01, 0.1, 1.0, 10.0};

struct sweep_run {
  sweep_table table;
  std::vector<std::string> point_errors;  // aligned with rows; empty = ok
  std::string post_error;                 // set when a whole-sweep gate failed
  bool any_failed = false;
};

namespace detail {

inline std::vector<double> axis_values(const axis_spec& ax) {
  if (ax.log && (ax.from <= 0.0 || ax.to <= 0.0))
    throw param_error("log axis needs positive endpoints");
  std::vector<double> v(ax.points);
  for (std::size_t i = 0; i < ax.points; ++i) {
    double f = double(i) / double(ax.points - 1);
    v[i] = ax.log ? std::exp(std::log(ax.from) + f * (std::log(ax.to) - std::log(ax.from)))
                  : ax.from + f * (ax.to - ax.from);
  }
  return v;
}

inline axis_spec merge_axis(const axis_spec& def, const axis_spec& cfg,
                            const std::string& subcommand) {
  axis_spec ax = def;
  if (cfg.name_set && cfg.name != def.name)
    throw param_error("subcommand '" + subcommand + "' sweeps '" + def.name +
                      "'; axis.name '" + cfg.name + "' is not supported");
  if (cfg.scale_set) ax.log = cfg.log;
  if (cfg.from_set) ax.from = cfg.from;
  if (cfg.to_set) ax.to = cfg.to;
  if (cfg.points_set) ax.points = cfg.points;
  return ax;
}

inline void parallel_points(std::size_t n, unsigned threads,
                            const std::function<void(std::size_t)>& work) {
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      work(i);
    }
  };
  if (threads <= 1) {
    loop();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned k = 0; k < threads; ++k) pool.emplace_back(loop);
  for (auto& th : pool) th.join();
}

// Pulse whose photon number sets the automatic grid density: single
// pulses drive with sqrt(na), collisions with |sqrt(na) + sqrt(nb)|.
inline pulse_spec grid_pulse(const run_config& cfg, double om, double na, bool collision,
                             double nb = 0.0) {
  pulse_spec ps;
  ps.bandwidth = om;
  ps.kind = cfg.kind;
  double amp = collision ? std::sqrt(na) + std::sqrt(nb) : std::sqrt(na);
  ps.mean_n = amp * amp;
  return ps;
}

inline void echo_meta(sweep_table& tab, const std::string& name, const run_config& cfg,
                      const axis_spec& ax, bool echo_grid) {
  auto num = [](double x) { return format_value(x); };
  tab.meta.emplace_back("subcommand", name);
  tab.meta.emplace_back("version", WGQED_VERSION);
  tab.meta.emplace_back("gamma0", num(cfg.gamma0));
  tab.meta.emplace_back("ratio", num(cfg.ratio));
  tab.meta.emplace_back("omega", num(cfg.omega));
  tab.meta.emplace_back("delta", num(cfg.delta));
  tab.meta.emplace_back("na", num(cfg.na));
  tab.meta.emplace_back("nb", num(cfg.nb));
  tab.meta.emplace_back("phi", num(cfg.phi));
  tab.meta.emplace_back("kind", cfg.kind == pulse_kind::fock_one ? "fock1" : "coherent");
  if (cfg.t_atom_set) tab.meta.emplace_back("t_atom", num(cfg.t_atom));
  tab.meta.emplace_back("grid.span", num(cfg.span));
  if (cfg.grid_points) tab.meta.emplace_back("grid.points", num(double(cfg.grid_points)));
  tab.meta.emplace_back("axis.name", ax.name);
  tab.meta.emplace_back("axis.scale", ax.log ? "log" : "linear");
  tab.meta.emplace_back("axis.from", num(ax.from));
  tab.meta.emplace_back("axis.to", num(ax.to));
  tab.meta.emplace_back("axis.points", num(double(ax.points)));
  if (echo_grid) {
    // Resolution of the grid at the configured omega and photon numbers;
    // axis subcommands rebuild the grid per point.
    bool collision = name == "collision-fringes" || name == "collision-tuning";
    try {
      pulse_spec ps = grid_pulse(cfg, cfg.omega, cfg.na, collision, cfg.nb);
      sim_grid g = make_grid(cfg.params_at(cfg.omega), ps, cfg.span, cfg.grid_points);
      tab.meta.emplace_back("grid.dt", num(g.dt()));
      tab.meta.emplace_back("grid.n_points", num(double(g.n_points)));
    } catch (const param_error&) {
      // the reference grid may be invalid while every axis point is fine
    }
  }
}

}  // namespace detail

inline const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = {
      "transmittance-sweep", "nonlinearity",      "detection",        "susceptibility",
      "phase-shift",         "collision-fringes", "collision-tuning", "oracle-check"};
  return names;
}

inline sweep_run run_subcommand(const std::string& name, const run_config& cfg,
                                unsigned threads) {
  axis_spec def;
  std::vector<std::string> cols;
  std::function<std::vector<double>(double)> point;
  bool echo_grid = true;  // susceptibility and phase-shift use no time grid

  auto single_pulse_trl = [&cfg](const phys_params& p, pulse_kind kind, double om,
                                 double mean_n) {
    pulse_spec ps;
    ps.bandwidth = om;
    ps.kind = kind;
    ps.mean_n = mean_n;
    sim_grid g = make_grid(p, ps, cfg.span, cfg.grid_points);
    profile_options po;
    po.enabled = false;
    return transmittance_reflectance(p, ps, g, po);
  };

  if (name == "transmittance-sweep") {
    def = {"omega", true, 0.01, 100.0, 25, true, true, true, true, true};
    cols = {"omega",     "t_coherent", "r_coherent", "loss_coherent",
            "t_fock1",   "r_fock1",    "loss_fock1"};
    point = [&, single_pulse_trl](double om) {
      phys_params p = cfg.params_at(om);
      scatter_result c = single_pulse_trl(p, pulse_kind::coherent, om, cfg.na);
      scatter_result f = single_pulse_trl(p, pulse_kind::fock_one, om, 1.0);
      return std::vector<double>{om,     c.transmittance, c.reflectance, c.loss,
                                 f.transmittance, f.reflectance, f.loss};
    };
  } else if (name == "nonlinearity") {
    def = {"na", true, 1.0, 100.0, 25, true, true, true, true, true};
    cols = {"na",    "t_i",   "r_i",    "loss_i",  "t_ii",  "r_ii",  "loss_ii",
            "t_iii", "r_iii", "loss_iii", "t_iv",  "r_iv",  "loss_iv"};
    point = [&, single_pulse_trl](double na) {
      std::vector<double> row{na};
      for (double om : saturation_bandwidths) {
        phys_params p = cfg.params_at(om);
        scatter_result c = single_pulse_trl(p, pulse_kind::coherent, om, na);
        row.push_back(c.transmittance);
        row.push_back(c.reflectance);
        row.push_back(c.loss);
      }
      return row;
    };
  } else if (name == "detection") {
    def = {"na", false, 1.0, 30.0, 30, true, true, true, true, true};
    cols = {"na",          "n_transmitted", "n_trans_low", "n_trans_high",
            "n_reflected", "n_refl_low",    "n_refl_high"};
    point = [&, single_pulse_trl](double na) {
      phys_params p = cfg.params_at(cfg.omega);
      scatter_result c = single_pulse_trl(p, pulse_kind::coherent, cfg.omega, na);
      double nt = c.transmittance * na, nr = c.reflectance * na;
      auto [tlo, thi] = shot_noise_bands(nt);
      auto [rlo, rhi] = shot_noise_bands(nr);
      return std::vector<double>{na, nt, tlo, thi, nr, rlo, rhi};
    };
  } else if (name == "susceptibility") {
    def = {"delta", false, -10.0, 10.0, 81, true, true, true, true, true};
    cols = {"delta",       "re_h_omega01", "im_h_omega01", "re_h_omega1",
            "im_h_omega1", "re_lorentzian", "im_lorentzian"};
    echo_grid = false;
    point = [&](double delta) {
      phys_params p = cfg.params_at(probe_bandwidths[0]);
      p.delta = delta;
      std::vector<double> row{delta};
      for (double om : probe_bandwidths) {
        phys_params pc = p;
        pc.t_atom = cfg.t_atom_set ? cfg.t_atom : 6.0 / om;
        cplx h = phase_h(pc, om, 0.0);
        row.push_back(h.real());
        row.push_back(h.imag());
      }
      cplx hl = lorentzian_h(p);
      row.push_back(hl.real());
      row.push_back(hl.imag());
      return row;
    };
  } else if (name == "phase-shift") {
    def = {"omega_tau", false, -1.0, 1.0, 41, true, true, true, true, true};
    cols = {"omega_tau", "im_h_omega01", "im_h_omega1"};
    echo_grid = false;
    point = [&](double x) {
      std::vector<double> row{x};
      for (double om : probe_bandwidths) {
        phys_params p = cfg.params_at(om);
        cplx h = phase_h(p, om, x / om);
        row.push_back(h.imag());
      }
      return row;
    };
  } else if (name == "collision-fringes" || name == "collision-tuning") {
    if (name == "collision-fringes") {
      def = {"phi", false, 0.0, 2.0 * pi, 64, true, true, true, true, true};
      cols = {"phi", "n_plus", "n_minus", "loss"};
    } else {
      def = {"nb", false, 0.0, 4.0, 41, true, true, true, true, true};
      cols = {"nb", "n_plus", "n_minus", "loss"};
    }
    const bool sweep_phi = name == "collision-fringes";
    point = [&, sweep_phi](double x) {
      phys_params p = cfg.params_at(cfg.omega);
      collision_result res;
      if (cfg.kind == pulse_kind::fock_one) {
        // one photon on each side; phi and the mean numbers do not enter
        pulse_spec ps = detail::grid_pulse(cfg, cfg.omega, 1.0, true, 1.0);
        sim_grid g = make_grid(p, ps, cfg.span, cfg.grid_points);
        res = fock_collision_n(p, cfg.omega, g);
      } else {
        coherent_drive d{cfg.na, cfg.nb, cfg.phi};
        (sweep_phi ? d.phi : d.nb) = x;
        pulse_spec ps = detail::grid_pulse(cfg, cfg.omega, d.na, true, d.nb);
        sim_grid g = make_grid(p, ps, cfg.span, cfg.grid_points);
        res = coherent_collision_n(p, d, cfg.omega, g);
      }
      return std::vector<double>{x, res.n_plus, res.n_minus, res.loss};
    };
  } else if (name == "oracle-check") {
    def = {"omega", true, 0.1, 10.0, 3, true, true, true, true, true};
    cols = {"omega",    "t_quadrature", "r_quadrature", "t_oracle",
            "r_oracle", "rel_diff_t",   "rel_diff_r"};
    point = [&, single_pulse_trl](double om) {
      phys_params p = cfg.params_at(om);
      scatter_result q = single_pulse_trl(p, pulse_kind::fock_one, om, 1.0);
      oracle_result o = oracle_converged(p, om, false);
      double dtr = std::abs(q.transmittance - o.t) / std::max(o.t, 1e-12);
      double drr = std::abs(q.reflectance - o.r) / std::max(o.r, 1e-12);
      return std::vector<double>{om, q.transmittance, q.reflectance, o.t, o.r, dtr, drr};
    };
  } else {
    throw param_error("unknown subcommand '" + name + "'");
  }

  axis_spec ax = detail::merge_axis(def, cfg.axis, name);
  std::vector<double> xs = detail::axis_values(ax);

  sweep_run run;
  run.table.columns = cols;
  detail::echo_meta(run.table, name, cfg, ax, echo_grid);
  run.table.rows.assign(xs.size(), std::vector<double>(cols.size(),
                                                       std::numeric_limits<double>::quiet_NaN()));
  run.point_errors.assign(xs.size(), std::string());

  detail::parallel_points(xs.size(), threads, [&](std::size_t i) {
    try {
      std::vector<double> row = point(xs[i]);
      row.resize(cols.size(), std::numeric_limits<double>::quiet_NaN());
      run.table.rows[i] = std::move(row);
    } catch (const std::exception& e) {
      run.table.rows[i][0] = xs[i];
      run.point_errors[i] = e.what();
    }
  });

  for (const auto& e : run.point_errors)
    if (!e.empty()) run.any_failed = true;

  if (name == "oracle-check" && !run.any_failed) {
    for (const auto& row : run.table.rows)
      if (row[5] > 0.02 || row[6] > 0.02) {
        run.post_error = "quadrature and discretized-continuum reference disagree by more than "
                         "2% at omega = " +
                         detail::format_value(row[0]);
        break;
      }
  }
  return run;
}

}  // namespace wgqed

#endif
