// wgqed: few-photon Gaussian pulses scattering on a two-level atom
// coupled to a one-dimensional waveguide.  Each subcommand reproduces
// one standard figure-style sweep as a CSV/JSON table.
//
// Exit codes: 0 success, 1 usage/configuration error, 2 accuracy error
// (non-convergent quadrature or reference disagreement).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "wgqed/config.hpp"
#include "wgqed/csv.hpp"
#include "wgqed/observables.hpp"
#include "wgqed/sweep.hpp"
#include "wgqed/version.hpp"

namespace {

unsigned resolve_threads(bool given, unsigned value) {
  if (given) {
    if (value < 1) throw wgqed::param_error("--threads must be >= 1");
    return value;
  }
  if (const char* env = std::getenv("WGQED_THREADS")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw wgqed::param_error("WGQED_THREADS must be a positive integer, got '" +
                               std::string(env) + "'");
    return unsigned(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

const char* describe(const std::string& name) {
  if (name == "transmittance-sweep")
    return "T, R, loss versus bandwidth for coherent and one-photon pulses";
  if (name == "nonlinearity")
    return "coherent-pulse T, R, loss versus mean photon number at four bandwidths";
  if (name == "detection") return "transmitted/reflected photon numbers with shot-noise bands";
  if (name == "susceptibility")
    return "deformation amplitude h(0) versus detuning, with the Lorentzian limit";
  if (name == "phase-shift") return "Im h(tau) across the pulse at two bandwidths";
  if (name == "collision-fringes") return "collision outputs versus relative phase";
  if (name == "collision-tuning") return "collision outputs versus backward photon number";
  if (name == "oracle-check")
    return "one-photon T, R against the discretized-continuum reference";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Few-photon pulse scattering on a waveguide-coupled two-level atom"};
  app.set_version_flag("--version", WGQED_VERSION);
  std::string config_path, out_path, format = "csv";
  unsigned threads = 0;
  app.add_option("--config", config_path, "key=value run configuration file");
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  CLI::Option* topt =
      app.add_option("--threads", threads, "worker count (fallback: WGQED_THREADS, then hardware)");
  app.require_subcommand(1);
  for (const auto& name : wgqed::subcommand_names())
    app.add_subcommand(name, describe(name))->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    wgqed::run_config cfg =
        config_path.empty() ? wgqed::run_config{} : wgqed::parse_config_file(config_path);
    unsigned nthreads = resolve_threads(topt->count() > 0, threads);

    if (sub == "phase-shift") {
      for (double om : wgqed::probe_bandwidths) {
        wgqed::phys_params p = cfg.params_at(om);
        double est = wgqed::peak_excitation_estimate(p, om, cfg.na);
        std::cerr << "peak excitation estimate at omega=" << om << ": " << est;
        if (est > 0.1)
          std::cerr << "  (warning: beyond the weak-drive regime; "
                       "the deformation amplitude is unreliable)";
        std::cerr << "\n";
      }
    }

    wgqed::sweep_run run = wgqed::run_subcommand(sub, cfg, nthreads);

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) {
        std::cerr << "error: cannot open output file '" << out_path << "'\n";
        return 1;
      }
      os = &file;
    }
    if (format == "json")
      wgqed::write_json(*os, run.table);
    else
      wgqed::write_csv(*os, run.table);
    os->flush();

    for (std::size_t i = 0; i < run.point_errors.size(); ++i)
      if (!run.point_errors[i].empty())
        std::cerr << "point " << run.table.columns[0] << "=" << run.table.rows[i][0] << ": "
                  << run.point_errors[i] << "\n";
    if (!run.post_error.empty()) std::cerr << "error: " << run.post_error << "\n";
    return (run.any_failed || !run.post_error.empty()) ? 2 : 0;
  } catch (const wgqed::accuracy_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const wgqed::param_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
