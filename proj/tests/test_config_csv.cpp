#include "catch_amalgamated.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "wgqed/config.hpp"
#include "wgqed/csv.hpp"
#include "wgqed/sweep.hpp"

using namespace wgqed;

TEST_CASE("config: partial file fills the documented defaults") {
  run_config cfg = parse_config_string("ratio = 1.0\nomega = 1.0\nkind = fock1\n");
  CHECK(cfg.gamma0 == 1.0);
  CHECK(cfg.delta == 0.0);
  CHECK(cfg.kind == pulse_kind::fock_one);
  CHECK(cfg.t_atom_for(cfg.omega) == 6.0);
  CHECK(cfg.na == 1.0);
  CHECK(cfg.nb == 1.0);
  CHECK(cfg.phi == 0.0);
  CHECK(cfg.span == 8.0);
  CHECK(cfg.grid_points == 0);

  // explicit t_atom wins at any bandwidth
  run_config ta = parse_config_string("t_atom = 11.5\n");
  CHECK(ta.t_atom_for(0.1) == 11.5);
  // otherwise six pulse widths
  CHECK(cfg.t_atom_for(0.1) == Catch::Approx(60.0).margin(1e-12));
}

TEST_CASE("config: collision parameters parse") {
  run_config cfg = parse_config_string("omega = 0.3\nphi = 3.14159\n");
  CHECK(cfg.omega == Catch::Approx(0.3));
  CHECK(cfg.phi == Catch::Approx(3.14159));
}

TEST_CASE("config: malformed input is rejected with the line number") {
  auto fails_with = [](const std::string& text, const std::string& needle) {
    try {
      parse_config_string(text);
      FAIL("expected param_error for: " << text);
    } catch (const param_error& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  fails_with("kind = coherent\nna = -1\n", "line 2");
  fails_with("kind = coherent\nna = -1\n", "na");
  fails_with("bandwidth = 1\n", "unknown key");
  fails_with("ratio = 1\nratio = 2\n", "duplicate key");
  fails_with("kind = squeezed\n", "kind");
  fails_with("omega 0.3\n", "key=value");
  fails_with("omega =\n", "empty value");
  fails_with("omega = 0.3 rad\n", "trailing");
  fails_with("gamma0 = 0\n", "gamma0");
  fails_with("grid.span = 2\n", "grid.span");
  fails_with("axis.scale = cubic\n", "axis.scale");
  fails_with("axis.points = 1\n", "axis.points");
  fails_with("grid.points = 3.5\n", "grid.points");
}

TEST_CASE("config: comments and blank lines are ignored") {
  run_config cfg = parse_config_string("# a comment\n\n  delta = -2.5  \n# another\n");
  CHECK(cfg.delta == -2.5);
}

TEST_CASE("csv: layout, precision, and nan cells") {
  sweep_table tab;
  tab.meta = {{"subcommand", "demo"}, {"ratio", "1"}};
  tab.columns = {"x", "y", "z"};
  tab.rows = {{1.0 / 3.0, 2.0, std::nan("")}, {0.123456789012345, -1e-7, 42.0}};

  std::ostringstream os;
  write_csv(os, tab);
  std::string text = os.str();

  std::vector<std::string> lines;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) lines.push_back(l);
  REQUIRE(lines.size() == tab.meta.size() + 1 + tab.rows.size());
  CHECK(lines[0] == "# subcommand=demo");
  CHECK(lines[1] == "# ratio=1");
  CHECK(lines[2] == "x,y,z");
  CHECK(lines[3].find("0.333333333333333") != std::string::npos);  // >= 12 digits
  CHECK(lines[3].find("nan") != std::string::npos);
  CHECK(lines[4].find("0.123456789012345") != std::string::npos);

  std::ostringstream oj;
  write_json(oj, tab);
  std::string js = oj.str();
  CHECK(js.find("null") != std::string::npos);
  CHECK(js.find("nan") == std::string::npos);
  CHECK(js.find("\"subcommand\": \"demo\"") != std::string::npos);
}

TEST_CASE("sweep meta echoes a config that parses back to the same run") {
  run_config cfg;
  cfg.ratio = 0.7;
  cfg.omega = 0.5;
  cfg.delta = 1.25;
  cfg.axis.points = 5;
  cfg.axis.points_set = true;
  sweep_run run = run_subcommand("susceptibility", cfg, 1);

  std::ostringstream os;
  write_csv(os, run.table);

  // keep only meta lines whose keys are config keys, and re-parse them
  std::string cfg_text;
  std::istringstream is(os.str());
  for (std::string l; std::getline(is, l);) {
    if (l.rfind("# ", 0) != 0) break;
    std::string kv = l.substr(2);
    std::string key = kv.substr(0, kv.find('='));
    for (const char* k : {"gamma0", "ratio", "omega", "delta", "na", "nb", "phi", "kind",
                          "t_atom", "grid.span", "grid.points", "axis.name", "axis.scale",
                          "axis.from", "axis.to", "axis.points"})
      if (key == k) cfg_text += kv + "\n";
  }
  REQUIRE(!cfg_text.empty());
  run_config back = parse_config_string(cfg_text);
  CHECK(back.gamma0 == cfg.gamma0);
  CHECK(back.ratio == cfg.ratio);
  CHECK(back.omega == cfg.omega);
  CHECK(back.delta == cfg.delta);
  CHECK(back.na == cfg.na);
  CHECK(back.nb == cfg.nb);
  CHECK(back.phi == cfg.phi);
  CHECK(back.kind == cfg.kind);
  CHECK(back.span == cfg.span);
  CHECK(back.grid_points == cfg.grid_points);
  CHECK(back.axis.points == cfg.axis.points);

  // meta carries the resolved physical parameters
  bool saw_ratio = false;
  for (const auto& [k, v] : run.table.meta)
    if (k == "ratio" && v.find("0.7") == 0) saw_ratio = true;
  CHECK(saw_ratio);
}

TEST_CASE("sweep output is deterministic across thread counts") {
  run_config cfg;
  cfg.axis.points = 7;
  cfg.axis.points_set = true;
  sweep_run a = run_subcommand("susceptibility", cfg, 1);
  sweep_run b = run_subcommand("susceptibility", cfg, 3);
  std::ostringstream oa, ob;
  write_csv(oa, a.table);
  write_csv(ob, b.table);
  CHECK(oa.str() == ob.str());
}
