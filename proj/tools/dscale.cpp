// Command-line front end.  Subcommands:
//   dscale tau    --config FILE | --preset NAME [overrides]
//   dscale nls    --config FILE | --preset NAME [overrides]
//   dscale fluid  --config FILE | --preset NAME [overrides]
//   dscale preset list | show NAME
//   dscale report SUMMARY.json
// Output paths resolve against $DSCALE_OUT_ROOT when relative.  Exit codes:
// 0 success, 2 config/usage error, 3 solver failure, 4 run finished but a
// conformance flag was raised.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "dscale/io.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::string preset_name;
  std::string out_dir;
  double t_max = -1.0;
  double dt = -1.0;
  double eps = -1.0;
  double alpha = -1.0;
  int n = -1;
  long long seed = -1;
};

void add_run_options(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config_path, "JSON run configuration file");
  cmd->add_option("--preset", ov.preset_name, "named scenario preset");
  cmd->add_option("--out", ov.out_dir, "output directory override");
  cmd->add_option("--t-max", ov.t_max, "final time override");
  cmd->add_option("--dt", ov.dt, "time step (or adaptive cap) override");
  cmd->add_option("--eps", ov.eps, "scale parameter override");
  cmd->add_option("--alpha", ov.alpha, "confinement exponent override");
  cmd->add_option("--n", ov.n, "grid points per axis override");
  cmd->add_option("--seed", ov.seed, "RNG seed override");
}

dscale::RunConfig load_config(const Overrides& ov,
                              const std::vector<dscale::RunFamily>& allowed) {
  using dscale::ConfigError;
  if (ov.config_path.empty() == ov.preset_name.empty())
    throw ConfigError("give exactly one of --config or --preset", "cli");
  dscale::RunConfig cfg;
  if (!ov.preset_name.empty()) {
    cfg = dscale::preset(ov.preset_name);
  } else {
    std::ifstream is(ov.config_path);
    if (!is)
      throw ConfigError("cannot open '" + ov.config_path + "'", "cli");
    std::stringstream ss;
    ss << is.rdbuf();
    cfg = dscale::parse_config_text(ss.str());
  }
  bool ok = false;
  for (dscale::RunFamily f : allowed) ok = ok || cfg.family == f;
  if (!ok)
    throw ConfigError("config family '" +
                          std::string(dscale::family_name(cfg.family)) +
                          "' does not belong to this subcommand",
                      "family");
  // Apply overrides, then revalidate through the canonical round trip.
  if (!ov.out_dir.empty()) cfg.output.dir = ov.out_dir;
  if (ov.t_max > 0.0) cfg.scheme.t_max = ov.t_max;
  if (ov.dt > 0.0) cfg.scheme.dt = ov.dt;
  if (ov.eps > 0.0) cfg.phys.eps = ov.eps;
  if (ov.alpha > 0.0) cfg.phys.alpha = ov.alpha;
  if (ov.n > 0) cfg.grid.n = ov.n;
  if (ov.seed >= 0) cfg.seed = ov.seed;
  return dscale::parse_config(cfg.to_json());
}

int do_run(const Overrides& ov, const std::vector<dscale::RunFamily>& fams) {
  const dscale::RunConfig cfg = load_config(ov, fams);
  const dscale::RunSummary sum = dscale::run(cfg);
  dscale::write_report(std::cout, sum.to_json());
  if (!sum.conforming) {
    std::cerr << "run finished but raised a conformance flag\n";
    return 4;
  }
  return 0;
}

int do_report(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    std::cerr << "cannot open '" << path << "'\n";
    return 2;
  }
  nlohmann::json doc;
  is >> doc;
  dscale::write_report(std::cout, doc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scaled-frame dispersive/fluid run driver"};
  app.require_subcommand(1);

  Overrides ov;
  CLI::App* tau = app.add_subcommand("tau", "scaling-factor trajectory run");
  CLI::App* nls = app.add_subcommand("nls", "wave run (lab or scaled frame)");
  CLI::App* fluid = app.add_subcommand("fluid", "regularized 1D fluid run");
  add_run_options(tau, ov);
  add_run_options(nls, ov);
  add_run_options(fluid, ov);

  CLI::App* preset = app.add_subcommand("preset", "inspect scenario presets");
  preset->require_subcommand(1);
  preset->add_subcommand("list", "list preset names");
  std::string show_name;
  CLI::App* show = preset->add_subcommand("show", "print a preset as JSON");
  show->add_option("name", show_name, "preset name")->required();

  std::string report_path;
  CLI::App* report =
      app.add_subcommand("report", "verdict table for a summary.json");
  report->add_option("summary", report_path, "path to summary.json")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  using dscale::RunFamily;
  try {
    if (tau->parsed()) return do_run(ov, {RunFamily::tau_only});
    if (nls->parsed())
      return do_run(ov, {RunFamily::nls_original, RunFamily::nls_rescaled,
                         RunFamily::korteweg_scatter});
    if (fluid->parsed()) return do_run(ov, {RunFamily::fluid_regularized});
    if (preset->parsed()) {
      if (show->parsed()) {
        std::cout << dscale::preset(show_name).to_json().dump(2) << "\n";
      } else {
        for (const std::string& name : dscale::preset_names())
          std::cout << name << "\n";
      }
      return 0;
    }
    if (report->parsed()) return do_report(report_path);
  } catch (const dscale::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const dscale::Error& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
