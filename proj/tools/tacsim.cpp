#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <tac/config.hpp>
#include <tac/study.hpp>

namespace {

struct Cli {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  bool emit_vtk = false;
};

tac::Config build_config(const Cli& cli) {
  tac::Config cfg;
  if (!cli.config_path.empty()) cfg = tac::load_config_file(cli.config_path);
  for (const auto& ov : cli.overrides) tac::apply_override(cfg, ov);
  if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
  if (cli.emit_vtk) cfg.emit_vtk = true;
  return cfg;
}

void add_common(CLI::App* cmd, Cli& cli) {
  cmd->add_option("-c,--config", cli.config_path, "configuration file (INI)");
  cmd->add_option("-o,--out", cli.out_dir, "output directory (overrides run.out)");
  cmd->add_option("--override", cli.overrides,
                  "section.key=value applied after the config file, repeatable");
  cmd->add_flag("--vtk", cli.emit_vtk, "write VTK snapshots");
}

// One line to stderr that scripts can parse on failure.
void report(const char* kind, const std::exception& e) {
  std::string msg = e.what();
  for (auto& ch : msg)
    if (ch == '"') ch = '\'';
  std::cerr << "{\"error\":\"" << kind << "\",\"message\":\"" << msg << "\"}" << std::endl;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-element simulator for thermal adhesive contact"};
  app.require_subcommand(1);

  Cli cli;
  CLI::App* cmd_run = app.add_subcommand("run", "march one scenario and write its outputs");
  add_common(cmd_run, cli);
  CLI::App* cmd_study = app.add_subcommand("study", "sweep one axis across refinement levels");
  add_common(cmd_study, cli);

  CLI11_PARSE(app, argc, argv);

  try {
    const tac::Config cfg = build_config(cli);
    if (cmd_run->parsed()) {
      const tac::Scenario sc = tac::make_scenario(cfg);
      tac::run_scenario(sc, cfg.out_dir, cfg.emit_vtk, &std::cout);
    } else {
      const tac::StudyResult res = tac::run_study(cfg, cfg.out_dir, &std::cout);
      for (const auto& lev : res.levels)
        if (!lev.error.empty()) {
          std::cerr << "{\"error\":\"SolverError\",\"message\":\"level "
                    << lev.value << " failed\"}" << std::endl;
          return 3;
        }
    }
  } catch (const tac::SolverError& e) {
    report("SolverError", e);
    return 3;
  } catch (const tac::IoError& e) {
    report("IoError", e);
    return 4;
  } catch (const tac::Error& e) {
    report("ConfigError", e);
    return 2;
  } catch (const std::exception& e) {
    report("InternalError", e);
    return 1;
  }
  return 0;
}
