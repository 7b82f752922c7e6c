#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "manifest.hpp"
#include "runner.hpp"
#include "version.hpp"

namespace {

constexpr const char* kOutEnv = "GAAH_OUT_DIR";

struct Options {
  std::string config_path;
  std::string out;
  std::vector<std::string> sets;
  bool full = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "configuration file (key = value lines)")->required();
  sub->add_option("--out", o.out, std::string("output directory (overrides ") + kOutEnv + " and output.dir)");
  sub->add_option("--set", o.sets, "override one key, key=value (repeatable)");
  sub->add_flag("--full", o.full, "figdata: long-time grid (same as --set figdata.full=true)");
  sub->footer(gaah::cli::describe_keys());
}

}  // namespace

int main(int argc, char** argv) {
  using namespace gaah::cli;

  CLI::App app{"Open-system dynamics and resonance spectra of the generalized Aubry-Andre-Harper ring"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.footer(std::string("Output directory: --out, else $") + kOutEnv + ", else output.dir.\n" +
             "Exit codes: 0 ok, 2 config error, 3 numeric failure, 4 validation failure.\n");

  Options opts;
  const char* descriptions[][2] = {
      {"spectrum", "closed-system spectrum, IPR and mobility edge"},
      {"evolve", "memory-kernel evolution of SP, IPR, norm and variance"},
      {"poles", "complex poles of the reduced eigenvalue problem and determinant grid"},
      {"oracle", "compare the evolution against an exactly diagonalized discrete bath"},
      {"sweep", "run evolve or poles over sweep.values of sweep.param"},
      {"figdata", "plot-ready data bundles fig1, fig2, fig3, figA1, figA2"},
  };
  for (const auto& d : descriptions) add_common(app.add_subcommand(d[0], d[1]), opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code::config;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const Command cmd = *parse_command(name);

  RunConfig cfg;
  std::filesystem::path out_dir;
  try {
    cfg = parse_config_file(opts.config_path);
    for (const auto& s : opts.sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError(s, "--set expects key=value");
      apply(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (opts.full) cfg.figdata_full = true;
    if (const char* env = std::getenv(kOutEnv); env != nullptr && *env != '\0') cfg.output_dir = env;
    if (!opts.out.empty()) cfg.output_dir = opts.out;
    validate(cfg);
    out_dir = cfg.output_dir;
  } catch (const ConfigError& e) {
    std::cerr << "gaah " << name << ": config error: " << e.what() << '\n';
    out_dir = !opts.out.empty() ? opts.out : (std::getenv(kOutEnv) ? std::getenv(kOutEnv) : cfg.output_dir);
    try {
      write_error_record(out_dir, name, "config", e.key(), e.what(), "");
    } catch (const std::exception&) {
    }
    return exit_code::config;
  }

  const int code = run(cmd, cfg, out_dir);
  if (code != exit_code::ok) {
    std::cerr << "gaah " << name << ": failed with exit code " << code << ", see "
              << (out_dir / "error.json").string() << '\n';
  }
  return code;
}
