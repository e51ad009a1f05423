#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "conform/conform.h"

int main(int argc, char** argv) {
  CLI::App app{"conformable calculus solver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(conform_version()));

  std::string config, out_dir = ".";
  double tol = 0.0;
  std::size_t grid = 0;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "run a config file or re-run a JSON report");
  run->add_option("config", config, "config path")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--tol", tol, "residual tolerance")->check(CLI::PositiveNumber);
  run->add_option("--grid", grid, "output grid points")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));
  run->add_flag("--quiet", quiet, "print nothing on success");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : CONFORM_ECONFIG;
  }

  conform_options opt{tol, grid};
  conform_run* r = nullptr;
  const int code = conform_run_file(config.c_str(), &opt, &r);
  if (code != CONFORM_OK) std::fprintf(stderr, "error: %s\n", conform_run_message(r));
  if (r && conform_run_write(r, out_dir.c_str()) != CONFORM_OK) {
    std::fprintf(stderr, "error: %s\n", conform_last_error());
    conform_run_free(r);
    return CONFORM_ENUMERICS;
  }
  if (code == CONFORM_OK && !quiet) std::fputs(conform_run_report(r), stdout);
  conform_run_free(r);
  return code;
}
