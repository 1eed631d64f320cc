#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "hybridscat/harness.hpp"

extern "C" void openblas_set_num_threads(int);

int main(int argc, char **argv)
{
  using namespace hybridscat;
  CLI::App app{"Hybrid volumetric / boundary-integral Helmholtz scattering solver"};
  std::string config, out = "out", mode = "solve";
  int levels = 0, threads = 1;
  app.add_option("--config", config, "JSON run configuration")->required();
  app.add_option("--mode", mode, "solve | convergence-ladder | quadrature-test | dispersion-test")
      ->check(CLI::IsMember({"solve", "convergence-ladder", "quadrature-test", "dispersion-test"}));
  app.add_option("--out", out, "output directory");
  app.add_option("--levels", levels, "ladder levels (overrides the config)")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "BLAS threads")->check(CLI::PositiveNumber);
  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : harness::exit_validation;
  }

  openblas_set_num_threads(threads);
  harness::RunManifest m;
  m.config = config;
  m.out_dir = out;
  m.mode = harness::mode_from_string(mode);
  m.threads = threads;
  if (levels > 0)
  {
    m.levels = levels;
  }
  if (const char *dir = std::getenv("HYBRIDSCAT_CACHE_DIR"); dir && *dir)
  {
    m.cache_dir = dir;
  }
  return harness::run(m);
}
