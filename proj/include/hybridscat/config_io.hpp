#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybridscat/config.hpp"
#include "hybridscat/special_functions.hpp"

namespace hybridscat
{

// Raised for unreadable, malformed or incomplete configuration files.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Uniform sampling grid for field output, row-major (x fastest).
struct SamplingGrid
{
  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
  int nx = 0, ny = 0;  // zero disables field output
  std::vector<Point2> points() const;
};

enum class LadderReference
{
  mie,   // separation-of-variables reference (constant discs only)
  self,  // finest ladder level
};

// Mesh-refinement ladder: level l uses K * 2^l subdomains per side and F * 2^l Fourier modes.
struct LadderSpec
{
  int levels = 3;
  LadderReference reference = LadderReference::self;
  bool compare_without_smoothing = false;
  double min_order = 1.7;
  int sample_points = 41;  // per side of the self-convergence sampling grid
};

struct QuadratureTestSpec
{
  int patches_per_side = 2;
  std::vector<int> orders{12, 24, 48, 96};
};

struct DispersionTestSpec
{
  int order = 30;
  double points_per_wavelength = 6.0;
  std::vector<double> kappas;  // empty: use the problem's kappa only
};

struct RunConfig
{
  ProblemConfig problem;
  RefractivityModel model;
  special::Incidence incidence;
  SamplingGrid grid;
  LadderSpec ladder;
  QuadratureTestSpec quadrature;
  DispersionTestSpec dispersion;
  std::string source;  // canonical text of the parsed file
};

// Accepts a number or a string such as "5pi", "2.5*pi", "pi".
double parse_wavenumber(const std::string &text);

RunConfig parse_run_config(const std::string &text);
RunConfig load_run_config(const std::filesystem::path &path);

// Full provenance hash of a run: problem, model, incidence and mode specs.
std::string run_hash(const RunConfig &config);

}  // namespace hybridscat
