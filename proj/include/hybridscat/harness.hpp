#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hybridscat/boundary_quadrature.hpp"
#include "hybridscat/config_io.hpp"
#include "hybridscat/hybrid_solver.hpp"

namespace hybridscat::harness
{

enum class Mode
{
  solve,
  convergence_ladder,
  quadrature_test,
  dispersion_test,
};

Mode mode_from_string(const std::string &text);
std::string to_string(Mode mode);

struct RunManifest
{
  std::filesystem::path config;
  std::filesystem::path out_dir;
  Mode mode = Mode::solve;
  std::optional<int> levels;  // overrides the ladder section
  int threads = 1;
  std::optional<std::filesystem::path> cache_dir;
};

// Exit codes of run().
inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_solver = 3;
inline constexpr int exit_tolerance = 4;

struct SolveReport
{
  SolveResult result;
  std::vector<Point2> points;
  VectorXc field;
  std::optional<double> mie_error;  // constant discs only
};

// One solve with field sampling on the configured grid.
SolveReport run_solve(const RunConfig &rc, const std::optional<std::filesystem::path> &cache_dir = std::nullopt);

struct LadderRow
{
  int level = 0;
  ProblemConfig config;
  double error = 0.0;                   // NaN for the reference level of a self-convergence ladder
  std::optional<double> error_without;  // Fourier smoothing off
  std::optional<double> order;          // log2(e_{2h} / e_h)
  int matvecs = 0;
  bool converged = false;
  double precompute_seconds = 0.0;
  double seconds_per_iteration = 0.0;
};

struct LadderResult
{
  std::vector<LadderRow> rows;
  // Least-squares slope of log e against log h over the levels carrying an error.
  double observed_order = 0.0;
  bool order_ok = false;
};

// Level l refines the subdomain count and the Fourier order of the base problem by 2^l.
ProblemConfig ladder_level(const ProblemConfig &base, int level);
std::vector<Point2> ladder_samples(const RunConfig &rc);
double least_squares_slope(const std::vector<double> &x, const std::vector<double> &y);
LadderResult run_ladder(const RunConfig &rc, const std::optional<std::filesystem::path> &cache_dir = std::nullopt);

struct QuadratureRow
{
  double kappa = 0.0;
  int patches_per_side = 0;
  int order = 0;
  double points_per_wavelength = 0.0;
  double error = 0.0;
  int far = 0, near = 0, singular = 0;
  double seconds = 0.0;
};

std::vector<QuadratureRow> run_quadrature_test(const RunConfig &rc);
// Patches per side chosen so the boundary nodes sample the exterior wavelength at the requested density.
std::vector<QuadratureRow> run_dispersion_test(const RunConfig &rc);
int dispersion_patches_per_side(double kappa, double half_width, int order, double points_per_wavelength);

void write_field_csv(const std::filesystem::path &path, const std::vector<Point2> &points, const VectorXc &field);
void write_ladder_csv(const std::filesystem::path &path, const LadderResult &ladder, const std::string &hash);
void write_quadrature_csv(const std::filesystem::path &path, const std::vector<QuadratureRow> &rows,
                          const std::string &hash);

// Reads the config, runs the mode and writes artifacts plus summary.json into out_dir.
// Diagnostics go to the log stream; the return value is one of the exit codes above.
int run(const RunManifest &manifest);

}  // namespace hybridscat::harness
