#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "hybridscat/boundary_quadrature.hpp"
#include "hybridscat/config.hpp"
#include "hybridscat/fourier_smoothing.hpp"
#include "hybridscat/gmres.hpp"
#include "hybridscat/special_functions.hpp"
#include "hybridscat/volumetric.hpp"

namespace hybridscat
{

//
// Left-hand side of the boundary equation on the impedance data phi:
// phi -> u/2 - int (dG/dnu u - G du/dnu), where u and du/dnu are the boundary traces of the
// interior impedance problem with data phi. Uses only precomputed factorizations and moments.
//
class HybridOperator
{
public:
  HybridOperator(const vol::VolumetricSolver &volumetric, const bq::MomentTable &moments);

  int size() const { return static_cast<int>(phi_trace_.size()); }
  VectorXc apply(const VectorXc &phi) const;
  VectorXc operator()(const VectorXc &phi) const { return apply(phi); }
  vol::BoundaryTraces traces(const VectorXc &phi) const;
  long applications() const { return applications_; }

private:
  const vol::VolumetricSolver *vol_;
  const bq::MomentTable *moments_;
  std::vector<int> phi_trace_;  // phi node -> boundary patch node
  mutable long applications_ = 0;
};

struct SolveResult
{
  bool converged = false;
  int iterations = 0;  // Arnoldi steps
  int matvecs = 0;     // operator applications (reported as numIt)
  std::vector<double> residuals;
  VectorXc phi;
  double precompute_seconds = 0.0;
  double solve_seconds = 0.0;
  double seconds_per_iteration = 0.0;
};

// Runs GMRES on the hybrid operator.
SolveResult gmres_solve(const HybridOperator &op, const VectorXc &rhs, const VectorXc &initial, double tol,
                        int max_iter);

struct HybridCounters
{
  int fourier_builds = 0;
  int volumetric_builds = 0;
  int moment_builds = 0;
};

//
// Precomputes the smoothed index, the volumetric factorizations and the boundary moments once;
// solve() may then be called for any number of incident fields.
//
class HybridSolver
{
public:
  HybridSolver(const ProblemConfig &config, const RefractivityModel &model,
               const std::optional<std::filesystem::path> &cache_dir = std::nullopt);

  const ProblemConfig &config() const { return config_; }
  const RefractivityModel &model() const { return model_; }
  const vol::VolumetricSolver &volumetric() const { return *vol_; }
  const bq::MomentTable &moments() const { return *moments_; }
  const HybridOperator &op() const { return *op_; }
  const HybridCounters &counters() const { return counters_; }
  double precompute_seconds() const { return precompute_seconds_; }
  // n^2 seen by the discretization (1 - m^F with smoothing).
  double effective_n_squared(Point2 x) const { return index_(x); }

  // u^i and the impedance trace of u^i at the phi nodes.
  VectorXc incident_values(const special::Incidence &inc) const;
  VectorXc incident_impedance(const special::Incidence &inc) const;

  SolveResult solve(const special::Incidence &inc) const;

  // Total field on the global node grid (index gj * global_nx + gi).
  VectorXc interior_field(const VectorXc &phi) const;
  std::vector<Point2> interior_nodes() const;
  // Scattered field at points outside the closed square; throws std::invalid_argument otherwise.
  VectorXc scattered_field(const VectorXc &phi, const std::vector<Point2> &points) const;
  VectorXc exterior_field(const VectorXc &phi, const std::vector<Point2> &points,
                          const special::Incidence &inc) const;
  // Total field anywhere: interpolated inside the closed square, represented outside.
  VectorXc field_at(const VectorXc &phi, const std::vector<Point2> &points, const special::Incidence &inc) const;

private:
  ProblemConfig config_;
  RefractivityModel model_;
  std::shared_ptr<const fourier::SmoothedContrast> contrast_;
  vol::IndexFunction index_;
  std::unique_ptr<vol::VolumetricSolver> vol_;
  std::unique_ptr<bq::MomentTable> moments_;
  std::unique_ptr<HybridOperator> op_;
  HybridCounters counters_;
  double precompute_seconds_ = 0.0;
};

bq::QuadratureOptions quadrature_options(const ProblemConfig &config);

// max |exact - approx| / max |exact|; throws when exact is identically zero or sizes differ.
double epsilon_inf(const VectorXc &exact, const VectorXc &approx);

}  // namespace hybridscat
