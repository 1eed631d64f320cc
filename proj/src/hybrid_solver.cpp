#include "hybridscat/hybrid_solver.hpp"

#include <chrono>
#include <stdexcept>

namespace hybridscat
{

namespace
{
double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace

HybridOperator::HybridOperator(const vol::VolumetricSolver &volumetric, const bq::MomentTable &moments)
    : vol_(&volumetric), moments_(&moments)
{
  if (moments.density_size() != static_cast<int>(volumetric.trace_nodes().size()))
  {
    throw std::invalid_argument("HybridOperator: moment table does not match the boundary patches");
  }
  // The phi nodes are an ordered subset of the patch nodes.
  const auto &phi = volumetric.phi_nodes();
  const double tol = 1e-12 * volumetric.config().half_width;
  std::size_t m = 0;
  const auto &patches = moments.patches();
  for (std::size_t p = 0; p < patches.size() && m < phi.size(); ++p)
  {
    for (int j = 0; j <= patches[p].order && m < phi.size(); ++j)
    {
      if (distance(patches[p].node(j), phi[m].x) <= tol)
      {
        phi_trace_.push_back(moments.offset(static_cast<int>(p)) + j);
        ++m;
      }
    }
  }
  if (m != phi.size() || moments.targets().size() != phi.size())
  {
    throw std::invalid_argument("HybridOperator: impedance nodes do not match the boundary patches");
  }
}

vol::BoundaryTraces HybridOperator::traces(const VectorXc &phi) const
{
  return vol_->boundary_traces(vol_->interface_solve(phi));
}

VectorXc HybridOperator::apply(const VectorXc &phi) const
{
  if (phi.size() != size())
  {
    throw std::invalid_argument("HybridOperator: wrong input size");
  }
  ++applications_;
  const auto tr = traces(phi);
  VectorXc out = -moments_->integrate_traces(tr.u, tr.dn);
  for (int k = 0; k < size(); ++k)
  {
    out[k] += 0.5 * tr.u[phi_trace_[k]];
  }
  return out;
}

SolveResult gmres_solve(const HybridOperator &op, const VectorXc &rhs, const VectorXc &initial, double tol,
                        int max_iter)
{
  const auto t0 = std::chrono::steady_clock::now();
  const auto g = gmres([&](const VectorXc &x) { return op.apply(x); }, rhs, initial, tol, max_iter);
  SolveResult r;
  r.converged = g.converged;
  r.iterations = g.iterations;
  r.matvecs = g.matvecs;
  r.residuals = g.residuals;
  r.phi = g.solution;
  r.solve_seconds = seconds_since(t0);
  r.seconds_per_iteration = g.matvecs > 0 ? r.solve_seconds / g.matvecs : 0.0;
  return r;
}

// ---------------------------------------------------------------------------------------------

bq::QuadratureOptions quadrature_options(const ProblemConfig &config)
{
  bq::QuadratureOptions o;
  o.kappa = config.kappa;
  o.graded_order = config.cov_order;
  o.near_threshold = config.near_threshold;
  o.far_oversample = config.far_oversample;
  return o;
}

HybridSolver::HybridSolver(const ProblemConfig &config, const RefractivityModel &model,
                           const std::optional<std::filesystem::path> &cache_dir)
    : config_(config), model_(model)
{
  const auto report = validate(config, model);
  if (!report.ok())
  {
    throw std::invalid_argument("HybridSolver: invalid configuration: " + report.summary());
  }
  const auto t0 = std::chrono::steady_clock::now();
  if (model.is_vacuum())
  {
    index_ = [](Point2) { return 1.0; };
  }
  else if (config.fourier_smoothing)
  {
    const auto coeffs = fourier::cached_fourier_coeffs(model, config.half_width, config.F, cache_dir);
    contrast_ = std::make_shared<const fourier::SmoothedContrast>(coeffs, config.pad_factor,
                                                                  config.interp_degree);
    ++counters_.fourier_builds;
    index_ = [c = contrast_](Point2 x) { return 1.0 - (*c)(x); };
  }
  else
  {
    index_ = [m = model](Point2 x) { return m.n_squared(x); };
  }

  vol_ = std::make_unique<vol::VolumetricSolver>(config, index_);
  ++counters_.volumetric_builds;

  auto patches = bq::square_boundary_patches(config.half_width, config.patches_per_side(), config.n1, config.n2);
  std::vector<Point2> targets;
  targets.reserve(vol_->phi_nodes().size());
  for (const auto &n : vol_->phi_nodes())
  {
    targets.push_back(n.x);
  }
  moments_ = std::make_unique<bq::MomentTable>(std::move(targets), std::move(patches), quadrature_options(config));
  ++counters_.moment_builds;
  op_ = std::make_unique<HybridOperator>(*vol_, *moments_);
  precompute_seconds_ = seconds_since(t0);
}

VectorXc HybridSolver::incident_values(const special::Incidence &inc) const
{
  const auto &nodes = vol_->phi_nodes();
  VectorXc v(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k)
  {
    v[k] = inc.value(config_.kappa, nodes[k].x);
  }
  return v;
}

VectorXc HybridSolver::incident_impedance(const special::Incidence &inc) const
{
  const auto &nodes = vol_->phi_nodes();
  VectorXc v(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k)
  {
    const auto [gx, gy] = inc.gradient(config_.kappa, nodes[k].x);
    const cplx dn = gx * nodes[k].normal.x + gy * nodes[k].normal.y;
    v[k] = config_.alpha * inc.value(config_.kappa, nodes[k].x) + I * config_.kappa * config_.beta * dn;
  }
  return v;
}

SolveResult HybridSolver::solve(const special::Incidence &inc) const
{
  SolveResult r = gmres_solve(*op_, incident_values(inc), incident_impedance(inc), config_.gmres_tol,
                              config_.gmres_max_iter);
  r.precompute_seconds = precompute_seconds_;
  return r;
}

VectorXc HybridSolver::interior_field(const VectorXc &phi) const
{
  return vol_->solve_bvp(phi);
}

std::vector<Point2> HybridSolver::interior_nodes() const
{
  const auto &m = vol_->mesh();
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(m.global_nx()) * m.global_ny());
  for (int gj = 0; gj < m.global_ny(); ++gj)
  {
    for (int gi = 0; gi < m.global_nx(); ++gi)
    {
      out.push_back(m.global_node(gi, gj));
    }
  }
  return out;
}

VectorXc HybridSolver::scattered_field(const VectorXc &phi, const std::vector<Point2> &points) const
{
  const double a = config_.half_width;
  for (const auto &x : points)
  {
    if (std::abs(x.x) <= a && std::abs(x.y) <= a)
    {
      throw std::invalid_argument("scattered_field: point inside the computational square");
    }
  }
  if (points.empty())
  {
    return {};
  }
  const bq::MomentTable table(points, moments_->patches(), moments_->options());
  const auto tr = op_->traces(phi);
  return table.integrate_traces(tr.u, tr.dn);
}

VectorXc HybridSolver::exterior_field(const VectorXc &phi, const std::vector<Point2> &points,
                                      const special::Incidence &inc) const
{
  VectorXc u = scattered_field(phi, points);
  for (std::size_t k = 0; k < points.size(); ++k)
  {
    u[k] += inc.value(config_.kappa, points[k]);
  }
  return u;
}

VectorXc HybridSolver::field_at(const VectorXc &phi, const std::vector<Point2> &points,
                                const special::Incidence &inc) const
{
  const double a = config_.half_width;
  std::vector<Point2> inside, outside;
  std::vector<std::size_t> in_idx, out_idx;
  for (std::size_t k = 0; k < points.size(); ++k)
  {
    if (std::abs(points[k].x) <= a && std::abs(points[k].y) <= a)
    {
      inside.push_back(points[k]);
      in_idx.push_back(k);
    }
    else
    {
      outside.push_back(points[k]);
      out_idx.push_back(k);
    }
  }
  VectorXc out(points.size());
  if (!inside.empty())
  {
    const VectorXc v = vol::interpolate_field(vol_->mesh(), interior_field(phi), inside);
    for (std::size_t k = 0; k < in_idx.size(); ++k)
    {
      out[in_idx[k]] = v[k];
    }
  }
  if (!outside.empty())
  {
    const VectorXc v = exterior_field(phi, outside, inc);
    for (std::size_t k = 0; k < out_idx.size(); ++k)
    {
      out[out_idx[k]] = v[k];
    }
  }
  return out;
}

double epsilon_inf(const VectorXc &exact, const VectorXc &approx)
{
  if (exact.size() != approx.size())
  {
    throw std::invalid_argument("epsilon_inf: samplings differ in length");
  }
  const double scale = exact.size() ? exact.cwiseAbs().maxCoeff() : 0.0;
  if (scale == 0.0)
  {
    throw std::invalid_argument("epsilon_inf: exact field is identically zero");
  }
  return (exact - approx).cwiseAbs().maxCoeff() / scale;
}

}  // namespace hybridscat
