#include "hybridscat/boundary_quadrature.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "hybridscat/special_functions.hpp"

namespace hybridscat::bq
{

double BoundaryPatch::node_parameter(int j, int order)
{
  // Exact endpoints and midpoint, symmetric otherwise.
  if (2 * j == order)
  {
    return 0.0;
  }
  return -std::cos(pi * j / order);
}

double BoundaryPatch::project(Point2 x) const
{
  const Point2 d = end - start;
  const double len2 = dot(d, d);
  const double s = dot(x - start, d) / len2;  // in [0, 1] on the segment
  return std::clamp(2.0 * s - 1.0, -1.0, 1.0);
}

std::vector<BoundaryPatch> square_boundary_patches(double a, int per_side, int n1, int n2)
{
  if (per_side < 1 || n1 < 1 || n2 < 1 || !(a > 0.0))
  {
    throw std::invalid_argument("square_boundary_patches: bad layout");
  }
  const double w = 2.0 * a / per_side;
  // Coordinate of the k-th breakpoint, exact at both ends.
  auto at = [&](int k) { return k == per_side ? a : -a + k * w; };
  std::vector<BoundaryPatch> out;
  out.reserve(4 * per_side);
  for (int k = 0; k < per_side; ++k)
  {
    out.push_back({{at(k), -a}, {at(k + 1), -a}, {0.0, -1.0}, n1});
  }
  for (int k = 0; k < per_side; ++k)
  {
    out.push_back({{a, at(k)}, {a, at(k + 1)}, {1.0, 0.0}, n2});
  }
  for (int k = per_side; k > 0; --k)
  {
    out.push_back({{at(k), a}, {at(k - 1), a}, {0.0, 1.0}, n1});
  }
  for (int k = per_side; k > 0; --k)
  {
    out.push_back({{-a, at(k)}, {-a, at(k - 1)}, {-1.0, 0.0}, n2});
  }
  return out;
}

std::vector<TargetNode> square_collocation_nodes(const std::vector<BoundaryPatch> &patches)
{
  const int per_side = static_cast<int>(patches.size()) / 4;
  std::vector<TargetNode> out;
  for (std::size_t p = 0; p < patches.size(); ++p)
  {
    const auto &patch = patches[p];
    const int first = (p % per_side == 0) ? 1 : 0;  // the side's first node is a corner
    for (int j = first; j < patch.order; ++j)
    {
      out.push_back({patch.node(j), patch.normal});
    }
  }
  return out;
}

Regime classify(Point2 x, const BoundaryPatch &patch, double near_threshold)
{
  const double d = patch.distance_to(x);
  const double len = patch.length();
  if (d <= 1e-13 * len)
  {
    return Regime::singular;
  }
  return d < near_threshold * len ? Regime::near : Regime::far;
}

// ---------------------------------------------------------------------------------------------

GradedChangeOfVariable::GradedChangeOfVariable(int k) : k_(k)
{
  if (k < 2)
  {
    throw std::invalid_argument("GradedChangeOfVariable: order must be at least 2");
  }
}

double GradedChangeOfVariable::v(double s) const
{
  const double k = k_;
  const double r = (pi - s) / pi;
  return (1.0 / k - 0.5) * r * r * r + (1.0 / k) * (s - pi) / pi + 0.5;
}

double GradedChangeOfVariable::dv(double s) const
{
  const double k = k_;
  const double r = (pi - s) / pi;
  return -3.0 * (1.0 / k - 0.5) * r * r / pi + 1.0 / (k * pi);
}

double GradedChangeOfVariable::omega(double s) const
{
  const double a = std::pow(v(s), k_);
  const double b = std::pow(v(2.0 * pi - s), k_);
  return 2.0 * pi * a / (a + b);
}

double GradedChangeOfVariable::domega(double s) const
{
  const double p = v(s), q = v(2.0 * pi - s);
  const double dp = dv(s), dq = -dv(2.0 * pi - s);
  const double pk = std::pow(p, k_), qk = std::pow(q, k_);
  const double pk1 = std::pow(p, k_ - 1), qk1 = std::pow(q, k_ - 1);
  const double den = pk + qk;
  return 2.0 * pi * k_ * (pk1 * dp * qk - pk * qk1 * dq) / (den * den);
}

// ---------------------------------------------------------------------------------------------

namespace
{

// Adds weight * K(x, xi(tau)) T_l(tau) for l = 0..n into the row.
struct Accumulator
{
  Point2 x;
  const BoundaryPatch &patch;
  special::GreensKernel kernel;
  std::vector<cplx> i1, i2;

  Accumulator(Point2 x_, const BoundaryPatch &p, double kappa)
      : x(x_), patch(p), kernel(kappa), i1(p.order + 1, 0.0), i2(p.order + 1, 0.0)
  {
  }

  void add(double tau, double weight)
  {
    const Point2 y = patch.point(tau);
    if (weight == 0.0 || y == x)
    {
      return;
    }
    const auto k = kernel.pair(x, y, patch.normal);
    const cplx a = weight * k.dg_dnu, b = weight * k.g;
    double t0 = 1.0, t1 = tau;
    i1[0] += a;
    i2[0] += b;
    for (int l = 1; l <= patch.order; ++l)
    {
      i1[l] += a * t1;
      i2[l] += b * t1;
      const double t2 = 2.0 * tau * t1 - t0;
      t0 = t1;
      t1 = t2;
    }
  }
};

const cheb::ClenshawCurtisRule &cached_rule(int m)
{
  thread_local std::map<int, cheb::ClenshawCurtisRule> rules;
  auto it = rules.find(m);
  if (it == rules.end())
  {
    it = rules.emplace(m, cheb::clenshaw_curtis(m)).first;
  }
  return it->second;
}

MomentRow graded_rule(Point2 x, const BoundaryPatch &patch, double t0, int m, double kappa,
                      const GradedChangeOfVariable &cov)
{
  const auto &rule = cached_rule(m);
  const double jac = patch.jacobian();
  Accumulator acc(x, patch, kappa);
  for (int j = 0; j <= m; ++j)
  {
    const double t = rule.nodes[j];
    const double w = rule.weights[j] * jac;
    if (t0 > -1.0)
    {
      // tau = t0 - ((1 + t0)/pi) omega(pi (1 - t)/2) covers [-1, t0].
      const double s = 0.5 * pi * (1.0 - t);
      const double tau = t0 - (1.0 + t0) / pi * cov.omega(s);
      acc.add(tau, w * 0.5 * (1.0 + t0) * cov.domega(s));
    }
    if (t0 < 1.0)
    {
      // tau = t0 + ((1 - t0)/pi) omega(pi (t + 1)/2) covers [t0, 1].
      const double s = 0.5 * pi * (t + 1.0);
      const double tau = t0 + (1.0 - t0) / pi * cov.omega(s);
      acc.add(tau, w * 0.5 * (1.0 - t0) * cov.domega(s));
    }
  }
  MomentRow row;
  row.rule_order = m;
  row.i1 = std::move(acc.i1);
  row.i2 = std::move(acc.i2);
  return row;
}

double max_change(const MomentRow &a, const MomentRow &b, double &scale)
{
  double change = 0.0;
  scale = 0.0;
  for (std::size_t l = 0; l < a.i1.size(); ++l)
  {
    change = std::max({change, std::abs(a.i1[l] - b.i1[l]), std::abs(a.i2[l] - b.i2[l])});
    scale = std::max({scale, std::abs(b.i1[l]), std::abs(b.i2[l])});
  }
  return change;
}

}  // namespace

MomentRow split_moments(Point2 x, const BoundaryPatch &patch, double t0, const QuadratureOptions &opt)
{
  if (!(t0 >= -1.0 && t0 <= 1.0))
  {
    throw std::invalid_argument("split_moments: split point outside [-1, 1]");
  }
  const GradedChangeOfVariable cov(opt.graded_order);
  int m = std::max(4 * patch.order, 8);
  MomentRow prev = graded_rule(x, patch, t0, m, opt.kappa, cov);
  while (2 * m <= opt.graded_cap)
  {
    m *= 2;
    MomentRow next = graded_rule(x, patch, t0, m, opt.kappa, cov);
    double scale = 0.0;
    const double change = max_change(prev, next, scale);
    if (change <= opt.graded_tol * std::max(scale, 1e-300))
    {
      return next;
    }
    prev = std::move(next);
  }
  throw std::runtime_error("split_moments: graded rule did not settle within the oversampling cap");
}

MomentRow singular_moments(Point2 x, const BoundaryPatch &patch, double t0, const QuadratureOptions &opt)
{
  MomentRow row = split_moments(x, patch, t0, opt);
  row.regime = Regime::singular;
  return row;
}

MomentRow near_moments(Point2 x, const BoundaryPatch &patch, const QuadratureOptions &opt)
{
  MomentRow row = split_moments(x, patch, patch.project(x), opt);
  row.regime = Regime::near;
  return row;
}

MomentRow far_moments(Point2 x, const BoundaryPatch &patch, int rule_order, double kappa)
{
  const auto &rule = cached_rule(rule_order);
  const double jac = patch.jacobian();
  Accumulator acc(x, patch, kappa);
  for (int j = 0; j <= rule_order; ++j)
  {
    acc.add(rule.nodes[j], rule.weights[j] * jac);
  }
  MomentRow row;
  row.regime = Regime::far;
  row.rule_order = rule_order;
  row.i1 = std::move(acc.i1);
  row.i2 = std::move(acc.i2);
  return row;
}

MomentRow moments(Point2 x, const BoundaryPatch &patch, const QuadratureOptions &opt)
{
  switch (classify(x, patch, opt.near_threshold))
  {
  case Regime::singular:
    return singular_moments(x, patch, patch.project(x), opt);
  case Regime::near:
    return near_moments(x, patch, opt);
  case Regime::far:
    break;
  }
  return far_moments(x, patch, std::max(opt.far_oversample * patch.order, 2), opt.kappa);
}

// ---------------------------------------------------------------------------------------------

MomentTable::MomentTable(std::vector<Point2> targets, std::vector<BoundaryPatch> patches,
                         const QuadratureOptions &opt)
    : targets_(std::move(targets)), patches_(std::move(patches)), opt_(opt)
{
  const auto t_start = std::chrono::steady_clock::now();
  offsets_.reserve(patches_.size());
  for (const auto &p : patches_)
  {
    offsets_.push_back(density_size_);
    density_size_ += p.order + 1;
    if (!transforms_.contains(p.order))
    {
      transforms_.emplace(p.order, cheb::Transform(p.order));
    }
  }
  const auto nt = static_cast<Eigen::Index>(targets_.size());
  i1_.resize(nt, density_size_);
  i2_.resize(nt, density_size_);
  regimes_.resize(targets_.size() * patches_.size());
  for (Eigen::Index t = 0; t < nt; ++t)
  {
    for (std::size_t p = 0; p < patches_.size(); ++p)
    {
      const MomentRow row = moments(targets_[t], patches_[p], opt_);
      regimes_[t * patches_.size() + p] = row.regime;
      switch (row.regime)
      {
      case Regime::far:
        ++stats_.far;
        break;
      case Regime::near:
        ++stats_.near;
        stats_.max_rule_order = std::max(stats_.max_rule_order, row.rule_order);
        break;
      case Regime::singular:
        ++stats_.singular;
        stats_.max_rule_order = std::max(stats_.max_rule_order, row.rule_order);
        break;
      }
      for (std::size_t l = 0; l < row.i1.size(); ++l)
      {
        i1_(t, offsets_[p] + l) = row.i1[l];
        i2_(t, offsets_[p] + l) = row.i2[l];
      }
    }
  }
  stats_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
}

VectorXc MomentTable::coefficients(const VectorXc &density) const
{
  if (density.size() != density_size_)
  {
    throw std::invalid_argument("MomentTable: density has the wrong number of nodes");
  }
  VectorXc out(density_size_);
  std::vector<cplx> values, coeffs;
  for (std::size_t p = 0; p < patches_.size(); ++p)
  {
    const int n = patches_[p].order;
    values.resize(n + 1);
    coeffs.resize(n + 1);
    // Patch nodes run t = -1 .. 1; the transform expects cosine order (t = 1 first).
    for (int l = 0; l <= n; ++l)
    {
      values[l] = density[offsets_[p] + n - l];
    }
    transforms_.at(n).coeffs(values, coeffs);
    for (int l = 0; l <= n; ++l)
    {
      out[offsets_[p] + l] = coeffs[l];
    }
  }
  return out;
}

VectorXc MomentTable::integrate_traces(const VectorXc &u, const VectorXc &dn) const
{
  return i1_ * coefficients(u) - i2_ * coefficients(dn);
}

VectorXc apply_boundary_operator(const MomentTable &table, const VectorXc &eta, const VectorXc &zeta,
                                 double alpha, double beta)
{
  const double kappa = table.options().kappa;
  return table.double_layer() * table.coefficients(eta) / (2.0 * alpha) -
         table.single_layer() * table.coefficients(zeta) / (2.0 * I * kappa * beta);
}

GreenIdentityResult green_identity_test(double a, int per_side, int order, const QuadratureOptions &opt)
{
  auto patches = square_boundary_patches(a, per_side, order, order);
  const auto nodes = square_collocation_nodes(patches);
  std::vector<Point2> targets;
  for (const auto &n : nodes)
  {
    targets.push_back(n.x);
  }
  const double kappa = opt.kappa;
  auto wave = [&](Point2 x) { return std::exp(I * kappa * x.x); };
  const MomentTable table(targets, patches, opt);
  VectorXc u(table.density_size()), dn(table.density_size());
  for (std::size_t p = 0; p < patches.size(); ++p)
  {
    for (int j = 0; j <= patches[p].order; ++j)
    {
      const Point2 y = patches[p].node(j);
      u[table.offset(p) + j] = wave(y);
      dn[table.offset(p) + j] = I * kappa * patches[p].normal.x * wave(y);
    }
  }
  const VectorXc rep = -2.0 * table.integrate_traces(u, dn);
  GreenIdentityResult res;
  double scale = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t)
  {
    res.max_error = std::max(res.max_error, std::abs(rep[t] - wave(targets[t])));
    scale = std::max(scale, std::abs(wave(targets[t])));
  }
  res.max_error /= scale;
  res.targets = static_cast<int>(targets.size());
  res.patches = static_cast<int>(patches.size());
  res.stats = table.stats();
  return res;
}

}  // namespace hybridscat::bq
