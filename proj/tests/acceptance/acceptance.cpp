// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [A1 A2 ...] [--strict]
//
// Without arguments every criterion runs. The exit status is nonzero when a criterion throws,
// or with --strict when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hybridscat/boundary_quadrature.hpp"
#include "hybridscat/harness.hpp"
#include "hybridscat/hybrid_solver.hpp"

using namespace hybridscat;

namespace
{

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string sci(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string fixed(double x, int digits = 2)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

VectorXc random_vector(int n, unsigned seed)
{
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  VectorXc v(n);
  for (int k = 0; k < n; ++k)
  {
    v[k] = {nd(rng), nd(rng)};
  }
  return v;
}

double relative_gap(const VectorXc &a, const VectorXc &b)
{
  const double scale = b.cwiseAbs().maxCoeff();
  return (a - b).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
}

// Ladder problems share the memory-lean setting: subdomain factors are rebuilt on demand.
ProblemConfig ladder_base(double kappa, double a, int K, int L, int n, int F)
{
  ProblemConfig c;
  c.kappa = kappa;
  c.half_width = a;
  c.K = K;
  c.L = L;
  c.n1 = c.n2 = n;
  c.F = F;
  c.retain_factorizations = false;
  return c;
}

std::string ladder_errors(const harness::LadderResult &lad)
{
  std::ostringstream ss;
  for (const auto &r : lad.rows)
  {
    if (!std::isnan(r.error))
    {
      ss << r.config.patches_per_side() << ':' << sci(r.error) << ' ';
    }
  }
  return ss.str();
}

// Green identity, square of half-width 1.5, kappa = 5 pi, 2 patches per side.
Outcome a1()
{
  bq::QuadratureOptions opt;
  opt.kappa = 5.0 * pi;
  const std::vector<int> orders{12, 24, 48, 96};
  std::vector<double> e;
  std::ostringstream ss;
  for (int n : orders)
  {
    e.push_back(bq::green_identity_test(1.5, 2, n, opt).max_error);
    ss << "N=" << n << ':' << sci(e.back()) << ' ';
  }
  // Monotone decay; once both errors sit at the double-precision floor they may tie.
  const double floor = 1e-12;
  bool monotone = true;
  for (std::size_t k = 1; k < e.size(); ++k)
  {
    monotone = monotone && (e[k] < e[k - 1] || (e[k] <= floor && e[k - 1] <= floor));
  }
  const bool pass = e[2] <= 1e-6 && e[3] <= 1e-9 && monotone;
  ss << (monotone ? "monotone" : "not monotone") << "; need N=48<=1e-6, N=96<=1e-9";
  return {pass, ss.str()};
}

// Green identity at 6 points per wavelength, N = 30 per patch.
Outcome a2()
{
  std::vector<double> e;
  std::ostringstream ss;
  for (int m : {10, 20, 40, 80})
  {
    bq::QuadratureOptions opt;
    opt.kappa = m * pi;
    const int per_side = harness::dispersion_patches_per_side(opt.kappa, 1.5, 30, 6.0);
    e.push_back(bq::green_identity_test(1.5, per_side, 30, opt).max_error);
    ss << m << "pi:" << sci(e.back()) << ' ';
  }
  const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
  const bool band = *lo >= 1e-5 && *hi <= 1e-4;
  const double spread = *hi / *lo;
  ss << "spread " << fixed(spread) << "x; need [1e-5,1e-4], spread<3";
  return {band && spread < 3.0, ss.str()};
}

// Disc ladder 16x16 -> 64x64 against the Mie series, F = 1.5 x patches per side.
struct DiscLadder
{
  harness::LadderResult lad;
  bool done = false;
};

DiscLadder &disc_ladder()
{
  static DiscLadder d;
  if (!d.done)
  {
    RunConfig rc;
    rc.problem = ladder_base(5.0, 1.5, 4, 4, 11, 24);
    rc.model = RefractivityModel::constant_disc({0.0, 0.0}, 1.0, 2.0);
    rc.incidence = special::Incidence::radial();
    rc.ladder.levels = 3;
    rc.ladder.reference = LadderReference::mie;
    rc.ladder.compare_without_smoothing = true;
    rc.ladder.min_order = 1.7;
    d.lad = harness::run_ladder(rc);
    d.done = true;
  }
  return d;
}

Outcome a3()
{
  const auto &lad = disc_ladder().lad;
  const double e64 = lad.rows.back().error;
  const double ref = 4.46e-5;
  const bool near_ref = e64 <= 3.0 * ref && e64 >= ref / 3.0;
  const bool pass = lad.observed_order >= 1.7 && near_ref;
  return {pass, ladder_errors(lad) + "order " + fixed(lad.observed_order) + "; need order>=1.7, e(64) within 3x of " +
                    sci(ref)};
}

Outcome a4()
{
  const auto &lad = disc_ladder().lad;
  bool pass = true;
  std::ostringstream ss;
  for (std::size_t l = lad.rows.size() - 2; l < lad.rows.size(); ++l)
  {
    const auto &r = lad.rows[l];
    const double ratio = *r.error_without / r.error;
    pass = pass && r.error <= *r.error_without / 5.0;
    ss << r.config.patches_per_side() << ": on " << sci(r.error) << " off " << sci(*r.error_without) << " ("
       << fixed(ratio, 1) << "x) ";
  }
  ss << "; need off/on>=5";
  return {pass, ss.str()};
}

// Self-convergence ladder: levels 8 -> 64 patches per side, finest as reference.
Outcome self_ladder(const RefractivityModel &model, double kappa, int n, double min_order,
                    std::optional<double> final_max)
{
  RunConfig rc;
  rc.problem = ladder_base(kappa, 1.5, 2, 4, n, 12);
  rc.model = model;
  rc.incidence = special::Incidence::plane(0.0);
  rc.ladder.levels = 4;
  rc.ladder.reference = LadderReference::self;
  rc.ladder.min_order = min_order;
  const auto lad = harness::run_ladder(rc);
  const double final_error = lad.rows[lad.rows.size() - 2].error;
  bool pass = lad.observed_order >= min_order;
  std::string need = "need order>=" + fixed(min_order, 1);
  if (final_max)
  {
    pass = pass && final_error <= *final_max;
    need += ", final<=" + sci(*final_max);
  }
  return {pass, ladder_errors(lad) + "order " + fixed(lad.observed_order) + "; " + need};
}

Outcome a5()
{
  return self_ladder(RefractivityModel::gaussian_disc({0.0, 0.0}, 1.0), 2.0 * pi, 11, 1.7, 1e-4);
}

Outcome a6()
{
  return self_ladder(RefractivityModel::square({0.0, 0.0}, 1.0, 2.0), 6.0 * pi, 12, 2.0, std::nullopt);
}

// Disc of diameter 1, n^2 = 4, kappa = 100 in a=0.6 with 44 patches per side (about 12 PPW).
// The GMRES tolerance sits just below the discretization error instead of at 1e-8.
Outcome a7()
{
  ProblemConfig c = ladder_base(100.0, 0.6, 11, 4, 11, 132);
  c.gmres_tol = 1e-4;
  const auto model = RefractivityModel::constant_disc({0.0, 0.0}, 0.5, 4.0);
  const HybridSolver s(c, model);
  const auto inc = special::Incidence::radial();
  const auto r = s.solve(inc);
  const special::MieReference mie({0.0, 0.0}, 0.5, 2.0, c.kappa);
  const auto nodes = s.interior_nodes();
  VectorXc ex(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k)
  {
    ex[k] = mie.total_field(nodes[k], inc);
  }
  const double err = epsilon_inf(ex, s.interior_field(r.phi));
  const auto report = validate(c, model);
  const bool pass = r.converged && err <= 1e-2 && r.matvecs <= 80;
  return {pass, "eps=" + sci(err) + " numIt=" + std::to_string(r.matvecs) + " ppw=" +
                    fixed(report.points_per_wavelength, 1) + " pre=" + fixed(r.precompute_seconds, 1) +
                    "s per-it=" + fixed(r.seconds_per_iteration, 3) + "s; need eps<=1e-2, numIt<=80"};
}

Outcome a8()
{
  std::ostringstream ss;
  bool pass = true;
  auto note = [&](const std::string &name, bool ok, const std::string &value)
  {
    pass = pass && ok;
    ss << name << (ok ? " ok " : " FAILED ") << value << "; ";
  };

  ProblemConfig c;
  c.kappa = 2.0 * pi;
  c.half_width = 1.5;
  c.K = 2;
  c.L = 2;
  c.n1 = c.n2 = 16;
  c.F = 12;

  // Vacuum: the total field equals the incident field.
  {
    const HybridSolver s(c, RefractivityModel::vacuum());
    const auto inc = special::Incidence::plane(0.4);
    const auto r = s.solve(inc);
    const auto nodes = s.interior_nodes();
    VectorXc ex(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k)
    {
      ex[k] = inc.value(c.kappa, nodes[k]);
    }
    const double err = epsilon_inf(ex, s.interior_field(r.phi));
    note("vacuum", err <= 1e-7, sci(err));
  }

  // Linearity of every linear map of the pipeline.
  {
    ProblemConfig g = c;
    g.n1 = g.n2 = 11;
    const HybridSolver s(g, RefractivityModel::gaussian_disc({0.0, 0.0}, 1.0));
    const auto &vs = s.volumetric();
    const int n = s.op().size();
    const VectorXc x = random_vector(n, 11), y = random_vector(n, 12);
    const cplx a(0.7, -0.4);
    double worst = 0.0;
    worst = std::max(worst, relative_gap(s.op().apply(a * x + y), a * s.op().apply(x) + s.op().apply(y)));
    worst = std::max(worst, relative_gap(vs.interface_solve(a * x + y), a * vs.interface_solve(x) + vs.interface_solve(y)));
    worst = std::max(worst, relative_gap(vs.solve_bvp(a * x + y), a * vs.solve_bvp(x) + vs.solve_bvp(y)));
    worst = std::max(worst, relative_gap(vs.apply_iti(a * x + y), a * vs.apply_iti(x) + vs.apply_iti(y)));
    const auto &mt = s.moments();
    const VectorXc u = random_vector(mt.density_size(), 13), v = random_vector(mt.density_size(), 14);
    worst = std::max(worst, relative_gap(mt.integrate_traces(a * u + v, v), a * mt.integrate_traces(u, 0.0 * v) +
                                                                               mt.integrate_traces(v, v)));
    worst = std::max(worst, relative_gap(mt.coefficients(a * u + v), a * mt.coefficients(u) + mt.coefficients(v)));
    const std::vector<Point2> out{{2.0, 0.3}, {-1.0, 4.0}};
    worst = std::max(worst, relative_gap(s.scattered_field(a * x + y, out),
                                         a * s.scattered_field(x, out) + s.scattered_field(y, out)));
    note("linearity", worst <= 1e-10, sci(worst));
  }

  // Impedance-to-impedance map on a plane wave.
  {
    const vol::VolumetricSolver vs(c, [](Point2) { return 1.0; });
    const Point2 d{0.6, 0.8};
    auto u = [&](Point2 x) { return std::exp(I * c.kappa * dot(d, x)); };
    VectorXc phi(vs.phi_size()), ref(vs.phi_size());
    for (int k = 0; k < vs.phi_size(); ++k)
    {
      const auto &nd = vs.phi_nodes()[k];
      const cplx dn = I * c.kappa * dot(d, nd.normal) * u(nd.x);
      phi[k] = c.alpha * u(nd.x) + I * c.kappa * c.beta * dn;
      ref[k] = c.alpha * u(nd.x) - I * c.kappa * c.beta * dn;
    }
    const double err = (vs.apply_iti(phi) - ref).cwiseAbs().maxCoeff();
    note("ItI", err <= 1e-6, sci(err));
  }

  // omega_k: derivatives 1..k-1 vanish at 0, so the j-th forward difference quotient scales like h^(k-j).
  {
    bool ok = true;
    double worst = 0.0;
    for (int k : {2, 4, 6, 8})
    {
      const bq::GradedChangeOfVariable w(k);
      auto difference = [&](int j, double h)
      {
        double sum = 0.0, binom = 1.0;
        for (int i = 0; i <= j; ++i)
        {
          sum += ((j - i) % 2 == 0 ? 1.0 : -1.0) * binom * w.omega(i * h);
          binom = binom * (j - i) / (i + 1);
        }
        return sum / std::pow(h, j);
      };
      for (int j = 1; j < k; ++j)
      {
        const double rate = std::log2(difference(j, 2e-3) / difference(j, 1e-3));
        worst = std::max(worst, std::abs(rate - (k - j)) / (k - j));
      }
      ok = ok && w.domega(0.0) == 0.0;
    }
    note("omega order", ok && worst <= 0.05, "max rel. rate deviation " + sci(worst));
  }

  // Moment tables do not depend on the density: rebuilds and repeated applications are bitwise equal.
  {
    bq::QuadratureOptions opt;
    opt.kappa = c.kappa;
    const auto patches = bq::square_boundary_patches(1.5, 4, 16, 16);
    std::vector<Point2> targets;
    for (const auto &t : bq::square_collocation_nodes(patches))
    {
      targets.push_back(t.x);
    }
    const bq::MomentTable t1(targets, patches, opt);
    const MatrixXc before = t1.double_layer();
    const VectorXc u = random_vector(t1.density_size(), 21), v = random_vector(t1.density_size(), 22);
    const VectorXc first = t1.integrate_traces(u, v);
    t1.integrate_traces(v, u);
    const bq::MomentTable t2(targets, patches, opt);
    const bool ok = (t1.double_layer().array() == before.array()).all() &&
                    (t1.double_layer().array() == t2.double_layer().array()).all() &&
                    (t1.single_layer().array() == t2.single_layer().array()).all() &&
                    (first.array() == t2.integrate_traces(u, v).array()).all();
    note("moment independence", ok, "bitwise");
  }

  // Radiation: |u^s| decays like r^(-1/2).
  {
    ProblemConfig g = c;
    g.kappa = 5.0;
    g.n1 = g.n2 = 11;
    const HybridSolver s(g, RefractivityModel::constant_disc({0.0, 0.0}, 1.0, 2.0));
    const auto r = s.solve(special::Incidence::radial());
    const VectorXc far = s.scattered_field(r.phi, {{40.0, 0.0}, {80.0, 0.0}, {0.0, 40.0}, {0.0, 80.0}});
    double worst = 0.0;
    for (int k : {0, 2})
    {
      const double ratio = std::abs(far[k + 1]) / std::abs(far[k]);
      worst = std::max(worst, std::abs(ratio / std::sqrt(0.5) - 1.0));
    }
    note("decay", worst <= 0.05, "max deviation " + fixed(100.0 * worst, 2) + "%");
  }
  return {pass, ss.str()};
}

}  // namespace

int main(int argc, char **argv)
{
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5}, {"A6", a6}, {"A7", a7}, {"A8", a8}};
  std::set<std::string> selected;
  bool strict = false;
  for (int i = 1; i < argc; ++i)
  {
    const std::string arg = argv[i];
    if (arg == "--strict")
    {
      strict = true;
    }
    else
    {
      selected.insert(arg);
    }
  }

  int failed = 0, errors = 0;
  for (const auto &[name, fn] : criteria)
  {
    if (!selected.empty() && !selected.count(name))
    {
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    try
    {
      const auto o = fn();
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::printf("%s %s  %s [%.0fs]\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
      failed += o.pass ? 0 : 1;
    }
    catch (const std::exception &e)
    {
      std::printf("%s FAIL  error: %s\n", name.c_str(), e.what());
      ++errors;
    }
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed + errors);
  return errors > 0 || (strict && failed > 0) ? 1 : 0;
}
