#include "hybridscat/harness.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace hybridscat::harness
{

namespace fs = std::filesystem;
using nlohmann::json;

Mode mode_from_string(const std::string &text)
{
  if (text == "solve")
  {
    return Mode::solve;
  }
  if (text == "convergence-ladder")
  {
    return Mode::convergence_ladder;
  }
  if (text == "quadrature-test")
  {
    return Mode::quadrature_test;
  }
  if (text == "dispersion-test")
  {
    return Mode::dispersion_test;
  }
  throw ConfigError("unknown mode '" + text + "'");
}

std::string to_string(Mode mode)
{
  switch (mode)
  {
  case Mode::solve:
    return "solve";
  case Mode::convergence_ladder:
    return "convergence-ladder";
  case Mode::quadrature_test:
    return "quadrature-test";
  case Mode::dispersion_test:
    return "dispersion-test";
  }
  return "unknown";
}

namespace
{

std::optional<special::MieReference> mie_for(const RunConfig &rc)
{
  if (rc.model.kind() != ScattererKind::constant_disc || rc.model.components().size() != 1)
  {
    return std::nullopt;
  }
  const auto &d = std::get<DiscComponent>(rc.model.components().front());
  return special::MieReference(d.center, d.radius, std::sqrt(d.n2), rc.problem.kappa);
}

VectorXc mie_field(const special::MieReference &mie, const std::vector<Point2> &points,
                   const special::Incidence &inc)
{
  VectorXc v(points.size());
  for (std::size_t k = 0; k < points.size(); ++k)
  {
    v[k] = mie.total_field(points[k], inc);
  }
  return v;
}

std::string fmt(double x)
{
  if (std::isnan(x))
  {
    return "";
  }
  std::ostringstream ss;
  ss << std::setprecision(6) << std::scientific << x;
  return ss.str();
}

std::string fmt(const std::optional<double> &x) { return x ? fmt(*x) : std::string(); }

std::ofstream open_output(const fs::path &path)
{
  std::ofstream out(path);
  if (!out)
  {
    throw std::runtime_error("cannot write " + path.string());
  }
  return out;
}

}  // namespace

SolveReport run_solve(const RunConfig &rc, const std::optional<fs::path> &cache_dir)
{
  const HybridSolver solver(rc.problem, rc.model, cache_dir);
  SolveReport rep;
  rep.result = solver.solve(rc.incidence);
  rep.points = rc.grid.points();
  if (!rep.points.empty())
  {
    rep.field = solver.field_at(rep.result.phi, rep.points, rc.incidence);
  }
  if (const auto mie = mie_for(rc))
  {
    const auto nodes = solver.interior_nodes();
    rep.mie_error = epsilon_inf(mie_field(*mie, nodes, rc.incidence), solver.interior_field(rep.result.phi));
  }
  return rep;
}

ProblemConfig ladder_level(const ProblemConfig &base, int level)
{
  ProblemConfig c = base;
  c.K = base.K << level;
  c.F = base.F << level;
  return c;
}

std::vector<Point2> ladder_samples(const RunConfig &rc)
{
  if (rc.grid.nx > 0 && rc.grid.ny > 0)
  {
    return rc.grid.points();
  }
  const double a = rc.problem.half_width;
  const int m = std::max(rc.ladder.sample_points, 2);
  return SamplingGrid{-a, a, -a, a, m, m}.points();
}

double least_squares_slope(const std::vector<double> &x, const std::vector<double> &y)
{
  if (x.size() != y.size() || x.size() < 2)
  {
    throw std::invalid_argument("least_squares_slope: need at least two matching samples");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k)
  {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

LadderResult run_ladder(const RunConfig &rc, const std::optional<fs::path> &cache_dir)
{
  const int levels = rc.ladder.levels;
  const bool use_mie = rc.ladder.reference == LadderReference::mie;
  const auto mie = mie_for(rc);
  if (use_mie && !mie)
  {
    throw ConfigError("a Mie-referenced ladder needs a single constant disc");
  }
  const auto samples = ladder_samples(rc);

  LadderResult out;
  std::vector<VectorXc> fields;
  for (int l = 0; l < levels; ++l)
  {
    LadderRow row;
    row.level = l;
    row.config = ladder_level(rc.problem, l);
    row.error = std::numeric_limits<double>::quiet_NaN();
    std::clog << "level " << l << ": K=" << row.config.K << " F=" << row.config.F << std::endl;
    {
      const HybridSolver solver(row.config, rc.model, cache_dir);
      const auto r = solver.solve(rc.incidence);
      if (!r.converged)
      {
        std::clog << "level " << l << ": GMRES stopped after " << r.matvecs << " applications" << std::endl;
      }
      row.matvecs = r.matvecs;
      row.converged = r.converged;
      row.precompute_seconds = r.precompute_seconds;
      row.seconds_per_iteration = r.seconds_per_iteration;
      if (use_mie)
      {
        const auto nodes = solver.interior_nodes();
        row.error = epsilon_inf(mie_field(*mie, nodes, rc.incidence), solver.interior_field(r.phi));
      }
      else
      {
        fields.push_back(solver.field_at(r.phi, samples, rc.incidence));
      }
    }
    if (use_mie && rc.ladder.compare_without_smoothing && !rc.model.is_vacuum())
    {
      ProblemConfig off = row.config;
      off.fourier_smoothing = false;
      const HybridSolver solver(off, rc.model, cache_dir);
      const auto r = solver.solve(rc.incidence);
      const auto nodes = solver.interior_nodes();
      row.error_without = epsilon_inf(mie_field(*mie, nodes, rc.incidence), solver.interior_field(r.phi));
    }
    out.rows.push_back(row);
  }

  if (!use_mie)
  {
    for (int l = 0; l + 1 < levels; ++l)
    {
      out.rows[l].error = epsilon_inf(fields.back(), fields[l]);
    }
  }
  // Per-level order against the previous level with an error, then the least-squares slope of
  // log2 e against log2 h (h halves per level).
  int last = -1;
  std::vector<double> xs, ys;
  for (int l = 0; l < levels; ++l)
  {
    if (std::isnan(out.rows[l].error))
    {
      continue;
    }
    if (last >= 0)
    {
      out.rows[l].order = std::log2(out.rows[last].error / out.rows[l].error) / (l - last);
    }
    xs.push_back(-l);
    ys.push_back(std::log2(out.rows[l].error));
    last = l;
  }
  if (xs.size() >= 2)
  {
    out.observed_order = least_squares_slope(xs, ys);
    out.order_ok = out.observed_order >= rc.ladder.min_order;
  }
  return out;
}

int dispersion_patches_per_side(double kappa, double half_width, int order, double points_per_wavelength)
{
  const double wavelengths = 2.0 * half_width * kappa / (2.0 * pi);
  return std::max(1, static_cast<int>(std::lround(points_per_wavelength * wavelengths / order)));
}

namespace
{

QuadratureRow green_row(double kappa, double a, int per_side, int order, const ProblemConfig &c)
{
  auto opt = quadrature_options(c);
  opt.kappa = kappa;
  const auto g = bq::green_identity_test(a, per_side, order, opt);
  QuadratureRow row;
  row.kappa = kappa;
  row.patches_per_side = per_side;
  row.order = order;
  row.points_per_wavelength = per_side * order / (2.0 * a * kappa / (2.0 * pi));
  row.error = g.max_error;
  row.far = g.stats.far;
  row.near = g.stats.near;
  row.singular = g.stats.singular;
  row.seconds = g.stats.seconds;
  return row;
}

}  // namespace

std::vector<QuadratureRow> run_quadrature_test(const RunConfig &rc)
{
  std::vector<QuadratureRow> rows;
  for (int n : rc.quadrature.orders)
  {
    rows.push_back(green_row(rc.problem.kappa, rc.problem.half_width, rc.quadrature.patches_per_side, n, rc.problem));
  }
  return rows;
}

std::vector<QuadratureRow> run_dispersion_test(const RunConfig &rc)
{
  auto kappas = rc.dispersion.kappas;
  if (kappas.empty())
  {
    kappas.push_back(rc.problem.kappa);
  }
  std::vector<QuadratureRow> rows;
  for (double k : kappas)
  {
    const int per_side = dispersion_patches_per_side(k, rc.problem.half_width, rc.dispersion.order,
                                                     rc.dispersion.points_per_wavelength);
    rows.push_back(green_row(k, rc.problem.half_width, per_side, rc.dispersion.order, rc.problem));
  }
  return rows;
}

void write_field_csv(const fs::path &path, const std::vector<Point2> &points, const VectorXc &field)
{
  auto out = open_output(path);
  out << "x,y,re_u,im_u,abs_u\n" << std::setprecision(12);
  for (std::size_t k = 0; k < points.size(); ++k)
  {
    out << points[k].x << ',' << points[k].y << ',' << field[k].real() << ',' << field[k].imag() << ','
        << std::abs(field[k]) << '\n';
  }
}

void write_ladder_csv(const fs::path &path, const LadderResult &ladder, const std::string &hash)
{
  auto out = open_output(path);
  out << "level,n1,n2,patches,kappa,F,rel_error_without_fs,rel_error,order,num_it,converged,"
         "precompute_s,per_iteration_s,config_hash\n";
  for (const auto &r : ladder.rows)
  {
    const int p = r.config.patches_per_side();
    out << r.level << ',' << r.config.n1 << ',' << r.config.n2 << ',' << p << 'x' << p << ','
        << std::setprecision(12) << r.config.kappa << ',' << r.config.F << ',' << fmt(r.error_without) << ','
        << fmt(r.error) << ',' << fmt(r.order) << ',' << r.matvecs << ',' << (r.converged ? 1 : 0) << ','
        << fmt(r.precompute_seconds) << ',' << fmt(r.seconds_per_iteration) << ',' << hash << '\n';
  }
}

void write_quadrature_csv(const fs::path &path, const std::vector<QuadratureRow> &rows, const std::string &hash)
{
  auto out = open_output(path);
  out << "kappa,patches_per_side,order,points_per_wavelength,rel_error,far,near,singular,seconds,config_hash\n";
  for (const auto &r : rows)
  {
    out << std::setprecision(12) << r.kappa << ',' << r.patches_per_side << ',' << r.order << ','
        << r.points_per_wavelength << ',' << fmt(r.error) << ',' << r.far << ',' << r.near << ',' << r.singular
        << ',' << fmt(r.seconds) << ',' << hash << '\n';
  }
}

namespace
{

json summary_base(const RunManifest &m, const RunConfig &rc, const std::string &hash)
{
  json s;
  s["mode"] = to_string(m.mode);
  s["config"] = m.config.string();
  s["config_hash"] = hash;
  s["problem"] = canonical(rc.problem);
  s["scatterer"] = rc.model.canonical();
  return s;
}

void write_summary(const fs::path &dir, const json &s)
{
  auto out = open_output(dir / "summary.json");
  out << s.dump(2) << '\n';
}

json rows_json(const std::vector<QuadratureRow> &rows)
{
  json a = json::array();
  for (const auto &r : rows)
  {
    a.push_back({{"kappa", r.kappa},
                 {"patches_per_side", r.patches_per_side},
                 {"order", r.order},
                 {"points_per_wavelength", r.points_per_wavelength},
                 {"rel_error", r.error}});
  }
  return a;
}

}  // namespace

int run(const RunManifest &m)
{
  RunConfig rc;
  try
  {
    rc = load_run_config(m.config);
    if (m.levels)
    {
      if (*m.levels < 2)
      {
        throw ConfigError("--levels must be at least 2");
      }
      rc.ladder.levels = *m.levels;
    }
    const auto report = validate(rc.problem, rc.model);
    if (!report.ok())
    {
      throw ConfigError(report.summary());
    }
    if (m.mode == Mode::convergence_ladder && rc.ladder.reference == LadderReference::mie && !mie_for(rc))
    {
      throw ConfigError("a Mie-referenced ladder needs a single constant disc");
    }
    fs::create_directories(m.out_dir);
    const auto probe = m.out_dir / ".write_probe";
    if (!std::ofstream(probe))
    {
      throw ConfigError("output directory " + m.out_dir.string() + " is not writable");
    }
    fs::remove(probe);
  }
  catch (const std::exception &e)
  {
    std::cerr << "validation failed: " << e.what() << '\n';
    return exit_validation;
  }

  const auto hash = run_hash(rc);
  auto summary = summary_base(m, rc, hash);
  int code = exit_ok;
  try
  {
    switch (m.mode)
    {
    case Mode::solve:
    {
      const auto rep = run_solve(rc, m.cache_dir);
      if (!rep.points.empty())
      {
        write_field_csv(m.out_dir / "field.csv", rep.points, rep.field);
      }
      summary["converged"] = rep.result.converged;
      summary["num_it"] = rep.result.matvecs;
      summary["residuals"] = rep.result.residuals;
      summary["precompute_s"] = rep.result.precompute_seconds;
      summary["per_iteration_s"] = rep.result.seconds_per_iteration;
      if (rep.mie_error)
      {
        summary["mie_rel_error"] = *rep.mie_error;
      }
      if (!rep.result.converged)
      {
        std::cerr << "GMRES did not reach the residual target\n";
        code = exit_solver;
      }
      break;
    }
    case Mode::convergence_ladder:
    {
      const auto lad = run_ladder(rc, m.cache_dir);
      write_ladder_csv(m.out_dir / "ladder.csv", lad, hash);
      summary["observed_order"] = lad.observed_order;
      summary["min_order"] = rc.ladder.min_order;
      summary["order_ok"] = lad.order_ok;
      json errs = json::array();
      for (const auto &r : lad.rows)
      {
        errs.push_back(std::isnan(r.error) ? json(nullptr) : json(r.error));
      }
      summary["rel_errors"] = errs;
      if (!lad.order_ok)
      {
        std::cerr << "observed order " << lad.observed_order << " below " << rc.ladder.min_order << '\n';
        code = exit_tolerance;
      }
      break;
    }
    case Mode::quadrature_test:
    {
      const auto rows = run_quadrature_test(rc);
      write_quadrature_csv(m.out_dir / "quadrature.csv", rows, hash);
      summary["rows"] = rows_json(rows);
      break;
    }
    case Mode::dispersion_test:
    {
      const auto rows = run_dispersion_test(rc);
      write_quadrature_csv(m.out_dir / "dispersion.csv", rows, hash);
      summary["rows"] = rows_json(rows);
      break;
    }
    }
  }
  catch (const std::exception &e)
  {
    std::cerr << "run failed: " << e.what() << '\n';
    summary["error"] = e.what();
    code = exit_solver;
  }
  summary["exit_code"] = code;
  try
  {
    write_summary(m.out_dir, summary);
  }
  catch (const std::exception &e)
  {
    std::cerr << e.what() << '\n';
    return exit_solver;
  }
  return code;
}

}  // namespace hybridscat::harness
