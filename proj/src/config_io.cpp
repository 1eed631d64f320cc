#include "hybridscat/config_io.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

namespace hybridscat
{

using nlohmann::json;

std::vector<Point2> SamplingGrid::points() const
{
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
  {
    for (int i = 0; i < nx; ++i)
    {
      const double x = nx > 1 ? xmin + (xmax - xmin) * i / (nx - 1) : 0.5 * (xmin + xmax);
      const double y = ny > 1 ? ymin + (ymax - ymin) * j / (ny - 1) : 0.5 * (ymin + ymax);
      out.push_back({x, y});
    }
  }
  return out;
}

double parse_wavenumber(const std::string &text)
{
  static const std::regex re(R"(^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)?\s*\*?\s*(pi)?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re) || (!m[1].matched && !m[2].matched))
  {
    throw ConfigError("cannot parse wavenumber '" + text + "'");
  }
  const double factor = m[1].matched ? std::stod(m[1].str()) : 1.0;
  return m[2].matched ? factor * pi : factor;
}

namespace
{

template <typename T>
void read(const json &j, const char *key, T &out)
{
  if (j.contains(key))
  {
    try
    {
      out = j.at(key).get<T>();
    }
    catch (const json::exception &e)
    {
      throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
  }
}

const json &require(const json &j, const char *key)
{
  if (!j.is_object() || !j.contains(key))
  {
    throw ConfigError(std::string("missing required field '") + key + "'");
  }
  return j.at(key);
}

Point2 point(const json &j, const char *key, Point2 fallback = {})
{
  if (!j.contains(key))
  {
    return fallback;
  }
  const auto &v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
  {
    throw ConfigError(std::string("field '") + key + "' must be a pair of numbers");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

double number(const json &j, const char *key)
{
  const auto &v = require(j, key);
  if (!v.is_number())
  {
    throw ConfigError(std::string("field '") + key + "' must be a number");
  }
  return v.get<double>();
}

ScattererComponent component(const json &j)
{
  const auto kind = require(j, "kind").get<std::string>();
  const Point2 c = point(j, "center");
  if (kind == "constant-disc")
  {
    return DiscComponent{c, number(j, "radius"), number(j, "n2")};
  }
  if (kind == "square")
  {
    return SquareComponent{c, number(j, "half_side"), number(j, "n2")};
  }
  if (kind == "gaussian-disc")
  {
    GaussianDiscComponent g{c, number(j, "radius")};
    read(j, "base", g.base);
    read(j, "amplitude", g.amplitude);
    read(j, "decay", g.decay);
    return g;
  }
  if (kind == "four-disc-star-complement")
  {
    return StarComponent{c, number(j, "scale"), number(j, "n2")};
  }
  throw ConfigError("unknown scatterer component kind '" + kind + "'");
}

RefractivityModel model_from(const json &j)
{
  const auto kind = require(j, "kind").get<std::string>();
  if (kind == "vacuum")
  {
    return RefractivityModel::vacuum();
  }
  if (kind == "piecewise-union")
  {
    std::vector<ScattererComponent> parts;
    for (const auto &p : require(j, "components"))
    {
      parts.push_back(component(p));
    }
    return RefractivityModel::piecewise_union(std::move(parts));
  }
  const auto part = component(j);
  return std::visit(
      [&](const auto &p) -> RefractivityModel
      {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DiscComponent>)
        {
          return RefractivityModel::constant_disc(p.center, p.radius, p.n2);
        }
        else if constexpr (std::is_same_v<T, SquareComponent>)
        {
          return RefractivityModel::square(p.center, p.half_side, p.n2);
        }
        else if constexpr (std::is_same_v<T, GaussianDiscComponent>)
        {
          return RefractivityModel::gaussian_disc(p.center, p.radius, p.base, p.amplitude, p.decay);
        }
        else
        {
          return RefractivityModel::four_disc_star(p.center, p.scale, p.n2);
        }
      },
      part);
}

special::Incidence incidence_from(const json &j)
{
  const auto kind = require(j, "kind").get<std::string>();
  if (kind == "plane-wave")
  {
    double angle = 0.0;
    read(j, "angle", angle);
    return special::Incidence::plane(angle);
  }
  if (kind == "j0-radial")
  {
    return special::Incidence::radial(point(j, "origin"));
  }
  throw ConfigError("unknown incidence kind '" + kind + "'");
}

double wavenumber(const json &v)
{
  if (v.is_number())
  {
    return v.get<double>();
  }
  if (v.is_string())
  {
    return parse_wavenumber(v.get<std::string>());
  }
  throw ConfigError("field 'kappa' must be a number or a string such as \"5pi\"");
}

}  // namespace

RunConfig parse_run_config(const std::string &text)
{
  json j;
  try
  {
    j = json::parse(text);
  }
  catch (const json::parse_error &e)
  {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  if (!j.is_object())
  {
    throw ConfigError("configuration must be a JSON object");
  }
  RunConfig rc;
  try
  {
    const auto &p = require(j, "problem");
    auto &c = rc.problem;
    c.kappa = wavenumber(require(p, "kappa"));
    c.half_width = number(p, "half_width");
    c.K = require(p, "K").get<int>();
    c.L = require(p, "L").get<int>();
    c.n1 = require(p, "n1").get<int>();
    c.n2 = c.n1;
    read(p, "n2", c.n2);
    read(p, "alpha", c.alpha);
    read(p, "beta", c.beta);
    read(p, "F", c.F);
    read(p, "cov_order", c.cov_order);
    read(p, "near_threshold", c.near_threshold);
    read(p, "gmres_tol", c.gmres_tol);
    read(p, "gmres_max_iter", c.gmres_max_iter);
    read(p, "fourier_smoothing", c.fourier_smoothing);
    read(p, "pad_factor", c.pad_factor);
    read(p, "interp_degree", c.interp_degree);
    read(p, "far_oversample", c.far_oversample);
    read(p, "retain_factorizations", c.retain_factorizations);

    rc.model = model_from(require(j, "scatterer"));
    if (j.contains("incidence"))
    {
      rc.incidence = incidence_from(j.at("incidence"));
    }
    if (j.contains("output") && j.at("output").contains("grid"))
    {
      const auto &g = j.at("output").at("grid");
      const double a = c.half_width;
      rc.grid = {-a, a, -a, a, 0, 0};
      read(g, "xmin", rc.grid.xmin);
      read(g, "xmax", rc.grid.xmax);
      read(g, "ymin", rc.grid.ymin);
      read(g, "ymax", rc.grid.ymax);
      read(g, "nx", rc.grid.nx);
      read(g, "ny", rc.grid.ny);
      if (rc.grid.nx < 0 || rc.grid.ny < 0)
      {
        throw ConfigError("output grid sizes must be non-negative");
      }
    }
    if (j.contains("ladder"))
    {
      const auto &l = j.at("ladder");
      read(l, "levels", rc.ladder.levels);
      std::string ref = "self";
      read(l, "reference", ref);
      if (ref == "mie")
      {
        rc.ladder.reference = LadderReference::mie;
      }
      else if (ref != "self")
      {
        throw ConfigError("ladder reference must be 'mie' or 'self'");
      }
      read(l, "compare_without_smoothing", rc.ladder.compare_without_smoothing);
      read(l, "min_order", rc.ladder.min_order);
      read(l, "sample_points", rc.ladder.sample_points);
      if (rc.ladder.levels < 2)
      {
        throw ConfigError("a ladder needs at least two levels");
      }
    }
    if (j.contains("quadrature_test"))
    {
      const auto &q = j.at("quadrature_test");
      read(q, "patches_per_side", rc.quadrature.patches_per_side);
      read(q, "orders", rc.quadrature.orders);
    }
    if (j.contains("dispersion_test"))
    {
      const auto &d = j.at("dispersion_test");
      read(d, "order", rc.dispersion.order);
      read(d, "points_per_wavelength", rc.dispersion.points_per_wavelength);
      if (d.contains("kappas"))
      {
        for (const auto &k : d.at("kappas"))
        {
          rc.dispersion.kappas.push_back(wavenumber(k));
        }
      }
    }
  }
  catch (const json::exception &e)
  {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  catch (const std::invalid_argument &e)
  {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  rc.source = j.dump();
  return rc;
}

RunConfig load_run_config(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot read configuration file " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string run_hash(const RunConfig &config)
{
  std::ostringstream ss;
  ss << canonical(config.problem) << '|' << config.model.canonical() << '|' << config.source;
  return hex_hash(fnv1a(ss.str()));
}

}  // namespace hybridscat
