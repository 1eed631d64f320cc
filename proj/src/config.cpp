#include "hybridscat/config.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace hybridscat
{

namespace
{

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string num(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool boxes_overlap(const Box &a, const Box &b)
{
  return a.xmin < b.xmax && b.xmin < a.xmax && a.ymin < b.ymax && b.ymin < a.ymax;
}

}  // namespace

std::string to_string(ScattererKind kind)
{
  switch (kind)
  {
    case ScattererKind::constant_disc:
      return "constant-disc";
    case ScattererKind::gaussian_disc:
      return "gaussian-disc";
    case ScattererKind::square:
      return "square";
    case ScattererKind::four_disc_star:
      return "four-disc-star-complement";
    case ScattererKind::piecewise_union:
      return "piecewise-union";
  }
  return "unknown";
}

ScattererKind scatterer_kind_from_string(const std::string &name)
{
  for (auto k : {ScattererKind::constant_disc, ScattererKind::gaussian_disc,
                 ScattererKind::square, ScattererKind::four_disc_star,
                 ScattererKind::piecewise_union})
  {
    if (to_string(k) == name)
    {
      return k;
    }
  }
  throw std::invalid_argument("unknown scatterer kind '" + name + "'");
}

RefractivityModel RefractivityModel::vacuum()
{
  return {};
}

RefractivityModel RefractivityModel::constant_disc(Point2 center, double radius, double n2)
{
  RefractivityModel m;
  m.kind_ = ScattererKind::constant_disc;
  m.components_.push_back(DiscComponent{center, radius, n2});
  return m;
}

RefractivityModel RefractivityModel::gaussian_disc(Point2 center, double radius, double base,
                                                   double amplitude, double decay)
{
  RefractivityModel m;
  m.kind_ = ScattererKind::gaussian_disc;
  m.components_.push_back(GaussianDiscComponent{center, radius, base, amplitude, decay});
  return m;
}

RefractivityModel RefractivityModel::square(Point2 center, double half_side, double n2)
{
  RefractivityModel m;
  m.kind_ = ScattererKind::square;
  m.components_.push_back(SquareComponent{center, half_side, n2});
  return m;
}

RefractivityModel RefractivityModel::four_disc_star(Point2 center, double scale, double n2)
{
  RefractivityModel m;
  m.kind_ = ScattererKind::four_disc_star;
  m.components_.push_back(StarComponent{center, scale, n2});
  return m;
}

RefractivityModel RefractivityModel::piecewise_union(std::vector<ScattererComponent> parts)
{
  RefractivityModel m;
  m.kind_ = ScattererKind::piecewise_union;
  m.components_ = std::move(parts);
  return m;
}

double component_n_squared(const ScattererComponent &part, Point2 x, bool &inside)
{
  return std::visit(
      overloaded{
          [&](const DiscComponent &d)
          {
            inside = distance(x, d.center) < d.radius;
            return inside ? d.n2 : 1.0;
          },
          [&](const SquareComponent &s)
          {
            inside = std::abs(x.x - s.center.x) < s.half_side &&
                     std::abs(x.y - s.center.y) < s.half_side;
            return inside ? s.n2 : 1.0;
          },
          [&](const GaussianDiscComponent &g)
          {
            const double r = distance(x, g.center);
            inside = r < g.radius;
            return inside ? g.base + g.amplitude * std::exp(-g.decay * r * r) : 1.0;
          },
          [&](const StarComponent &s)
          {
            const Point2 d = x - s.center;
            inside = std::abs(d.x) < s.scale && std::abs(d.y) < s.scale;
            if (inside)
            {
              for (double cx : {-s.scale, s.scale})
              {
                for (double cy : {-s.scale, s.scale})
                {
                  if (distance(d, Point2{cx, cy}) <= s.scale)
                  {
                    inside = false;
                  }
                }
              }
            }
            return inside ? s.n2 : 1.0;
          },
      },
      part);
}

Box component_box(const ScattererComponent &part)
{
  return std::visit(
      overloaded{
          [](const DiscComponent &d) {
            return Box{d.center.x - d.radius, d.center.x + d.radius, d.center.y - d.radius,
                       d.center.y + d.radius};
          },
          [](const SquareComponent &s) {
            return Box{s.center.x - s.half_side, s.center.x + s.half_side,
                       s.center.y - s.half_side, s.center.y + s.half_side};
          },
          [](const GaussianDiscComponent &g) {
            return Box{g.center.x - g.radius, g.center.x + g.radius, g.center.y - g.radius,
                       g.center.y + g.radius};
          },
          [](const StarComponent &s) {
            return Box{s.center.x - s.scale, s.center.x + s.scale, s.center.y - s.scale,
                       s.center.y + s.scale};
          },
      },
      part);
}

double RefractivityModel::n_squared(Point2 x) const
{
  // Components are disjoint, so at most one contributes.
  for (const auto &part : components_)
  {
    bool inside = false;
    const double n2 = component_n_squared(part, x, inside);
    if (inside)
    {
      return n2;
    }
  }
  return 1.0;
}

Box RefractivityModel::support_box() const
{
  if (components_.empty())
  {
    return {0.0, 0.0, 0.0, 0.0};
  }
  Box box = component_box(components_.front());
  for (const auto &part : components_)
  {
    const Box b = component_box(part);
    box.xmin = std::min(box.xmin, b.xmin);
    box.xmax = std::max(box.xmax, b.xmax);
    box.ymin = std::min(box.ymin, b.ymin);
    box.ymax = std::max(box.ymax, b.ymax);
  }
  return box;
}

double RefractivityModel::max_refractive_index() const
{
  double n2max = 1.0;
  for (const auto &part : components_)
  {
    std::visit(overloaded{
                   [&](const DiscComponent &d) { n2max = std::max(n2max, d.n2); },
                   [&](const SquareComponent &s) { n2max = std::max(n2max, s.n2); },
                   [&](const GaussianDiscComponent &g)
                   {
                     n2max = std::max({n2max, g.base, g.base + g.amplitude,
                                       g.base + g.amplitude *
                                                    std::exp(-g.decay * g.radius * g.radius)});
                   },
                   [&](const StarComponent &s) { n2max = std::max(n2max, s.n2); },
               },
               part);
  }
  return std::sqrt(n2max);
}

double RefractivityModel::min_n_squared() const
{
  double n2min = 1.0;
  for (const auto &part : components_)
  {
    std::visit(overloaded{
                   [&](const DiscComponent &d) { n2min = std::min(n2min, d.n2); },
                   [&](const SquareComponent &s) { n2min = std::min(n2min, s.n2); },
                   [&](const GaussianDiscComponent &g)
                   {
                     n2min = std::min({n2min, g.base + g.amplitude,
                                       g.base + g.amplitude *
                                                    std::exp(-g.decay * g.radius * g.radius)});
                   },
                   [&](const StarComponent &s) { n2min = std::min(n2min, s.n2); },
               },
               part);
  }
  return n2min;
}

std::string RefractivityModel::canonical() const
{
  std::ostringstream out;
  out << to_string(kind_);
  for (const auto &part : components_)
  {
    out << ';';
    std::visit(overloaded{
                   [&](const DiscComponent &d) {
                     out << "disc(" << num(d.center.x) << ',' << num(d.center.y) << ','
                         << num(d.radius) << ',' << num(d.n2) << ')';
                   },
                   [&](const SquareComponent &s) {
                     out << "square(" << num(s.center.x) << ',' << num(s.center.y) << ','
                         << num(s.half_side) << ',' << num(s.n2) << ')';
                   },
                   [&](const GaussianDiscComponent &g) {
                     out << "gaussian(" << num(g.center.x) << ',' << num(g.center.y) << ','
                         << num(g.radius) << ',' << num(g.base) << ',' << num(g.amplitude)
                         << ',' << num(g.decay) << ')';
                   },
                   [&](const StarComponent &s) {
                     out << "star(" << num(s.center.x) << ',' << num(s.center.y) << ','
                         << num(s.scale) << ',' << num(s.n2) << ')';
                   },
               },
               part);
  }
  return out.str();
}

std::uint64_t RefractivityModel::hash() const
{
  return fnv1a(canonical());
}

std::uint64_t fnv1a(const std::string &text)
{
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text)
  {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex_hash(std::uint64_t h)
{
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string canonical(const ProblemConfig &c)
{
  std::ostringstream out;
  out << "kappa=" << num(c.kappa) << ";alpha=" << num(c.alpha) << ";beta=" << num(c.beta)
      << ";a=" << num(c.half_width) << ";K=" << c.K << ";L=" << c.L << ";n1=" << c.n1
      << ";n2=" << c.n2 << ";F=" << c.F << ";k=" << c.cov_order
      << ";near=" << num(c.near_threshold) << ";tol=" << num(c.gmres_tol)
      << ";maxit=" << c.gmres_max_iter << ";fs=" << c.fourier_smoothing
      << ";pad=" << c.pad_factor << ";deg=" << c.interp_degree
      << ";far=" << c.far_oversample;
  return out.str();
}

std::string ValidationReport::summary() const
{
  std::ostringstream out;
  if (ok())
  {
    out << "valid";
  }
  else
  {
    out << violations.size() << " violation(s):";
    for (const auto &v : violations)
    {
      out << "\n  [" << v.index << "] " << v.message;
    }
  }
  out << "\nlambda_int=" << lambda_int << " h=" << mesh_spacing
      << " ppw=" << points_per_wavelength;
  return out.str();
}

ValidationReport validate(const ProblemConfig &c, const RefractivityModel &model)
{
  ValidationReport r;
  auto fail = [&](int index, std::string message)
  { r.violations.push_back({index, std::move(message)}); };

  if (!(c.kappa > 0.0))
  {
    fail(invariant::kappa_positive, "kappa must be positive");
  }
  if (!(c.half_width > 0.0))
  {
    fail(invariant::half_width_positive, "half_width must be positive");
  }
  if (c.K < 1 || c.L < 1)
  {
    fail(invariant::partition_counts, "K and L must be at least 1");
  }
  if (c.n1 < 4 || c.n2 < 4)
  {
    fail(invariant::chebyshev_order, "Chebyshev orders n1, n2 must be at least 4");
  }
  if (c.F < 0)
  {
    fail(invariant::fourier_order, "Fourier truncation order F must be non-negative");
  }
  if (c.cov_order < 2)
  {
    fail(invariant::cov_order, "change-of-variable order must be at least 2");
  }
  if (!(c.alpha * c.beta > 0.0))
  {
    fail(invariant::impedance_sign, "impedance constants must satisfy alpha*beta > 0");
  }
  if (!(c.near_threshold > 0.0) || !(c.gmres_tol > 0.0) || c.gmres_max_iter < 1 ||
      c.pad_factor < 4 || c.interp_degree < 1 || c.far_oversample < 1)
  {
    fail(invariant::solver_settings, "solver settings out of range (near_threshold>0, "
                                     "gmres_tol>0, gmres_max_iter>=1, pad_factor>=4, "
                                     "interp_degree>=1, far_oversample>=1)");
  }

  if (!model.is_vacuum())
  {
    const Box b = model.support_box();
    const double a = c.half_width;
    if (!(b.xmin > -a && b.xmax < a && b.ymin > -a && b.ymax < a))
    {
      fail(invariant::support_inside, "inhomogeneity support is not strictly inside the "
                                      "computational square");
    }
    if (!(model.min_n_squared() > 0.0))
    {
      fail(invariant::n_squared_positive, "n^2 must be positive everywhere");
    }
    const auto &parts = model.components();
    for (std::size_t i = 0; i < parts.size(); ++i)
    {
      for (std::size_t j = i + 1; j < parts.size(); ++j)
      {
        if (boxes_overlap(component_box(parts[i]), component_box(parts[j])))
        {
          fail(invariant::components_disjoint,
               "components " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
        }
      }
    }
  }

  if (c.kappa > 0.0 && c.K >= 1 && c.L >= 1 && c.n1 >= 1 && c.n2 >= 1)
  {
    r.lambda_int = 2.0 * pi / (c.kappa * model.max_refractive_index());
    r.mesh_spacing = c.patch_width() / std::max(c.n1, c.n2);
    r.points_per_wavelength = r.lambda_int / r.mesh_spacing;
  }
  return r;
}

}  // namespace hybridscat
