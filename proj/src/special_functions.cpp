#include "hybridscat/special_functions.hpp"

#include <stdexcept>

#include <boost/math/special_functions/bessel.hpp>

namespace hybridscat::special
{

double bessel_j(int order, double z)
{
  return boost::math::cyl_bessel_j(order, z);
}

double bessel_y(int order, double z)
{
  if (!(z > 0.0))
  {
    throw std::invalid_argument("bessel_y: argument must be positive");
  }
  return boost::math::cyl_neumann(order, z);
}

cplx hankel1(int order, double z)
{
  if (!(z > 0.0))
  {
    throw std::invalid_argument("hankel1: argument must be positive");
  }
  return {boost::math::cyl_bessel_j(order, z), boost::math::cyl_neumann(order, z)};
}

GreensKernel::GreensKernel(double kappa) : kappa_(kappa)
{
  if (!(kappa > 0.0))
  {
    throw std::invalid_argument("GreensKernel: kappa must be positive");
  }
}

cplx GreensKernel::operator()(Point2 x, Point2 y) const
{
  const double r = distance(x, y);
  if (r == 0.0)
  {
    throw std::invalid_argument("GreensKernel: coincident points");
  }
  return 0.25 * I * hankel1(0, kappa_ * r);
}

KernelPair GreensKernel::pair(Point2 x, Point2 y, Point2 nu_y) const
{
  const Point2 d = x - y;
  const double r = norm(d);
  if (r == 0.0)
  {
    throw std::invalid_argument("GreensKernel: coincident points");
  }
  const double kr = kappa_ * r;
  const double j0 = boost::math::cyl_bessel_j(0, kr);
  const double y0 = boost::math::cyl_neumann(0, kr);
  const double j1 = boost::math::cyl_bessel_j(1, kr);
  const double y1 = boost::math::cyl_neumann(1, kr);
  KernelPair k;
  k.g = 0.25 * I * cplx(j0, y0);
  k.dg_dnu = 0.25 * I * kappa_ * cplx(j1, y1) * (dot(d, nu_y) / r);
  return k;
}

cplx Incidence::value(double kappa, Point2 x) const
{
  if (kind == IncidenceKind::plane_wave)
  {
    return std::exp(I * (kappa * dot(direction, x)));
  }
  return boost::math::cyl_bessel_j(0, kappa * distance(x, origin));
}

std::pair<cplx, cplx> Incidence::gradient(double kappa, Point2 x) const
{
  if (kind == IncidenceKind::plane_wave)
  {
    const cplx u = value(kappa, x);
    return {I * kappa * direction.x * u, I * kappa * direction.y * u};
  }
  const Point2 d = x - origin;
  const double r = norm(d);
  if (r == 0.0)
  {
    return {0.0, 0.0};
  }
  // d/dr J0(kappa r) = -kappa J1(kappa r)
  const double dr = -kappa * boost::math::cyl_bessel_j(1, kappa * r);
  return {dr * d.x / r, dr * d.y / r};
}

Incidence Incidence::plane(double angle)
{
  return {IncidenceKind::plane_wave, {std::cos(angle), std::sin(angle)}, {}};
}

Incidence Incidence::radial(Point2 origin)
{
  return {IncidenceKind::j0_radial, {1.0, 0.0}, origin};
}

namespace
{
double jprime(int m, double z)
{
  return m == 0 ? -boost::math::cyl_bessel_j(1, z)
                : 0.5 * (boost::math::cyl_bessel_j(m - 1, z) - boost::math::cyl_bessel_j(m + 1, z));
}

cplx hprime(int m, double z)
{
  return m == 0 ? -hankel1(1, z) : 0.5 * (hankel1(m - 1, z) - hankel1(m + 1, z));
}
}  // namespace

MieReference::MieReference(Point2 center, double radius, double n_interior, double kappa,
                           int truncation)
    : center_(center), radius_(radius), n_(n_interior), kappa_(kappa), truncation_(truncation)
{
  if (!(radius > 0.0) || !(n_interior > 0.0) || !(kappa > 0.0))
  {
    throw std::invalid_argument("MieReference: radius, index and kappa must be positive");
  }
  if (truncation_ < 0)
  {
    truncation_ = static_cast<int>(std::ceil(kappa * n_interior * radius)) + 20;
  }
  interior_coeff_.resize(truncation_ + 1);
  scatter_coeff_.resize(truncation_ + 1);
  const double kR = kappa * radius;
  const double knR = kappa * n_interior * radius;
  for (int m = 0; m <= truncation_; ++m)
  {
    const double J = bessel_j(m, kR);
    const double Jp = jprime(m, kR);
    const double J1 = bessel_j(m, knR);
    const double J1p = jprime(m, knR);
    const cplx H = hankel1(m, kR);
    const cplx Hp = hprime(m, kR);
    // [J1, -H; n J1', -H'] [a; b] = [J; J']
    const cplx det = -J1 * Hp + n_interior * H * J1p;
    interior_coeff_[m] = (-J * Hp + H * Jp) / det;
    scatter_coeff_[m] = (J1 * Jp - n_interior * J1p * J) / det;
  }
}

cplx MieReference::mode_sum(double r, double theta, const Incidence &incidence, bool inside,
                            bool derivative, bool scattered_only) const
{
  const double kn = kappa_ * n_;
  auto radial = [&](int m) -> cplx
  {
    if (inside)
    {
      if (scattered_only)
      {
        return 0.0;
      }
      return derivative ? interior_coeff_[m] * kn * jprime(m, kn * r)
                        : interior_coeff_[m] * bessel_j(m, kn * r);
    }
    if (derivative)
    {
      const cplx s = scatter_coeff_[m] * kappa_ * hprime(m, kappa_ * r);
      return scattered_only ? s : kappa_ * jprime(m, kappa_ * r) + s;
    }
    const cplx s = r > 0.0 ? scatter_coeff_[m] * hankel1(m, kappa_ * r) : cplx(0.0);
    return scattered_only ? s : bessel_j(m, kappa_ * r) + s;
  };

  if (incidence.kind == IncidenceKind::j0_radial)
  {
    if (distance(incidence.origin, center_) > 1e-14)
    {
      throw std::invalid_argument("MieReference: radial incidence must be centred on the disc");
    }
    return radial(0);
  }

  const double theta_d = std::atan2(incidence.direction.y, incidence.direction.x);
  const cplx phase = std::exp(I * (kappa_ * dot(incidence.direction, center_)));
  cplx sum = radial(0);
  cplx im = 1.0;
  for (int m = 1; m <= truncation_; ++m)
  {
    im *= I;
    sum += 2.0 * im * std::cos(m * (theta - theta_d)) * radial(m);
  }
  return phase * sum;
}

cplx MieReference::total_field(Point2 x, const Incidence &incidence) const
{
  const Point2 d = x - center_;
  const double r = norm(d);
  if (r < radius_)
  {
    return mode_sum(r, std::atan2(d.y, d.x), incidence, true, false, false);
  }
  // Outside, the incident part is summed in closed form; the truncation only has to
  // resolve the scattered coefficients.
  return incidence.value(kappa_, x) +
         mode_sum(r, std::atan2(d.y, d.x), incidence, false, false, true);
}

cplx MieReference::scattered_field(Point2 x, const Incidence &incidence) const
{
  const Point2 d = x - center_;
  const double r = norm(d);
  if (r < radius_)
  {
    return total_field(x, incidence) - incidence.value(kappa_, x);
  }
  return mode_sum(r, std::atan2(d.y, d.x), incidence, false, false, true);
}

cplx MieReference::radial_derivative(double theta, const Incidence &incidence,
                                     bool inside) const
{
  return mode_sum(radius_, theta, incidence, inside, true, false);
}

cplx MieReference::trace(double theta, const Incidence &incidence, bool inside) const
{
  return mode_sum(radius_, theta, incidence, inside, false, false);
}

}  // namespace hybridscat::special
