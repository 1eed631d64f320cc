#pragma once

#include <vector>

#include "hybridscat/types.hpp"

namespace hybridscat::special
{

// Bessel functions of the first and second kind of integer order, real argument.
double bessel_j(int order, double z);
double bessel_y(int order, double z);

// H^(1)_order(z) = J_order(z) + i Y_order(z); z > 0.
cplx hankel1(int order, double z);

struct KernelPair
{
  cplx g;       // G_kappa(x - y) = (i/4) H0(kappa |x - y|)
  cplx dg_dnu;  // normal derivative with respect to y along nu(y)
};

//
// Radiating fundamental solution of the Helmholtz operator in the plane.
//
class GreensKernel
{
public:
  explicit GreensKernel(double kappa);

  double kappa() const { return kappa_; }

  cplx operator()(Point2 x, Point2 y) const;

  // Throws std::invalid_argument when x == y.
  KernelPair pair(Point2 x, Point2 y, Point2 nu_y) const;

private:
  double kappa_;
};

enum class IncidenceKind
{
  j0_radial,   // J0(kappa |x - origin|)
  plane_wave,  // exp(i kappa d . x)
};

struct Incidence
{
  IncidenceKind kind = IncidenceKind::plane_wave;
  Point2 direction{1.0, 0.0};  // unit vector, plane waves
  Point2 origin{0.0, 0.0};     // centre of the radial wave

  cplx value(double kappa, Point2 x) const;
  // Gradient (d/dx, d/dy).
  std::pair<cplx, cplx> gradient(double kappa, Point2 x) const;

  static Incidence plane(double angle);
  static Incidence radial(Point2 origin = {});
};

//
// Separation-of-variables solution for a homogeneous disc of refractive index n
// illuminated by a J0-radial wave centred at the disc centre or by a plane wave.
//
class MieReference
{
public:
  // truncation < 0 selects ceil(kappa n R) + 20.
  MieReference(Point2 center, double radius, double n_interior, double kappa,
               int truncation = -1);

  int truncation() const { return truncation_; }

  cplx total_field(Point2 x, const Incidence &incidence) const;
  cplx scattered_field(Point2 x, const Incidence &incidence) const;

  // Radial derivative of the total field from inside (r -> R-) and outside (r -> R+).
  cplx radial_derivative(double theta, const Incidence &incidence, bool inside) const;
  cplx trace(double theta, const Incidence &incidence, bool inside) const;

private:
  cplx mode_sum(double r, double theta, const Incidence &incidence, bool inside,
                bool derivative, bool scattered_only) const;

  Point2 center_;
  double radius_;
  double n_;
  double kappa_;
  int truncation_;
  std::vector<cplx> interior_coeff_;  // a_m
  std::vector<cplx> scatter_coeff_;   // b_m
};

}  // namespace hybridscat::special
