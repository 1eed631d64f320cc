#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "hybridscat/special_functions.hpp"

using namespace hybridscat;
using namespace hybridscat::special;

namespace
{
// Power series for J0 and Y0, used as an independent reference at moderate z.
std::pair<double, double> j0_y0_series(double z)
{
  const double q = 0.25 * z * z;
  double term = 1.0, j0 = 1.0, harmonic = 0.0, y_sum = 0.0;
  for (int k = 1; k < 60; ++k)
  {
    term *= -q / (static_cast<double>(k) * k);
    harmonic += 1.0 / k;
    j0 += term;
    y_sum -= term * harmonic;
  }
  constexpr double euler_gamma = 0.57721566490153286061;
  const double y0 = 2.0 / pi * ((std::log(0.5 * z) + euler_gamma) * j0 + y_sum);
  return {j0, y0};
}
}  // namespace

TEST_CASE("Bessel values")
{
  CHECK(bessel_j(0, 0.0) == 1.0);
  const cplx h = hankel1(0, 1.0);
  CHECK(std::abs(h - cplx(0.7651976866, 0.0882569642)) < 1e-9);
  for (double z : {0.1, 0.5, 1.0, 3.0, 7.5})
  {
    const auto [j0, y0] = j0_y0_series(z);
    CHECK(std::abs(bessel_j(0, z) - j0) < 1e-13);
    CHECK(std::abs(bessel_y(0, z) - y0) < 1e-13);
  }
  CHECK_THROWS_AS(hankel1(0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(hankel1(1, -1.0), std::invalid_argument);
}

TEST_CASE("Bessel functions agree with the standard library over a wide range")
{
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> logz(-3.0, 4.0);
  for (int k = 0; k < 400; ++k)
  {
    const double z = std::pow(10.0, logz(rng));
    for (int m : {0, 1})
    {
      // The phase of J and Y is only determined to about z ulp.
      const double scale = std::abs(hankel1(m, z)) * std::max(1.0, z / 100.0);
      CHECK(std::abs(bessel_j(m, z) - std::cyl_bessel_j(double(m), z)) <= 1e-12 * scale);
      CHECK(std::abs(bessel_y(m, z) - std::cyl_neumann(double(m), z)) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("Wronskian identity")
{
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(0.01, 200.0);
  for (int k = 0; k < 50; ++k)
  {
    const double z = dist(rng);
    const double w = bessel_j(1, z) * bessel_y(0, z) - bessel_j(0, z) * bessel_y(1, z);
    // W[J0, Y0] = J1 Y0 - J0 Y1 = 2 / (pi z)
    CHECK(std::abs(w - 2.0 / (pi * z)) < 1e-11 * std::max(1.0, 2.0 / (pi * z)));
  }
}

TEST_CASE("kernel pair")
{
  const GreensKernel g(1.0);
  // Normal perpendicular to x - y.
  const auto k0 = g.pair({1.0, 0.0}, {0.0, 0.0}, {0.0, 1.0});
  CHECK(std::abs(k0.dg_dnu) == 0.0);
  CHECK(std::abs(k0.g - 0.25 * I * hankel1(0, 1.0)) < 1e-15);
  // Normal aligned with x - y, unit distance.
  const auto k1 = g.pair({0.6, 0.8}, {0.0, 0.0}, {0.6, 0.8});
  CHECK(std::abs(k1.dg_dnu - 0.25 * I * hankel1(1, 1.0)) < 1e-15);
  // Swapping arguments.
  const GreensKernel g5(5.0);
  const Point2 x{0.3, -0.2}, y{-0.4, 0.9}, nu{0.0, 1.0};
  const auto a = g5.pair(x, y, nu);
  const auto b = g5.pair(y, x, nu);
  CHECK(std::abs(a.g - b.g) < 1e-15);
  CHECK(std::abs(a.dg_dnu + b.dg_dnu) < 1e-15);
  CHECK(std::abs(g5(x, y) - g5(y, x)) == 0.0);
  CHECK_THROWS_AS(g5.pair(x, x, nu), std::invalid_argument);
  CHECK_THROWS_AS(g5(x, x), std::invalid_argument);
}

TEST_CASE("Green function solves the Helmholtz equation away from the source")
{
  const double kappa = 3.0;
  const GreensKernel g(kappa);
  const Point2 x{0.7, 0.4};
  double prev = 0.0;
  for (double h : {1e-2, 5e-3})
  {
    const cplx lap = (g(x + Point2{h, 0}, {}) + g(x - Point2{h, 0}, {}) + g(x + Point2{0, h}, {}) +
                      g(x - Point2{0, h}, {}) - 4.0 * g(x, {})) /
                     (h * h);
    const double res = std::abs(lap + kappa * kappa * g(x, {}));
    if (prev > 0.0)
    {
      // Second-order stencil: halving h quarters the residual.
      CHECK(res < prev / 3.5);
    }
    prev = res;
  }
}

TEST_CASE("Mie reference without contrast is the incident field")
{
  const MieReference mie({0.2, -0.1}, 1.0, 1.0, 5.0);
  const auto plane = Incidence::plane(0.4);
  for (Point2 x : {Point2{0.1, 0.3}, Point2{1.5, -2.0}, Point2{-3.0, 0.5}})
  {
    CHECK(std::abs(mie.total_field(x, plane) - plane.value(5.0, x)) < 1e-12);
  }
  const MieReference centred({0, 0}, 1.0, 1.0, 5.0);
  const auto radial = Incidence::radial();
  CHECK(std::abs(centred.total_field({0.3, 0.4}, radial) - bessel_j(0, 2.5)) < 1e-13);
  CHECK(std::abs(centred.scattered_field({2.0, 0.4}, radial)) < 1e-13);
}

TEST_CASE("Mie series satisfies the transmission conditions")
{
  const MieReference mie({0, 0}, 1.0, std::sqrt(2.0), 5.0);
  for (const auto &inc : {Incidence::radial(), Incidence::plane(0.3)})
  {
    double worst = 0.0;
    for (int k = 0; k < 64; ++k)
    {
      const double theta = 2.0 * pi * k / 64.0;
      worst = std::max(worst, std::abs(mie.trace(theta, inc, true) - mie.trace(theta, inc, false)));
      worst = std::max(worst, std::abs(mie.radial_derivative(theta, inc, true) -
                                       mie.radial_derivative(theta, inc, false)));
    }
    CHECK(worst < 1e-10);
  }
  CHECK_THROWS_AS(mie.total_field({0, 0}, Incidence::radial({0.5, 0.0})), std::invalid_argument);
}

TEST_CASE("Mie scattered field decays like r^{-1/2}")
{
  const MieReference mie({0, 0}, 1.0, std::sqrt(2.0), 5.0);
  const auto inc = Incidence::plane(0.0);
  for (double theta : {0.3, 1.7, 3.0})
  {
    const Point2 u{std::cos(theta), std::sin(theta)};
    const double r = 40.0;
    const double ratio = std::abs(mie.scattered_field(u * (2.0 * r), inc)) /
                         std::abs(mie.scattered_field(u * r, inc));
    CHECK(std::abs(ratio * std::sqrt(2.0) - 1.0) < 0.05);
  }
}

TEST_CASE("Mie plane-wave field matches a small Lippmann-Schwinger solve")
{
  // u = u_i - kappa^2 int_D G(x - y) m(y) u(y) dy, on cells weighted by their area fraction
  // inside the disc; self cells use the equal-area disc integral of G.
  const double kappa = 1.0, R = 0.5, n2 = 2.0, m = 1.0 - n2;
  const int cells = 40;
  const double h = 2.0 * R / cells;
  std::vector<Point2> centre;
  std::vector<double> area;
  const int sub = 16;
  for (int i = 0; i < cells; ++i)
  {
    for (int j = 0; j < cells; ++j)
    {
      const Point2 c{-R + (i + 0.5) * h, -R + (j + 0.5) * h};
      int inside = 0;
      for (int a = 0; a < sub; ++a)
      {
        for (int b = 0; b < sub; ++b)
        {
          const Point2 p = c + Point2{(a + 0.5) / sub - 0.5, (b + 0.5) / sub - 0.5} * h;
          inside += norm(p) < R ? 1 : 0;
        }
      }
      if (inside > 0)
      {
        centre.push_back(c);
        area.push_back(h * h * inside / double(sub * sub));
      }
    }
  }
  const int N = static_cast<int>(centre.size());
  const GreensKernel G(kappa);
  const auto inc = Incidence::plane(0.0);
  auto self_integral = [&](double cell_area)
  {
    const double rho = std::sqrt(cell_area / pi);
    return 0.25 * I * 2.0 * pi *
           (rho * hankel1(1, kappa * rho) / kappa + 2.0 * I / (pi * kappa * kappa));
  };
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(N, N);
  Eigen::VectorXcd rhs(N);
  for (int i = 0; i < N; ++i)
  {
    rhs[i] = inc.value(kappa, centre[i]);
    for (int j = 0; j < N; ++j)
    {
      const cplx gij = (i == j) ? self_integral(area[j]) : G(centre[i], centre[j]) * area[j];
      A(i, j) += kappa * kappa * m * gij;
    }
  }
  const Eigen::VectorXcd u = A.partialPivLu().solve(rhs);
  const MieReference mie({0, 0}, R, std::sqrt(n2), kappa);
  for (Point2 x : {Point2{3.0, 1.0}, Point2{-2.0, 2.5}})
  {
    cplx us = 0.0;
    for (int j = 0; j < N; ++j)
    {
      us -= kappa * kappa * m * G(x, centre[j]) * area[j] * u[j];
    }
    CHECK(std::abs(inc.value(kappa, x) + us - mie.total_field(x, inc)) < 1e-3);
  }
}
