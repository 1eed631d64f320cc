#include <doctest.h>

#include <filesystem>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hybridscat/fourier_smoothing.hpp"

using namespace hybridscat;
using namespace hybridscat::fourier;

namespace
{
using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

// Adaptive integral of a complex integrand, real and imaginary parts separately.
template <class Fn>
cplx adaptive(Fn f, double lo, double hi)
{
  const double re = GK::integrate([&](double t) { return f(t).real(); }, lo, hi, 10, 1e-12);
  const double im = GK::integrate([&](double t) { return f(t).imag(); }, lo, hi, 10, 1e-12);
  return {re, im};
}

// (1 / 4a^2) int_0^R int_0^{2 pi} m(r) exp(-i w . (c + r e_theta)) r dtheta dr
template <class Profile>
cplx polar_oracle(Profile m, Point2 c, double R, double a, int l1, int l2)
{
  const Point2 w{pi * l1 / a, pi * l2 / a};
  auto inner = [&](double r)
  {
    return adaptive(
        [&](double th) {
          return m(r) * std::exp(-I * (w.x * r * std::cos(th) + w.y * r * std::sin(th))) * r;
        },
        0.0, 2.0 * pi);
  };
  return std::exp(-I * dot(w, c)) * adaptive(inner, 0.0, R) / (4.0 * a * a);
}
}  // namespace

TEST_CASE("contrast filling the whole square has a single coefficient")
{
  const double a = 1.5;
  const auto model = RefractivityModel::square({0, 0}, a, 1.0 - 0.7);
  const auto c = fourier_coeffs(model, a, 4);
  for (int l1 = -4; l1 <= 4; ++l1)
  {
    for (int l2 = -4; l2 <= 4; ++l2)
    {
      CHECK(std::abs(c(l1, l2) - (l1 == 0 && l2 == 0 ? cplx(0.7) : cplx(0.0))) < 1e-15);
    }
  }
}

TEST_CASE("disc coefficients: closed form against quadrature")
{
  const double a = 1.5, R = 1.0, m0 = -1.0;
  const DiscComponent disc{{0.0, 0.0}, R, 2.0};
  CHECK(std::abs(disc_coefficient(disc, a, 0, 0) - m0 * pi * R * R / (4 * a * a)) < 1e-15);
  for (auto [l1, l2] : {std::pair{1, 0}, std::pair{3, 2}, std::pair{-5, 7}})
  {
    const double q = pi / a * std::hypot(l1, l2);
    const cplx closed = m0 * 2.0 * pi * R / (4 * a * a) * std::cyl_bessel_j(1.0, q * R) / q;
    CHECK(std::abs(disc_coefficient(disc, a, l1, l2) - closed) < 1e-14);
    const cplx quad = polar_oracle([&](double) { return m0; }, {0, 0}, R, a, l1, l2);
    CHECK(std::abs(closed - quad) < 1e-10);
  }
  // Off-centre discs pick up the translation phase.
  const DiscComponent shifted{{0.3, -0.2}, 0.4, 3.0};
  const cplx quad = polar_oracle([&](double) { return -2.0; }, shifted.center, 0.4, a, 2, -3);
  CHECK(std::abs(disc_coefficient(shifted, a, 2, -3) - quad) < 1e-10);
}

TEST_CASE("Gaussian disc coefficients against polar quadrature")
{
  const double a = 1.5;
  const GaussianDiscComponent g{{0.0, 0.0}, 1.0, 3.0, 2.0, 4.0};
  auto m = [&](double r) { return 1.0 - (3.0 + 2.0 * std::exp(-4.0 * r * r)); };
  for (auto [l1, l2] : {std::pair{0, 0}, std::pair{1, 1}, std::pair{4, -3}, std::pair{9, 2}})
  {
    const cplx quad = polar_oracle(m, g.center, 1.0, a, l1, l2);
    CHECK(std::abs(gaussian_disc_coefficient(g, a, l1, l2) - quad) < 1e-10);
  }
  // The table path shares radial integrals between indices with equal |l|.
  const auto table = fourier_coeffs(RefractivityModel::gaussian_disc({0, 0}, 1.0), a, 6);
  CHECK(std::abs(table(3, 4) - gaussian_disc_coefficient(g, a, 3, 4)) < 1e-15);
  CHECK(std::abs(table(-5, 0) - gaussian_disc_coefficient(g, a, -5, 0)) < 1e-15);
}

TEST_CASE("square coefficients against Cartesian quadrature")
{
  const double a = 1.5;
  const SquareComponent sq{{0.1, -0.2}, 0.7, 3.0};
  for (auto [l1, l2] : {std::pair{0, 0}, std::pair{1, 0}, std::pair{2, -5}})
  {
    const Point2 w{pi * l1 / a, pi * l2 / a};
    auto inner = [&](double x)
    {
      return adaptive([&](double y) { return -2.0 * std::exp(-I * (w.x * x + w.y * y)); },
                      sq.center.y - 0.7, sq.center.y + 0.7);
    };
    const cplx quad = adaptive(inner, sq.center.x - 0.7, sq.center.x + 0.7) / (4 * a * a);
    CHECK(std::abs(square_coefficient(sq, a, l1, l2) - quad) < 1e-12);
  }
}

TEST_CASE("star coefficients against a Cartesian slice oracle")
{
  // For |x| < s the star occupies |y| < s - sqrt(s^2 - (s - |x|)^2).
  const double a = 1.5, s = 0.6;
  const StarComponent star{{0.05, 0.1}, s, 2.0};
  for (auto [l1, l2] : {std::pair{0, 0}, std::pair{1, 2}, std::pair{-7, 3}, std::pair{12, 12}})
  {
    const Point2 w{pi * l1 / a, pi * l2 / a};
    auto slice = [&](double x)
    {
      const double t = s - std::abs(x);
      const double half = s - std::sqrt(std::max(0.0, s * s - t * t));
      const double yint = std::abs(w.y) < 1e-14 ? 2.0 * half : 2.0 * std::sin(w.y * half) / w.y;
      return cplx(-1.0 * yint) * std::exp(-I * w.x * x);
    };
    const cplx quad = std::exp(-I * dot(w, star.center)) *
                      (adaptive(slice, -s, 0.0) + adaptive(slice, 0.0, s)) / (4 * a * a);
    CHECK(std::abs(star_coefficient(star, a, l1, l2) - quad) < 1e-10);
  }
}

TEST_CASE("coefficient tables are Hermitian")
{
  const double a = 1.5;
  for (const auto &model :
       {RefractivityModel::constant_disc({0.2, 0.1}, 0.8, 2.0), RefractivityModel::four_disc_star({0, 0}, 0.5, 2.0)})
  {
    const auto c = fourier_coeffs(model, a, 5);
    for (int l1 = -5; l1 <= 5; ++l1)
    {
      for (int l2 = -5; l2 <= 5; ++l2)
      {
        CHECK(std::abs(c(-l1, -l2) - std::conj(c(l1, l2))) < 1e-15);
      }
    }
  }
}

TEST_CASE("Parseval bound for the disc")
{
  const double a = 1.5, R = 1.0, m0 = -1.0;
  const auto c = fourier_coeffs(RefractivityModel::constant_disc({0, 0}, R, 2.0), a, 24);
  double sum = 0.0;
  for (const auto &v : c.data())
  {
    sum += std::norm(v);
  }
  const double bound = m0 * m0 * pi * R * R / (4 * a * a);
  CHECK(sum <= bound);
  CHECK(sum > 0.95 * bound);
}

TEST_CASE("evaluator of a constant series")
{
  CoefficientTable c(0, 1.5);
  c(0, 0) = 0.3;
  const SmoothedContrast ev(c);
  for (Point2 x : {Point2{0, 0}, Point2{1.5, -1.5}, Point2{-0.77, 0.123}})
  {
    CHECK(ev(x) == doctest::Approx(0.3).epsilon(1e-14));
  }
  CHECK_THROWS_AS(ev({1.6, 0.0}), std::out_of_range);
}

TEST_CASE("evaluator matches direct summation")
{
  const double a = 1.5;
  const auto c = fourier_coeffs(RefractivityModel::constant_disc({0, 0}, 1.0, 2.0), a, 8);
  const SmoothedContrast ev(c, 8, 10);
  CHECK(ev.max_imaginary_part() < 1e-12);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(-a, a);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k)
  {
    const Point2 x{dist(rng), dist(rng)};
    const cplx ref = direct_sum(c, x);
    CHECK(std::abs(ref.imag()) < 1e-12);
    worst = std::max(worst, std::abs(ev(x) - ref.real()));
    CHECK(std::abs(ev(x) - ev(x * -1.0)) < 1e-12);
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("smoothed disc contrast on the boundary of the square is a decaying Gibbs tail")
{
  // The disc contrast is zero on the boundary; what remains there is the truncation tail,
  // which for a jump at distance d behaves like 1 / (F d).
  const double a = 1.5;
  const auto model = RefractivityModel::constant_disc({0, 0}, 1.0, 2.0);
  double prev = 0.0;
  for (int F : {16, 32, 64})
  {
    const SmoothedContrast ev(fourier_coeffs(model, a, F));
    double worst = 0.0;
    for (int k = 0; k <= 100; ++k)
    {
      const double t = -a + 2.0 * a * k / 100.0;
      worst = std::max({worst, std::abs(ev({t, a})), std::abs(ev({a, t}))});
    }
    CHECK(worst <= 2.5 * a / (pi * pi * F * (a - 1.0)));
    if (prev > 0.0)
    {
      CHECK(worst < 0.7 * prev);
    }
    prev = worst;
  }
}

TEST_CASE("Gibbs oscillation of the smoothed disc decays away from the interface")
{
  // Away from the jump the truncation error behaves like 1 / (F d): doubling F halves it.
  const double a = 1.5, R = 1.0;
  const auto model = RefractivityModel::constant_disc({0, 0}, R, 2.0);
  double prev = 0.0;
  for (int F : {16, 32, 64})
  {
    const SmoothedContrast ev(fourier_coeffs(model, a, F));
    double far = 0.0;
    for (int i = 0; i <= 120; ++i)
    {
      for (int j = 0; j <= 120; ++j)
      {
        const Point2 x{-a + 2.0 * a * i / 120.0, -a + 2.0 * a * j / 120.0};
        if (std::abs(norm(x) - R) > 0.25)
        {
          far = std::max(far, std::abs(ev(x) - model.contrast(x)));
        }
      }
    }
    CHECK(far * F * 0.25 < 0.35);
    if (prev > 0.0)
    {
      CHECK(far < 0.65 * prev);
    }
    prev = far;
  }
}

TEST_CASE("coefficient cache round trip")
{
  const auto dir = std::filesystem::temp_directory_path() / "hybridscat-cache-test";
  std::filesystem::remove_all(dir);
  const auto model = RefractivityModel::constant_disc({0, 0}, 1.0, 2.0);
  const auto first = cached_fourier_coeffs(model, 1.5, 6, dir);
  const auto path = cache_path(dir, model, 6, 1.5);
  CHECK(std::filesystem::exists(path));
  const auto again = cached_fourier_coeffs(model, 1.5, 6, dir);
  CHECK(std::equal(first.data().begin(), first.data().end(), again.data().begin()));
  const auto loaded = load_coefficients(path);
  CHECK(loaded.order() == 6);
  CHECK(loaded.half_width() == 1.5);
  CHECK(cache_path(dir, model, 7, 1.5) != path);
  std::filesystem::remove_all(dir);
}
