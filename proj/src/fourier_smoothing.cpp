#include "hybridscat/fourier_smoothing.hpp"

#include <cstdio>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <fftw3.h>

namespace hybridscat::fourier
{

namespace
{

std::mutex &planner_mutex()
{
  static std::mutex m;
  return m;
}

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

using Gauss20 = boost::math::quadrature::gauss<double, 20>;

// Composite 20-point Gauss-Legendre over [lo, hi] split into `panels` pieces.
template <class Fn>
auto composite_gauss(Fn &&f, double lo, double hi, int panels)
{
  using R = decltype(f(lo));
  R sum{};
  const double w = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p)
  {
    sum += Gauss20::integrate(f, lo + p * w, lo + (p + 1) * w);
  }
  return sum;
}

Point2 frequency(double a, int l1, int l2) { return {pi * l1 / a, pi * l2 / a}; }

// int_{-s}^{s} exp(-i w t) dt
double sinc_integral(double w, double s)
{
  if (std::abs(w * s) < 1e-8)
  {
    return 2.0 * s * (1.0 - (w * s) * (w * s) / 6.0);
  }
  return 2.0 * std::sin(w * s) / w;
}

// int_0^s exp(-i beta r) r dr
cplx radial_moment(double beta, double s)
{
  const double z = beta * s;
  if (std::abs(z) < 1e-3)
  {
    const double s2 = s * s;
    return s2 * (0.5 - I * z / 3.0 - z * z / 8.0 + I * z * z * z / 30.0 + z * z * z * z / 144.0);
  }
  return (std::exp(-I * z) * (1.0 + I * z) - 1.0) / (beta * beta);
}

// Integral of exp(-i w . x) over the quarter of the disc |x - corner| < s whose polar angle
// lies in [theta0, theta0 + pi/2]; panels are doubled until successive sums agree.
cplx quarter_disc(Point2 w, Point2 corner, double s, double theta0)
{
  auto f = [&](double theta)
  {
    const double beta = w.x * std::cos(theta) + w.y * std::sin(theta);
    return radial_moment(beta, s);
  };
  const double t1 = theta0 + 0.5 * pi;
  int panels = static_cast<int>(std::ceil(norm(w) * s / 4.0)) + 1;
  cplx prev = composite_gauss(f, theta0, t1, panels);
  constexpr int budget = 1 << 14;
  for (;;)
  {
    panels *= 2;
    if (panels > budget)
    {
      throw std::runtime_error("fourier_coeffs: quadrature did not converge within budget");
    }
    const cplx next = composite_gauss(f, theta0, t1, panels);
    if (std::abs(next - prev) <= 1e-14 * s * s + 1e-13 * std::abs(next))
    {
      return std::exp(-I * dot(w, corner)) * next;
    }
    prev = next;
  }
}

}  // namespace

CoefficientTable::CoefficientTable(int order, double half_width)
    : order_(order), half_width_(half_width),
      data_(static_cast<std::size_t>(2 * order + 1) * (2 * order + 1), cplx(0.0))
{
  if (order < 0 || !(half_width > 0.0))
  {
    throw std::invalid_argument("CoefficientTable: F >= 0 and a > 0 required");
  }
}

cplx disc_coefficient(const DiscComponent &disc, double a, int l1, int l2)
{
  const double m0 = 1.0 - disc.n2;
  const Point2 w = frequency(a, l1, l2);
  const double q = norm(w);
  const double R = disc.radius;
  const double radial = (q == 0.0) ? pi * R * R
                                   : 2.0 * pi * R * boost::math::cyl_bessel_j(1, q * R) / q;
  return m0 * std::exp(-I * dot(w, disc.center)) * radial / (4.0 * a * a);
}

cplx square_coefficient(const SquareComponent &square, double a, int l1, int l2)
{
  const double m0 = 1.0 - square.n2;
  const Point2 w = frequency(a, l1, l2);
  const double s = square.half_side;
  return m0 * std::exp(-I * dot(w, square.center)) * sinc_integral(w.x, s) *
         sinc_integral(w.y, s) / (4.0 * a * a);
}

namespace
{
// 2 pi int_0^R m(r) J0(q r) r dr for the Gaussian profile.
double gaussian_radial(const GaussianDiscComponent &g, double q)
{
  const double R = g.radius;
  const double m_const = 1.0 - g.base;
  if (q == 0.0)
  {
    return 2.0 * pi *
           (0.5 * m_const * R * R -
            g.amplitude * (1.0 - std::exp(-g.decay * R * R)) / (2.0 * g.decay));
  }
  const double flat = m_const * R * boost::math::cyl_bessel_j(1, q * R) / q;
  auto f = [&](double r)
  { return std::exp(-g.decay * r * r) * boost::math::cyl_bessel_j(0, q * r) * r; };
  const int panels = static_cast<int>(std::ceil(q * R / 2.0)) + 2;
  return 2.0 * pi * (flat - g.amplitude * composite_gauss(f, 0.0, R, panels));
}
}  // namespace

cplx gaussian_disc_coefficient(const GaussianDiscComponent &g, double a, int l1, int l2)
{
  const Point2 w = frequency(a, l1, l2);
  return std::exp(-I * dot(w, g.center)) * gaussian_radial(g, norm(w)) / (4.0 * a * a);
}

cplx star_coefficient(const StarComponent &star, double a, int l1, int l2)
{
  const double m0 = 1.0 - star.n2;
  const Point2 w = frequency(a, l1, l2);
  const double s = star.scale;
  cplx total = std::exp(-I * dot(w, star.center)) * sinc_integral(w.x, s) * sinc_integral(w.y, s);
  // Quarter discs at the corners, each opening towards the centre.
  struct Corner
  {
    double sx, sy, theta0;
  };
  for (const Corner c : {Corner{1, 1, pi}, Corner{-1, 1, 1.5 * pi}, Corner{-1, -1, 0.0},
                         Corner{1, -1, 0.5 * pi}})
  {
    const Point2 corner = star.center + Point2{c.sx * s, c.sy * s};
    total -= quarter_disc(w, corner, s, c.theta0);
  }
  return m0 * total / (4.0 * a * a);
}

CoefficientTable fourier_coeffs(const RefractivityModel &model, double a, int order)
{
  CoefficientTable table(order, a);
  std::vector<std::unordered_map<int, double>> radial_cache(model.components().size());
  auto coefficient = [&](int l1, int l2)
  {
    cplx c = 0.0;
    for (std::size_t k = 0; k < model.components().size(); ++k)
    {
      c += std::visit(
          overloaded{
              [&](const DiscComponent &d) { return disc_coefficient(d, a, l1, l2); },
              [&](const SquareComponent &s) { return square_coefficient(s, a, l1, l2); },
              [&](const StarComponent &s) { return star_coefficient(s, a, l1, l2); },
              [&](const GaussianDiscComponent &g)
              {
                // The radial integral depends on l1^2 + l2^2 only.
                auto &cache = radial_cache[k];
                const int key = l1 * l1 + l2 * l2;
                auto it = cache.find(key);
                if (it == cache.end())
                {
                  it = cache.emplace(key, gaussian_radial(g, pi * std::sqrt(double(key)) / a))
                           .first;
                }
                const Point2 w = frequency(a, l1, l2);
                return cplx(std::exp(-I * dot(w, g.center)) * it->second / (4.0 * a * a));
              },
          },
          model.components()[k]);
    }
    return c;
  };
  // m is real, so c_{-l} = conj(c_l).
  for (int l1 = 0; l1 <= order; ++l1)
  {
    for (int l2 = (l1 == 0 ? 0 : -order); l2 <= order; ++l2)
    {
      const cplx c = coefficient(l1, l2);
      table(l1, l2) = c;
      table(-l1, -l2) = std::conj(c);
    }
  }
  table(0, 0) = table(0, 0).real();
  return table;
}

cplx direct_sum(const CoefficientTable &table, Point2 x)
{
  const int F = table.order();
  const double a = table.half_width();
  std::vector<cplx> ey(2 * F + 1);
  for (int l2 = -F; l2 <= F; ++l2)
  {
    ey[l2 + F] = std::exp(I * (pi * l2 * x.y / a));
  }
  cplx sum = 0.0;
  for (int l1 = -F; l1 <= F; ++l1)
  {
    cplx row = 0.0;
    for (int l2 = -F; l2 <= F; ++l2)
    {
      row += table(l1, l2) * ey[l2 + F];
    }
    sum += row * std::exp(I * (pi * l1 * x.x / a));
  }
  return sum;
}

void save_coefficients(const CoefficientTable &table, const std::filesystem::path &path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw std::runtime_error("cannot write coefficient cache " + path.string());
  }
  const std::int64_t F = table.order();
  const double a = table.half_width();
  out.write(reinterpret_cast<const char *>(&F), sizeof F);
  out.write(reinterpret_cast<const char *>(&a), sizeof a);
  out.write(reinterpret_cast<const char *>(table.data().data()),
            static_cast<std::streamsize>(table.data().size() * sizeof(cplx)));
}

CoefficientTable load_coefficients(const std::filesystem::path &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw std::runtime_error("cannot read coefficient cache " + path.string());
  }
  std::int64_t F = 0;
  double a = 0.0;
  in.read(reinterpret_cast<char *>(&F), sizeof F);
  in.read(reinterpret_cast<char *>(&a), sizeof a);
  if (!in || F < 0 || F > 100000 || !(a > 0.0))
  {
    throw std::runtime_error("corrupt coefficient cache " + path.string());
  }
  CoefficientTable table(static_cast<int>(F), a);
  in.read(reinterpret_cast<char *>(table.data().data()),
          static_cast<std::streamsize>(table.data().size() * sizeof(cplx)));
  if (!in)
  {
    throw std::runtime_error("truncated coefficient cache " + path.string());
  }
  return table;
}

std::filesystem::path cache_path(const std::filesystem::path &dir, const RefractivityModel &model,
                                 int order, double a)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "|F=%d|a=%.17g", order, a);
  return dir / ("fourier-" + hex_hash(fnv1a(model.canonical() + buf)) + ".bin");
}

CoefficientTable cached_fourier_coeffs(const RefractivityModel &model, double a, int order,
                                       const std::optional<std::filesystem::path> &cache_dir)
{
  if (!cache_dir)
  {
    return fourier_coeffs(model, a, order);
  }
  const auto path = cache_path(*cache_dir, model, order, a);
  if (std::filesystem::exists(path))
  {
    auto table = load_coefficients(path);
    if (table.order() == order && table.half_width() == a)
    {
      return table;
    }
  }
  auto table = fourier_coeffs(model, a, order);
  std::filesystem::create_directories(*cache_dir);
  save_coefficients(table, path);
  return table;
}

SmoothedContrast::SmoothedContrast(const CoefficientTable &coeffs, int pad_factor, int degree)
    : half_width_(coeffs.half_width()), grid_(pad_factor * coeffs.side()), degree_(degree)
{
  if (pad_factor < 1 || degree < 1)
  {
    throw std::invalid_argument("SmoothedContrast: pad_factor and degree must be positive");
  }
  if (degree_ + 1 > grid_)
  {
    degree_ = grid_ - 1;
  }
  spacing_ = 2.0 * half_width_ / grid_;
  const int M = grid_;
  const int F = coeffs.order();
  const std::size_t total = static_cast<std::size_t>(M) * M;

  fftw_complex *buf = fftw_alloc_complex(total);
  if (buf == nullptr)
  {
    throw std::bad_alloc();
  }
  auto *A = reinterpret_cast<cplx *>(buf);
  std::fill(A, A + total, cplx(0.0));
  // Sample points x_j = -a + j h: exp(i pi l x_j / a) = (-1)^l exp(2 pi i l j / M).
  for (int l1 = -F; l1 <= F; ++l1)
  {
    const int j1 = ((l1 % M) + M) % M;
    for (int l2 = -F; l2 <= F; ++l2)
    {
      const int j2 = ((l2 % M) + M) % M;
      const double sign = ((l1 + l2) % 2 == 0) ? 1.0 : -1.0;
      A[static_cast<std::size_t>(j1) * M + j2] += sign * coeffs(l1, l2);
    }
  }
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_2d(M, M, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  values_.resize(total);
  for (std::size_t i = 0; i < total; ++i)
  {
    values_[i] = A[i].real();
    max_imag_ = std::max(max_imag_, std::abs(A[i].imag()));
  }
  fftw_free(buf);
}

void SmoothedContrast::weights(double s, int &first, std::span<double> w) const
{
  const int d = degree_;
  first = (d % 2 == 0) ? static_cast<int>(std::lround(s)) - d / 2
                       : static_cast<int>(std::floor(s)) - (d - 1) / 2;
  const double t = s - first;
  for (int i = 0; i <= d; ++i)
  {
    double v = 1.0;
    for (int j = 0; j <= d; ++j)
    {
      if (j != i)
      {
        v *= (t - j) / static_cast<double>(i - j);
      }
    }
    w[i] = v;
  }
}

double SmoothedContrast::operator()(Point2 x) const
{
  const double tol = 1e-12 * half_width_;
  if (!(std::abs(x.x) <= half_width_ + tol) || !(std::abs(x.y) <= half_width_ + tol))
  {
    throw std::out_of_range("SmoothedContrast: point outside the computational square");
  }
  constexpr int max_points = 32;
  double wx[max_points], wy[max_points];
  const int np = degree_ + 1;
  if (np > max_points)
  {
    throw std::invalid_argument("SmoothedContrast: interpolation degree too large");
  }
  int fx = 0, fy = 0;
  weights((x.x + half_width_) / spacing_, fx, std::span<double>(wx, np));
  weights((x.y + half_width_) / spacing_, fy, std::span<double>(wy, np));
  const int M = grid_;
  double sum = 0.0;
  for (int i = 0; i < np; ++i)
  {
    const int jx = (((fx + i) % M) + M) % M;
    const double *row = values_.data() + static_cast<std::size_t>(jx) * M;
    double r = 0.0;
    for (int k = 0; k < np; ++k)
    {
      const int jy = (((fy + k) % M) + M) % M;
      r += wy[k] * row[jy];
    }
    sum += wx[i] * r;
  }
  return sum;
}

}  // namespace hybridscat::fourier
