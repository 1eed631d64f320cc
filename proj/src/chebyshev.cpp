#include "hybridscat/chebyshev.hpp"

#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace hybridscat::cheb
{

namespace
{
// FFTW planning is not thread-safe; execution is.
std::mutex &planner_mutex()
{
  static std::mutex m;
  return m;
}
}  // namespace

Grid1D make_grid(int order, double lo, double hi)
{
  if (order < 1)
  {
    throw std::invalid_argument("Chebyshev grid order must be at least 1");
  }
  Grid1D g{order, lo, hi, std::vector<double>(order + 1)};
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (int l = 0; l <= order; ++l)
  {
    g.nodes[l] = mid + half * std::cos(pi * l / order);
  }
  // Exact endpoints and a symmetric middle.
  g.nodes[0] = hi;
  g.nodes[order] = lo;
  if (order % 2 == 0)
  {
    g.nodes[order / 2] = mid;
  }
  return g;
}

Eigen::MatrixXd diff_matrix(const Grid1D &grid)
{
  const int n = grid.order;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n + 1, n + 1);
  auto c = [n](int i) { return (i == 0 || i == n) ? 2.0 : 1.0; };
  for (int i = 0; i <= n; ++i)
  {
    for (int j = 0; j <= n; ++j)
    {
      if (i == j)
      {
        continue;
      }
      // x_i - x_j = 2 sin(pi (i+j) / 2n) sin(pi (j-i) / 2n), free of cancellation.
      const double diff =
          2.0 * std::sin(pi * (i + j) / (2.0 * n)) * std::sin(pi * (j - i) / (2.0 * n));
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      D(i, j) = c(i) / c(j) * sign / diff;
    }
  }
  // Negative-sum trick: rows annihilate constants exactly.
  for (int i = 0; i <= n; ++i)
  {
    double s = 0.0;
    for (int j = 0; j <= n; ++j)
    {
      if (j != i)
      {
        s += D(i, j);
      }
    }
    D(i, i) = -s;
  }
  return D * (2.0 / (grid.hi - grid.lo));
}

Eigen::MatrixXd diff_matrix_increasing(int order, double lo, double hi)
{
  const Eigen::MatrixXd D = diff_matrix(make_grid(order, lo, hi));
  return D.reverse();
}

struct Transform::Plan
{
  fftw_plan plan = nullptr;
};

Transform::Transform(int order) : order_(order), plan_(std::make_unique<Plan>())
{
  if (order < 1)
  {
    throw std::invalid_argument("Chebyshev transform order must be at least 1");
  }
  std::lock_guard lock(planner_mutex());
  double *in = fftw_alloc_real(order + 1);
  double *out = fftw_alloc_real(order + 1);
  plan_->plan = fftw_plan_r2r_1d(order + 1, in, out, FFTW_REDFT00,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(in);
  fftw_free(out);
}

Transform::~Transform()
{
  if (plan_ && plan_->plan)
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_->plan);
  }
}

Transform::Transform(Transform &&) noexcept = default;
Transform &Transform::operator=(Transform &&) noexcept = default;

void Transform::coeffs(std::span<const cplx> values, std::span<cplx> coeffs) const
{
  const int n = order_;
  if (static_cast<int>(values.size()) != n + 1 || static_cast<int>(coeffs.size()) != n + 1)
  {
    throw std::invalid_argument("Chebyshev transform: size mismatch");
  }
  std::vector<double> buf(4 * (n + 1));
  double *re_in = buf.data();
  double *im_in = re_in + (n + 1);
  double *re_out = im_in + (n + 1);
  double *im_out = re_out + (n + 1);
  for (int l = 0; l <= n; ++l)
  {
    re_in[l] = values[l].real();
    im_in[l] = values[l].imag();
  }
  fftw_execute_r2r(plan_->plan, re_in, re_out);
  fftw_execute_r2r(plan_->plan, im_in, im_out);
  for (int k = 0; k <= n; ++k)
  {
    const double scale = (k == 0 || k == n) ? 0.5 / n : 1.0 / n;
    coeffs[k] = cplx(re_out[k], im_out[k]) * scale;
  }
}

std::vector<cplx> cheb_coeffs(std::span<const cplx> values)
{
  if (values.size() < 2)
  {
    return {values.begin(), values.end()};
  }
  Transform t(static_cast<int>(values.size()) - 1);
  std::vector<cplx> out(values.size());
  t.coeffs(values, out);
  return out;
}

std::vector<double> cheb_coeffs(std::span<const double> values)
{
  std::vector<cplx> v(values.begin(), values.end());
  const auto c = cheb_coeffs(std::span<const cplx>(v));
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
  {
    out[i] = c[i].real();
  }
  return out;
}

std::vector<double> cheb_values(std::span<const double> coeffs)
{
  const int n = static_cast<int>(coeffs.size()) - 1;
  std::vector<double> out(coeffs.size());
  for (int l = 0; l <= n; ++l)
  {
    out[l] = clenshaw(coeffs, n > 0 ? std::cos(pi * l / n) : 1.0);
  }
  return out;
}

double clenshaw(std::span<const double> coeffs, double t)
{
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;)
  {
    const double b0 = coeffs[k] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs.empty() ? 0.0 : coeffs[0] + t * b1 - b2;
}

cplx clenshaw(std::span<const cplx> coeffs, double t)
{
  cplx b1 = 0.0, b2 = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;)
  {
    const cplx b0 = coeffs[k] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs.empty() ? cplx(0.0) : coeffs[0] + t * b1 - b2;
}

ClenshawCurtisRule clenshaw_curtis(int n)
{
  if (n < 1)
  {
    throw std::invalid_argument("Clenshaw-Curtis order must be at least 1");
  }
  ClenshawCurtisRule rule;
  rule.nodes.resize(n + 1);
  rule.weights.assign(n + 1, 0.0);
  for (int j = 0; j <= n; ++j)
  {
    rule.nodes[j] = std::cos(pi * j / n);
  }
  rule.nodes[0] = 1.0;
  rule.nodes[n] = -1.0;
  if (n % 2 == 0)
  {
    rule.nodes[n / 2] = 0.0;
  }

  const double nn = static_cast<double>(n) * n;
  const double end = (n % 2 == 0) ? 1.0 / (nn - 1.0) : 1.0 / nn;
  rule.weights[0] = rule.weights[n] = end;
  for (int j = 1; j < n; ++j)
  {
    const double theta = pi * j / n;
    double v = 1.0;
    if (n % 2 == 0)
    {
      for (int k = 1; k < n / 2; ++k)
      {
        v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
      }
      v -= std::cos(n * theta) / (nn - 1.0);
    }
    else
    {
      for (int k = 1; k <= (n - 1) / 2; ++k)
      {
        v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
      }
    }
    rule.weights[j] = 2.0 * v / n;
  }
  return rule;
}

std::vector<double> lobatto_barycentric_weights(int order)
{
  std::vector<double> w(order + 1);
  for (int j = 0; j <= order; ++j)
  {
    w[j] = (j % 2 == 0) ? 1.0 : -1.0;
  }
  w[0] *= 0.5;
  w[order] *= 0.5;
  return w;
}

void lagrange_basis(std::span<const double> nodes, std::span<const double> bary, double t,
                    std::span<double> out)
{
  const std::size_t n = nodes.size();
  for (std::size_t j = 0; j < n; ++j)
  {
    if (t == nodes[j])
    {
      std::fill(out.begin(), out.end(), 0.0);
      out[j] = 1.0;
      return;
    }
  }
  double denom = 0.0;
  for (std::size_t j = 0; j < n; ++j)
  {
    out[j] = bary[j] / (t - nodes[j]);
    denom += out[j];
  }
  for (std::size_t j = 0; j < n; ++j)
  {
    out[j] /= denom;
  }
}

}  // namespace hybridscat::cheb
