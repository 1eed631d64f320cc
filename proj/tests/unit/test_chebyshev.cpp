#include <doctest.h>

#include <algorithm>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "hybridscat/chebyshev.hpp"

using namespace hybridscat;

TEST_CASE("grid nodes are decreasing and include the endpoints")
{
  const auto g = cheb::make_grid(9, -0.5, 2.0);
  CHECK(g.nodes.front() == 2.0);
  CHECK(g.nodes.back() == -0.5);
  for (int l = 0; l < 9; ++l)
  {
    CHECK(g.nodes[l] > g.nodes[l + 1]);
  }
  // Reflection of the interval reflects the nodes.
  const auto r = cheb::make_grid(9, -2.0, 0.5);
  for (int l = 0; l <= 9; ++l)
  {
    CHECK(r.nodes[l] == doctest::Approx(-g.nodes[9 - l]).epsilon(1e-15));
  }
}

TEST_CASE("differentiation matrix on constants and the identity")
{
  for (int n : {1, 4, 11, 32})
  {
    const auto g = cheb::make_grid(n, -1.3, 0.7);
    const Eigen::MatrixXd D = cheb::diff_matrix(g);
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(g.nodes.data(), n + 1);
    CHECK((D * Eigen::VectorXd::Ones(n + 1)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((D * x - Eigen::VectorXd::Ones(n + 1)).cwiseAbs().maxCoeff() < 1e-12 * n * n);
  }
}

TEST_CASE("derivative of T5 on a 16th order grid")
{
  const auto g = cheb::make_grid(16);
  const Eigen::MatrixXd D = cheb::diff_matrix(g);
  Eigen::VectorXd f(17), df(17);
  for (int l = 0; l <= 16; ++l)
  {
    const double x = g.nodes[l];
    f[l] = std::cos(5.0 * std::acos(std::clamp(x, -1.0, 1.0)));
    // T5' = 5 U4, U4 = 16x^4 - 12x^2 + 1
    df[l] = 5.0 * (16.0 * std::pow(x, 4) - 12.0 * x * x + 1.0);
  }
  CHECK((D * f - df).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("increasing-order matrix is the reversed one")
{
  const Eigen::MatrixXd D = cheb::diff_matrix_increasing(6, 0.0, 1.0);
  Eigen::VectorXd x(7);
  for (int i = 0; i <= 6; ++i)
  {
    x[i] = 0.5 - 0.5 * std::cos(pi * i / 6.0);
  }
  CHECK((D * x.array().square().matrix() - 2.0 * x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tensor Laplacian annihilates bilinear functions")
{
  const int n = 10;
  const auto g = cheb::make_grid(n);
  const Eigen::MatrixXd D = cheb::diff_matrix(g);
  const Eigen::MatrixXd D2 = D * D;
  const Eigen::MatrixXd Id = Eigen::MatrixXd::Identity(n + 1, n + 1);
  Eigen::MatrixXd lap = Eigen::kroneckerProduct(D2, Id);
  lap += Eigen::kroneckerProduct(Id, D2);
  Eigen::VectorXd u((n + 1) * (n + 1));
  for (int i = 0; i <= n; ++i)
  {
    for (int j = 0; j <= n; ++j)
    {
      u[i * (n + 1) + j] = 2.0 * g.nodes[i] - 3.0 * g.nodes[j] + 0.5 * g.nodes[i] * g.nodes[j] + 1.0;
    }
  }
  CHECK((lap * u).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("Chebyshev coefficients of simple samples")
{
  const int n = 12;
  std::vector<double> t3(n + 1), one(n + 1, 1.0);
  for (int l = 0; l <= n; ++l)
  {
    t3[l] = std::cos(3.0 * pi * l / n);
  }
  const auto c3 = cheb::cheb_coeffs(t3);
  const auto c1 = cheb::cheb_coeffs(one);
  for (int k = 0; k <= n; ++k)
  {
    CHECK(c3[k] == doctest::Approx(k == 3 ? 1.0 : 0.0).epsilon(1e-14).scale(1.0));
    CHECK(c1[k] == doctest::Approx(k == 0 ? 1.0 : 0.0).epsilon(1e-14).scale(1.0));
  }
}

TEST_CASE("Chebyshev coefficients of exp against a direct cosine sum")
{
  const int n = 20;
  std::vector<double> v(n + 1);
  for (int l = 0; l <= n; ++l)
  {
    v[l] = std::exp(std::cos(pi * l / n));
  }
  const auto c = cheb::cheb_coeffs(v);
  for (int k = 0; k <= n; ++k)
  {
    double s = 0.0;
    for (int l = 0; l <= n; ++l)
    {
      const double w = (l == 0 || l == n) ? 0.5 : 1.0;
      s += w * v[l] * std::cos(pi * k * l / n);
    }
    s *= 2.0 / n;
    if (k == 0 || k == n)
    {
      s *= 0.5;
    }
    CHECK(std::abs(c[k] - s) < 1e-13);
  }
  const auto back = cheb::cheb_values(c);
  for (int l = 0; l <= n; ++l)
  {
    CHECK(std::abs(back[l] - v[l]) < 1e-13);
  }
}

TEST_CASE("complex transform matches the real one componentwise")
{
  const int n = 15;
  std::vector<cplx> v(n + 1);
  for (int l = 0; l <= n; ++l)
  {
    const double x = std::cos(pi * l / n);
    v[l] = {std::sin(2.0 * x), x * x};
  }
  cheb::Transform tr(n);
  std::vector<cplx> c(n + 1);
  tr.coeffs(v, c);
  for (int l = 0; l <= n; ++l)
  {
    CHECK(std::abs(cheb::clenshaw(std::span<const cplx>(c), std::cos(pi * l / n)) - v[l]) < 1e-13);
  }
}

TEST_CASE("Clenshaw-Curtis rule")
{
  for (int n : {2, 3, 8, 20, 21})
  {
    const auto r = cheb::clenshaw_curtis(n);
    double s = 0.0, s2 = 0.0;
    for (int j = 0; j <= n; ++j)
    {
      CHECK(r.weights[j] > 0.0);
      s += r.weights[j];
      s2 += r.weights[j] * r.nodes[j] * r.nodes[j];
    }
    CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(s2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  }
  const auto r = cheb::clenshaw_curtis(20);
  double e = 0.0;
  for (int j = 0; j <= 20; ++j)
  {
    e += r.weights[j] * std::exp(r.nodes[j]);
  }
  CHECK(std::abs(e - (std::exp(1.0) - std::exp(-1.0))) < 1e-12);
  // Exact up to degree n.
  const auto r7 = cheb::clenshaw_curtis(7);
  double p = 0.0;
  for (int j = 0; j <= 7; ++j)
  {
    p += r7.weights[j] * std::pow(r7.nodes[j], 6);
  }
  CHECK(p == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
}

TEST_CASE("Runge function interpolation converges geometrically")
{
  auto f = [](double x) { return 1.0 / (1.0 + 16.0 * x * x); };
  double prev = 1.0;
  for (int n : {8, 16, 32, 64, 128})
  {
    std::vector<double> v(n + 1);
    for (int l = 0; l <= n; ++l)
    {
      v[l] = f(std::cos(pi * l / n));
    }
    const auto c = cheb::cheb_coeffs(v);
    double err = 0.0;
    for (int k = 0; k < 1000; ++k)
    {
      const double x = -1.0 + 2.0 * k / 999.0;
      err = std::max(err, std::abs(cheb::clenshaw(std::span<const double>(c), x) - f(x)));
    }
    // Bernstein ellipse parameter rho = 1/4 + sqrt(1 + 1/16): error ~ rho^{-n}
    if (n <= 64)
    {
      CHECK(err < prev * 0.3);
    }
    else
    {
      CHECK(err < 1e-13);
    }
    prev = err;
  }
}

TEST_CASE("Lagrange basis reproduces polynomials on Lobatto nodes")
{
  const int n = 7;
  std::vector<double> nodes(n + 1);
  for (int j = 0; j <= n; ++j)
  {
    nodes[j] = std::cos(pi * j / n);
  }
  const auto bary = cheb::lobatto_barycentric_weights(n);
  std::vector<double> w(n + 1);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int k = 0; k < 20; ++k)
  {
    const double t = dist(rng);
    cheb::lagrange_basis(nodes, bary, t, w);
    double s = 0.0;
    for (int j = 0; j <= n; ++j)
    {
      s += w[j] * std::pow(nodes[j], 5);
    }
    CHECK(s == doctest::Approx(std::pow(t, 5)).epsilon(1e-13).scale(1.0));
  }
}
