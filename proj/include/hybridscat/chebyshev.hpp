#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hybridscat/types.hpp"

namespace hybridscat::cheb
{

// Chebyshev-Lobatto grid of order n on [lo, hi] in cosine ordering:
// nodes[l] = mid + half * cos(pi l / n), so nodes[0] = hi and nodes[n] = lo.
struct Grid1D
{
  int order = 0;
  double lo = -1.0;
  double hi = 1.0;
  std::vector<double> nodes;
};

Grid1D make_grid(int order, double lo = -1.0, double hi = 1.0);

// Dense (n+1)x(n+1) differentiation matrix on the grid, in the grid's node order.
Eigen::MatrixXd diff_matrix(const Grid1D &grid);

// Same matrix with nodes relabelled in increasing order (index i <-> node n - i).
Eigen::MatrixXd diff_matrix_increasing(int order, double lo, double hi);

// Chebyshev coefficients c_l of sum c_l T_l interpolating samples taken in cosine order.
// Uses a DCT-I (FFTW REDFT00).
std::vector<double> cheb_coeffs(std::span<const double> values);
std::vector<cplx> cheb_coeffs(std::span<const cplx> values);

// Inverse of cheb_coeffs: samples in cosine order.
std::vector<double> cheb_values(std::span<const double> coeffs);

double clenshaw(std::span<const double> coeffs, double t);
cplx clenshaw(std::span<const cplx> coeffs, double t);

//
// Reusable DCT-I transform of fixed order. FFTW plans are created once and executed on
// caller-provided buffers, so one instance may be shared by concurrent callers.
//
class Transform
{
public:
  explicit Transform(int order);
  ~Transform();
  Transform(const Transform &) = delete;
  Transform &operator=(const Transform &) = delete;
  Transform(Transform &&) noexcept;
  Transform &operator=(Transform &&) noexcept;

  int order() const { return order_; }

  // values.size() == coeffs.size() == order + 1, cosine ordering.
  void coeffs(std::span<const cplx> values, std::span<cplx> coeffs) const;

private:
  struct Plan;
  int order_;
  std::unique_ptr<Plan> plan_;
};

struct ClenshawCurtisRule
{
  std::vector<double> nodes;  // cos(pi j / n), j = 0..n
  std::vector<double> weights;
};

// Rule on [-1, 1]; exact for polynomials of degree <= n. Any n >= 1 is accepted.
ClenshawCurtisRule clenshaw_curtis(int n);

// Barycentric interpolation weights for a Chebyshev-Lobatto grid (cosine or reversed order).
std::vector<double> lobatto_barycentric_weights(int order);

// Values of the Lagrange basis of the given nodes at t (barycentric formula).
void lagrange_basis(std::span<const double> nodes, std::span<const double> bary, double t,
                    std::span<double> out);

}  // namespace hybridscat::cheb
