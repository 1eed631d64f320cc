#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "hybridscat/config.hpp"
#include "hybridscat/types.hpp"

namespace hybridscat::fourier
{

//
// Fourier coefficients c_{l1,l2}, |l1|, |l2| <= F, of the contrast on the periodic square
// (-a, a)^2. Storage is row-major with l1 as the slow index.
//
class CoefficientTable
{
public:
  CoefficientTable() = default;
  CoefficientTable(int order, double half_width);

  int order() const { return order_; }
  double half_width() const { return half_width_; }
  int side() const { return 2 * order_ + 1; }

  cplx &operator()(int l1, int l2) { return data_[index(l1, l2)]; }
  const cplx &operator()(int l1, int l2) const { return data_[index(l1, l2)]; }

  std::span<const cplx> data() const { return data_; }
  std::span<cplx> data() { return data_; }

private:
  std::size_t index(int l1, int l2) const
  {
    return static_cast<std::size_t>(l1 + order_) * side() + (l2 + order_);
  }

  int order_ = 0;
  double half_width_ = 1.0;
  std::vector<cplx> data_;
};

// Coefficients of single components, contrast value m0 = 1 - n^2 where constant.
cplx disc_coefficient(const DiscComponent &disc, double half_width, int l1, int l2);
cplx square_coefficient(const SquareComponent &square, double half_width, int l1, int l2);
cplx gaussian_disc_coefficient(const GaussianDiscComponent &g, double half_width, int l1,
                               int l2);
cplx star_coefficient(const StarComponent &star, double half_width, int l1, int l2);

// Throws std::runtime_error when an adaptive quadrature misses its tolerance.
CoefficientTable fourier_coeffs(const RefractivityModel &model, double half_width, int order);

// Direct O(F^2) summation of the truncated series (reference evaluation).
cplx direct_sum(const CoefficientTable &table, Point2 x);

// Binary cache: int64 F, double a, then (2F+1)^2 row-major complex doubles.
void save_coefficients(const CoefficientTable &table, const std::filesystem::path &path);
CoefficientTable load_coefficients(const std::filesystem::path &path);
std::filesystem::path cache_path(const std::filesystem::path &dir, const RefractivityModel &model,
                                 int order, double half_width);

// Loads from / stores to cache_dir when given; computes otherwise.
CoefficientTable cached_fourier_coeffs(const RefractivityModel &model, double half_width,
                                       int order,
                                       const std::optional<std::filesystem::path> &cache_dir);

//
// Evaluator of the truncated series m^F: the series is sampled on a fine equispaced grid by
// a zero-padded inverse FFT, then interpolated with local tensor Lagrange polynomials.
//
class SmoothedContrast
{
public:
  SmoothedContrast(const CoefficientTable &coeffs, int pad_factor = 8, int degree = 10);

  // Throws std::out_of_range outside the closed square.
  double operator()(Point2 x) const;

  int grid_size() const { return grid_; }
  int degree() const { return degree_; }
  double max_imaginary_part() const { return max_imag_; }

private:
  void weights(double s, int &first, std::span<double> w) const;

  double half_width_;
  int grid_;
  int degree_;
  double spacing_;
  double max_imag_ = 0.0;
  std::vector<double> values_;  // grid_ x grid_, x index slow
};

}  // namespace hybridscat::fourier
