#pragma once

#include <memory>

#include <Eigen/SparseCore>

#include "hybridscat/types.hpp"

namespace hybridscat
{

using SparseMatrixC = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;

//
// Sparse direct LU factorization (multifrontal, UMFPACK) behind a factor/solve interface.
// After factor() the object is immutable; solve() may be called concurrently.
//
class SparseLU
{
public:
  SparseLU();
  ~SparseLU();
  SparseLU(SparseLU &&) noexcept;
  SparseLU &operator=(SparseLU &&) noexcept;

  // Throws std::runtime_error when the matrix is structurally or numerically singular.
  void factor(const SparseMatrixC &matrix);
  bool factored() const;
  void release();

  VectorXc solve(const VectorXc &rhs) const;
  MatrixXc solve(const MatrixXc &rhs) const;

  int rows() const { return rows_; }

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int rows_ = 0;
};

// ||A x - b|| / ||b||
double relative_residual(const SparseMatrixC &matrix, const VectorXc &x, const VectorXc &b);

}  // namespace hybridscat
