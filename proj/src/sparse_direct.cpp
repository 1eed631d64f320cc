#include "hybridscat/sparse_direct.hpp"

#include <stdexcept>

#include <Eigen/UmfPackSupport>

namespace hybridscat
{

struct SparseLU::Impl
{
  Eigen::UmfPackLU<SparseMatrixC> lu;
};

SparseLU::SparseLU() = default;
SparseLU::~SparseLU() = default;
SparseLU::SparseLU(SparseLU &&) noexcept = default;
SparseLU &SparseLU::operator=(SparseLU &&) noexcept = default;

void SparseLU::factor(const SparseMatrixC &matrix)
{
  if (matrix.rows() != matrix.cols())
  {
    throw std::invalid_argument("SparseLU: matrix must be square");
  }
  impl_ = std::make_unique<Impl>();
  // Residuals are checked by the callers; skip UMFPACK's iterative refinement.
  impl_->lu.umfpackControl()(UMFPACK_IRSTEP) = 0;
  impl_->lu.compute(matrix);
  if (impl_->lu.info() != Eigen::Success)
  {
    impl_.reset();
    throw std::runtime_error("SparseLU: factorization failed (singular matrix)");
  }
  rows_ = static_cast<int>(matrix.rows());
}

bool SparseLU::factored() const { return impl_ != nullptr; }

void SparseLU::release()
{
  impl_.reset();
  rows_ = 0;
}

VectorXc SparseLU::solve(const VectorXc &rhs) const
{
  if (!impl_)
  {
    throw std::logic_error("SparseLU: solve before factor");
  }
  if (rhs.size() != rows_)
  {
    throw std::invalid_argument("SparseLU: right-hand side size mismatch");
  }
  VectorXc x = impl_->lu.solve(rhs);
  return x;
}

MatrixXc SparseLU::solve(const MatrixXc &rhs) const
{
  if (!impl_)
  {
    throw std::logic_error("SparseLU: solve before factor");
  }
  if (rhs.rows() != rows_)
  {
    throw std::invalid_argument("SparseLU: right-hand side size mismatch");
  }
  MatrixXc x = impl_->lu.solve(rhs);
  return x;
}

double relative_residual(const SparseMatrixC &matrix, const VectorXc &x, const VectorXc &b)
{
  const double nb = b.norm();
  const double nr = (matrix * x - b).norm();
  return nb > 0.0 ? nr / nb : nr;
}

}  // namespace hybridscat
