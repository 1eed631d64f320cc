#pragma once

#include <functional>
#include <vector>

#include "hybridscat/types.hpp"

namespace hybridscat
{

using LinearOperator = std::function<VectorXc(const VectorXc &)>;

struct GmresResult
{
  bool converged = false;
  int iterations = 0;  // Arnoldi steps
  int matvecs = 0;     // operator applications, including the initial residual
  std::vector<double> residuals;  // ||b - A x_k|| / ||b||, k = 0..iterations
  VectorXc solution;
};

// Full (non-restarted) GMRES with modified Gram-Schmidt and Givens rotations. Stops when the
// Arnoldi residual estimate drops to tol * ||b||, on breakdown, or after max_iter steps.
GmresResult gmres(const LinearOperator &op, const VectorXc &rhs, const VectorXc &x0, double tol,
                  int max_iter);

}  // namespace hybridscat
