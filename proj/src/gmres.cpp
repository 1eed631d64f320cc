#include "hybridscat/gmres.hpp"

#include <stdexcept>

namespace hybridscat
{

GmresResult gmres(const LinearOperator &op, const VectorXc &rhs, const VectorXc &x0, double tol,
                  int max_iter)
{
  if (x0.size() != rhs.size())
  {
    throw std::invalid_argument("gmres: initial guess and right-hand side differ in size");
  }
  GmresResult res;
  const double bnorm = rhs.norm();
  if (bnorm == 0.0)
  {
    res.converged = true;
    res.solution = VectorXc::Zero(rhs.size());
    res.residuals.push_back(0.0);
    return res;
  }
  VectorXc r = rhs;
  if (x0.squaredNorm() > 0.0)
  {
    r -= op(x0);
    ++res.matvecs;
  }
  const double beta = r.norm();
  res.residuals.push_back(beta / bnorm);
  res.solution = x0;
  if (beta <= tol * bnorm)
  {
    res.converged = true;
    return res;
  }

  const Eigen::Index n = rhs.size();
  const int m = static_cast<int>(std::min<Eigen::Index>(max_iter, n));
  MatrixXc V(n, m + 1);
  MatrixXc H = MatrixXc::Zero(m + 1, m);
  std::vector<double> cs(m);
  std::vector<cplx> sn(m);
  VectorXc g = VectorXc::Zero(m + 1);
  V.col(0) = r / beta;
  g[0] = beta;

  int k = 0;
  while (k < m)
  {
    VectorXc w = op(V.col(k));
    ++res.matvecs;
    for (int j = 0; j <= k; ++j)
    {
      H(j, k) = V.col(j).dot(w);
      w -= H(j, k) * V.col(j);
    }
    const double hnext = w.norm();
    H(k + 1, k) = hnext;
    // Apply the previous rotations, then build one that zeroes H(k + 1, k).
    for (int j = 0; j < k; ++j)
    {
      const cplx t = cs[j] * H(j, k) + sn[j] * H(j + 1, k);
      H(j + 1, k) = -std::conj(sn[j]) * H(j, k) + cs[j] * H(j + 1, k);
      H(j, k) = t;
    }
    const double habs = std::abs(H(k, k));
    const double rho = std::hypot(habs, hnext);
    if (rho == 0.0)
    {
      break;
    }
    cs[k] = habs / rho;
    // [c s; -conj(s) c] [h; hnext] = [rho h / |h|; 0].
    sn[k] = habs == 0.0 ? cplx(1.0) : (H(k, k) / habs) * (hnext / rho);
    H(k, k) = cs[k] * H(k, k) + sn[k] * hnext;
    H(k + 1, k) = 0.0;
    g[k + 1] = -std::conj(sn[k]) * g[k];
    g[k] = cs[k] * g[k];
    ++k;
    res.residuals.push_back(std::abs(g[k]) / bnorm);
    if (std::abs(g[k]) <= tol * bnorm || hnext <= 1e-14 * rho)
    {
      break;
    }
    V.col(k) = w / hnext;
  }

  res.iterations = k;
  if (k > 0)
  {
    const VectorXc y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    res.solution += V.leftCols(k) * y;
  }
  res.converged = res.residuals.back() <= tol;
  return res;
}

}  // namespace hybridscat
