#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "hybridscat/chebyshev.hpp"
#include "hybridscat/types.hpp"

namespace hybridscat::bq
{

//
// Straight patch xi(t) = (start + end)/2 + t (end - start)/2, t in [-1, 1], carrying
// order + 1 Chebyshev-Lobatto nodes t_j = -cos(pi j / order) (start to end).
//
struct BoundaryPatch
{
  Point2 start;
  Point2 end;
  Point2 normal;  // outward
  int order = 8;

  Point2 point(double t) const { return (start + end) * 0.5 + (end - start) * (0.5 * t); }
  double length() const { return distance(start, end); }
  double jacobian() const { return 0.5 * length(); }
  static double node_parameter(int j, int order);
  Point2 node(int j) const { return point(node_parameter(j, order)); }
  // Parameter of the closest point, clamped to [-1, 1].
  double project(Point2 x) const;
  double distance_to(Point2 x) const { return distance(x, point(project(x))); }
};

// per_side patches on each side of [-a, a]^2, counter-clockwise from (-a, -a). Horizontal
// sides use order n1 and vertical sides n2, matching the volumetric edge grids.
std::vector<BoundaryPatch> square_boundary_patches(double a, int per_side, int n1, int n2);

// Unique patch nodes except the corners of the square, counter-clockwise from (-a, -a).
struct TargetNode
{
  Point2 x;
  Point2 normal;
};
std::vector<TargetNode> square_collocation_nodes(const std::vector<BoundaryPatch> &patches);

enum class Regime
{
  far,
  near,
  singular
};

Regime classify(Point2 x, const BoundaryPatch &patch, double near_threshold);

//
// omega_k(s) = 2 pi v^k / (v^k + v(2 pi - s)^k), with
// v(s) = (1/k - 1/2) ((pi - s)/pi)^3 + (1/k) (s - pi)/pi + 1/2.
//
class GradedChangeOfVariable
{
public:
  explicit GradedChangeOfVariable(int k);
  int order() const { return k_; }
  double v(double s) const;
  double dv(double s) const;
  double omega(double s) const;
  double domega(double s) const;

private:
  int k_;
};

struct QuadratureOptions
{
  double kappa = 1.0;
  int graded_order = 6;
  double near_threshold = 0.5;
  int far_oversample = 1;
  double graded_tol = 1e-10;  // agreement of successive oversampled rules
  int graded_cap = 2048;      // largest graded rule before giving up
};

// Moments against T_l(t) |xi'(t)|, l = 0..order, of dG/dnu(y) (i1) and G (i2).
struct MomentRow
{
  Regime regime = Regime::far;
  int rule_order = 0;  // Clenshaw-Curtis order of the final rule
  std::vector<cplx> i1;
  std::vector<cplx> i2;
};

// Graded moments with the split at t0 (either endpoint allowed). Throws std::runtime_error
// when the rule does not settle below the cap.
MomentRow split_moments(Point2 x, const BoundaryPatch &patch, double t0, const QuadratureOptions &opt);
// Target on the patch at parameter t0.
MomentRow singular_moments(Point2 x, const BoundaryPatch &patch, double t0,
                           const QuadratureOptions &opt);
// Target off the patch: split at the projection of x.
MomentRow near_moments(Point2 x, const BoundaryPatch &patch, const QuadratureOptions &opt);
// Plain Clenshaw-Curtis of the given order.
MomentRow far_moments(Point2 x, const BoundaryPatch &patch, int rule_order, double kappa);
// Dispatch on classify().
MomentRow moments(Point2 x, const BoundaryPatch &patch, const QuadratureOptions &opt);

struct MomentStats
{
  int far = 0;
  int near = 0;
  int singular = 0;
  int max_rule_order = 0;
  double seconds = 0.0;
};

//
// Density-independent moments for a fixed list of targets and patches, stored as two dense
// matrices (targets x sum over patches of order + 1) acting on Chebyshev coefficients.
//
class MomentTable
{
public:
  MomentTable(std::vector<Point2> targets, std::vector<BoundaryPatch> patches,
              const QuadratureOptions &opt);

  const std::vector<Point2> &targets() const { return targets_; }
  const std::vector<BoundaryPatch> &patches() const { return patches_; }
  const QuadratureOptions &options() const { return opt_; }
  const MomentStats &stats() const { return stats_; }
  int density_size() const { return density_size_; }
  int offset(int patch) const { return offsets_[patch]; }
  Regime regime(int target, int patch) const { return regimes_[target * patches_.size() + patch]; }
  const MatrixXc &double_layer() const { return i1_; }
  const MatrixXc &single_layer() const { return i2_; }

  // Chebyshev coefficients of densities sampled at the patch nodes (patch-major).
  VectorXc coefficients(const VectorXc &density) const;
  // int dG/dnu u - G du/dnu at each target.
  VectorXc integrate_traces(const VectorXc &u, const VectorXc &dn) const;

private:
  std::vector<Point2> targets_;
  std::vector<BoundaryPatch> patches_;
  QuadratureOptions opt_;
  std::vector<int> offsets_;
  int density_size_ = 0;
  std::vector<Regime> regimes_;
  MatrixXc i1_, i2_;
  std::map<int, cheb::Transform> transforms_;  // keyed by patch order
  MomentStats stats_;
};

// Boundary term of the exterior representation applied to eta = (I + T)phi and
// zeta = (I - T)phi: (1/(2 alpha)) int dG/dnu eta - (1/(2 i kappa beta)) int G zeta.
VectorXc apply_boundary_operator(const MomentTable &table, const VectorXc &eta, const VectorXc &zeta,
                                 double alpha, double beta);

struct GreenIdentityResult
{
  double max_error = 0.0;  // relative max-norm error of 2 int (G du - dG/dnu u) against u
  int targets = 0;
  int patches = 0;
  MomentStats stats;
};

// Green identity check on [-a, a]^2 for the plane wave exp(i kappa x): collocation at all
// patch nodes except the corners of the square.
GreenIdentityResult green_identity_test(double a, int per_side, int order, const QuadratureOptions &opt);

}  // namespace hybridscat::bq
