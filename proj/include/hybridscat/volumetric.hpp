#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "hybridscat/config.hpp"
#include "hybridscat/sparse_direct.hpp"
#include "hybridscat/types.hpp"

namespace hybridscat::vol
{

enum Side
{
  bottom = 0,
  right = 1,
  top = 2,
  left = 3
};

// Effective index n^2 seen by the discretization (1 - m^F with smoothing, n^2 without).
using IndexFunction = std::function<double(Point2)>;

//
// K x K subdomains, each split into L x L patches carrying (n1+1) x (n2+1) Chebyshev-Lobatto
// nodes. Nodes on shared patch edges are stored once per subdomain, so a subdomain holds
// (L n1 + 1) x (L n2 + 1) nodes indexed k = j * nx + i.
//
class PatchMesh
{
public:
  explicit PatchMesh(const ProblemConfig &config);

  int K() const { return K_; }
  int L() const { return L_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  double half_width() const { return a_; }
  double patch_width() const { return pw_; }
  int patches_per_side() const { return K_ * L_; }
  int patch_count() const { return patches_per_side() * patches_per_side(); }
  int subdomain_count() const { return K_ * K_; }

  int sub_nx() const { return L_ * n1_ + 1; }
  int sub_ny() const { return L_ * n2_ + 1; }
  int sub_nodes() const { return sub_nx() * sub_ny(); }
  int global_nx() const { return K_ * L_ * n1_ + 1; }
  int global_ny() const { return K_ * L_ * n2_ + 1; }

  // N: distinct volumetric nodes; N_c: distinct nodes on the patch skeleton.
  std::int64_t node_count() const;
  std::int64_t skeleton_count() const;
  // Sum of per-patch node counts (duplicates on shared edges counted repeatedly).
  std::int64_t patch_node_total() const;

  double local_x(int i) const { return xs_[i]; }
  double local_y(int j) const { return ys_[j]; }
  Point2 subdomain_origin(int p, int q) const;
  Point2 node(int p, int q, int i, int j) const;
  Point2 global_node(int gi, int gj) const;
  Box patch_box(int p, int q, int px, int py) const;

  // Incoming-impedance unknowns of one subdomain: the non-corner nodes of its boundary,
  // ordered bottom (i = 1..nx-2), right (j = 1..ny-2), top (i = 1..nx-2), left (j = 1..ny-2).
  int boundary_size() const { return 2 * (sub_nx() - 2) + 2 * (sub_ny() - 2); }
  int side_length(Side s) const { return (s == bottom || s == top) ? sub_nx() : sub_ny(); }
  // pos runs along the side in increasing coordinate, 1 <= pos <= length - 2.
  int boundary_index(Side s, int pos) const;
  std::pair<int, int> side_node(Side s, int pos) const;  // (i, j) for 0 <= pos < length
  std::pair<Side, int> boundary_side(int m) const;
  Point2 outward_normal(Side s) const;

  // Patch-local differentiation matrices on [0, pw], nodes in increasing order.
  const Eigen::MatrixXd &dx() const { return dx_; }
  const Eigen::MatrixXd &dy() const { return dy_; }

  // Sparse row of the outward normal derivative at side node pos (valid at corners too).
  void normal_derivative(Side s, int pos, std::vector<std::pair<int, double>> &row) const;

private:
  int K_, L_, n1_, n2_;
  double a_, pw_;
  std::vector<double> xs_, ys_;
  Eigen::MatrixXd dx_, dy_;
};

struct BoundaryNode
{
  Point2 x;
  Point2 normal;
  int subdomain;  // s = q * K + p
  int index;      // boundary unknown within the subdomain
};

// Reference from a boundary-patch node to a side trace of the subdomain that owns it.
struct TraceRef
{
  int subdomain;
  Side side;
  int pos;
};

// Tensor Chebyshev interpolation of a global-grid field (index gj * global_nx + gi) at points of
// the closed square, using the nodes of the patch containing each point.
VectorXc interpolate_field(const PatchMesh &mesh, const VectorXc &field, const std::vector<Point2> &points);

// Unknowns of the outer iteration: the non-corner subdomain-boundary nodes on the boundary of
// the square, counter-clockwise starting at (-a, -a).
std::vector<BoundaryNode> impedance_nodes(const PatchMesh &mesh);

// Nodes of the boundary patches (the patch edges lying on the square's boundary),
// counter-clockwise, n+1 per patch with t_j = -cos(pi j / n); patch corners repeat.
std::vector<TraceRef> boundary_patch_nodes(const PatchMesh &mesh);

//
// Collocation system of one subdomain. Rows: PDE at patch-interior nodes and at subdomain
// corners, averaged PDE at interior patch cross points, flux continuity at shared patch
// edges, incoming impedance alpha u + i kappa beta du/dnu at subdomain-boundary nodes.
//
class SubdomainSystem
{
public:
  SubdomainSystem(const PatchMesh &mesh, const IndexFunction &index, const ProblemConfig &config,
                  int p, int q);

  int p() const { return p_; }
  int q() const { return q_; }
  const SparseMatrixC &matrix() const { return matrix_; }
  const std::vector<int> &boundary_rows() const { return boundary_rows_; }

  VectorXc rhs(const VectorXc &psi) const;
  VectorXc solve(const VectorXc &psi) const;

  // Outgoing impedance alpha u - i kappa beta du/dnu at the boundary unknowns.
  VectorXc outgoing(const VectorXc &field) const;
  // Impedance-to-impedance map of the subdomain (boundary_size square).
  const MatrixXc &iti() const { return iti_; }

  // Maps psi -> u and psi -> du/dnu along a side on the outer boundary (empty otherwise).
  bool on_outer_boundary(Side s) const { return side_u_[s].size() > 0; }
  const MatrixXc &side_trace(Side s) const { return side_u_[s]; }
  const MatrixXc &side_normal_derivative(Side s) const { return side_dn_[s]; }

  double factorization_residual() const { return residual_; }
  void release_factorization() const { lu_.release(); }
  // Rebuilds a released factorization.
  void refactor() const;
  bool factored() const { return lu_.factored(); }

private:
  const PatchMesh *mesh_;
  int p_, q_;
  double alpha_, kappa_, beta_;
  SparseMatrixC matrix_;
  mutable SparseLU lu_;
  std::vector<int> boundary_rows_;
  SparseMatrixC outgoing_;
  MatrixXc iti_;
  std::array<MatrixXc, 4> side_u_, side_dn_;
  double residual_ = 0.0;
};

//
// Interface system A g = b over the incoming impedances of all subdomains. Two unknowns per
// interior interface node (one per adjacent subdomain); rows of outer-boundary nodes copy phi,
// the others require incoming impedance = neighbour's outgoing impedance.
//
class InterfaceSystem
{
public:
  InterfaceSystem(const PatchMesh &mesh, const std::vector<SubdomainSystem> &subdomains);

  int size() const { return static_cast<int>(matrix_.rows()); }
  int offset(int s) const { return s * block_; }
  const SparseMatrixC &matrix() const { return matrix_; }
  const std::vector<int> &phi_rows() const { return phi_rows_; }

  VectorXc rhs(const VectorXc &phi) const;
  VectorXc solve(const VectorXc &phi) const;

private:
  int block_;
  SparseMatrixC matrix_;
  SparseLU lu_;
  std::vector<int> phi_rows_;
};

struct BoundaryTraces
{
  VectorXc u;   // at boundary_patch_nodes()
  VectorXc dn;  // outward normal derivative
};

struct VolumetricStats
{
  int subdomain_factorizations = 0;
  int interface_factorizations = 0;
  std::int64_t interface_nonzeros = 0;
  double assembly_seconds = 0.0;
  double interface_seconds = 0.0;
};

//
// Owns the mesh, the K^2 factorized subdomain systems and the interface system; maps impedance
// data phi on the outer boundary to fields and traces without refactoring.
//
class VolumetricSolver
{
public:
  VolumetricSolver(const ProblemConfig &config, IndexFunction index);
  VolumetricSolver(const VolumetricSolver &) = delete;
  VolumetricSolver &operator=(const VolumetricSolver &) = delete;

  const ProblemConfig &config() const { return config_; }
  const PatchMesh &mesh() const { return mesh_; }
  const std::vector<SubdomainSystem> &subdomains() const { return subdomains_; }
  const InterfaceSystem &interface() const { return *interface_; }
  const std::vector<BoundaryNode> &phi_nodes() const { return phi_nodes_; }
  const std::vector<TraceRef> &trace_nodes() const { return trace_nodes_; }
  const VolumetricStats &stats() const { return stats_; }
  int phi_size() const { return static_cast<int>(phi_nodes_.size()); }

  VectorXc interface_solve(const VectorXc &phi) const;
  BoundaryTraces boundary_traces(const VectorXc &g) const;
  // Outgoing impedance at the phi nodes.
  VectorXc apply_iti(const VectorXc &phi) const;
  // Per-subdomain nodal fields (back-solves; refactors released subdomains).
  std::vector<VectorXc> subdomain_fields(const VectorXc &phi) const;
  // Field on the global node grid (index gj * global_nx + gi); shared nodes are averaged.
  VectorXc solve_bvp(const VectorXc &phi) const;
  // max |u_s - u_t| over nodes shared by neighbouring subdomains, relative to max |u|.
  double interface_mismatch(const std::vector<VectorXc> &fields) const;

  // Drops the subdomain factorizations; they are rebuilt on the next back-solve.
  void release_subdomain_factorizations();

private:
  ProblemConfig config_;
  IndexFunction index_;
  PatchMesh mesh_;
  std::vector<SubdomainSystem> subdomains_;
  std::unique_ptr<InterfaceSystem> interface_;
  std::vector<BoundaryNode> phi_nodes_;
  std::vector<TraceRef> trace_nodes_;
  mutable VolumetricStats stats_;
};

}  // namespace hybridscat::vol
