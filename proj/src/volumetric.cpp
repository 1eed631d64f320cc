#include "hybridscat/volumetric.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "hybridscat/chebyshev.hpp"

namespace hybridscat::vol
{

namespace
{
using Triplet = Eigen::Triplet<cplx>;

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace

// ---------------------------------------------------------------------------------------------
// PatchMesh

PatchMesh::PatchMesh(const ProblemConfig &c)
    : K_(c.K), L_(c.L), n1_(c.n1), n2_(c.n2), a_(c.half_width), pw_(c.patch_width())
{
  if (K_ < 1 || L_ < 1 || n1_ < 2 || n2_ < 2 || !(a_ > 0.0))
  {
    throw std::invalid_argument("PatchMesh: invalid partition");
  }
  auto axis = [this](int n)
  {
    std::vector<double> v(L_ * n + 1);
    for (int px = 0; px < L_; ++px)
    {
      for (int l = 0; l <= n; ++l)
      {
        // Increasing Chebyshev-Lobatto nodes on [px pw, (px + 1) pw].
        double t = 0.5 * (1.0 - std::cos(pi * l / n));
        if (2 * l == n)
        {
          t = 0.5;
        }
        v[px * n + l] = (px + t) * pw_;
      }
    }
    return v;
  };
  xs_ = axis(n1_);
  ys_ = axis(n2_);
  dx_ = cheb::diff_matrix_increasing(n1_, 0.0, pw_);
  dy_ = cheb::diff_matrix_increasing(n2_, 0.0, pw_);
}

std::int64_t PatchMesh::node_count() const
{
  return static_cast<std::int64_t>(global_nx()) * global_ny();
}

std::int64_t PatchMesh::skeleton_count() const
{
  // Nodes on vertical skeleton lines plus nodes on horizontal ones, minus crossings.
  const std::int64_t P = patches_per_side();
  const std::int64_t vertical = (P + 1) * global_ny();
  const std::int64_t horizontal = (P + 1) * global_nx();
  return vertical + horizontal - (P + 1) * (P + 1);
}

std::int64_t PatchMesh::patch_node_total() const
{
  return static_cast<std::int64_t>(patch_count()) * (n1_ + 1) * (n2_ + 1);
}

Point2 PatchMesh::subdomain_origin(int p, int q) const
{
  const double w = L_ * pw_;
  return {-a_ + p * w, -a_ + q * w};
}

Point2 PatchMesh::node(int p, int q, int i, int j) const
{
  const Point2 o = subdomain_origin(p, q);
  double x = o.x + xs_[i];
  double y = o.y + ys_[j];
  // Exact outer boundary coordinates.
  if (p == K_ - 1 && i == sub_nx() - 1)
  {
    x = a_;
  }
  if (q == K_ - 1 && j == sub_ny() - 1)
  {
    y = a_;
  }
  return {x, y};
}

Point2 PatchMesh::global_node(int gi, int gj) const
{
  const int p = std::min(gi / (sub_nx() - 1), K_ - 1);
  const int q = std::min(gj / (sub_ny() - 1), K_ - 1);
  return node(p, q, gi - p * (sub_nx() - 1), gj - q * (sub_ny() - 1));
}

Box PatchMesh::patch_box(int p, int q, int px, int py) const
{
  const Point2 o = subdomain_origin(p, q);
  return {o.x + px * pw_, o.x + (px + 1) * pw_, o.y + py * pw_, o.y + (py + 1) * pw_};
}

int PatchMesh::boundary_index(Side s, int pos) const
{
  const int hx = sub_nx() - 2;
  const int hy = sub_ny() - 2;
  if (pos < 1 || pos > side_length(s) - 2)
  {
    throw std::out_of_range("boundary_index: corner or out-of-range position");
  }
  switch (s)
  {
    case bottom:
      return pos - 1;
    case right:
      return hx + pos - 1;
    case top:
      return hx + hy + pos - 1;
    case left:
      return 2 * hx + hy + pos - 1;
  }
  return -1;
}

std::pair<int, int> PatchMesh::side_node(Side s, int pos) const
{
  switch (s)
  {
    case bottom:
      return {pos, 0};
    case right:
      return {sub_nx() - 1, pos};
    case top:
      return {pos, sub_ny() - 1};
    case left:
      return {0, pos};
  }
  return {0, 0};
}

std::pair<Side, int> PatchMesh::boundary_side(int m) const
{
  const int hx = sub_nx() - 2;
  const int hy = sub_ny() - 2;
  if (m < hx)
  {
    return {bottom, m + 1};
  }
  m -= hx;
  if (m < hy)
  {
    return {right, m + 1};
  }
  m -= hy;
  if (m < hx)
  {
    return {top, m + 1};
  }
  m -= hx;
  if (m < hy)
  {
    return {left, m + 1};
  }
  throw std::out_of_range("boundary_side: index out of range");
}

Point2 PatchMesh::outward_normal(Side s) const
{
  switch (s)
  {
    case bottom:
      return {0.0, -1.0};
    case right:
      return {1.0, 0.0};
    case top:
      return {0.0, 1.0};
    case left:
      return {-1.0, 0.0};
  }
  return {};
}

void PatchMesh::normal_derivative(Side s, int pos, std::vector<std::pair<int, double>> &row) const
{
  row.clear();
  const int nx = sub_nx();
  const int ny = sub_ny();
  const auto [i, j] = side_node(s, pos);
  switch (s)
  {
    case bottom:
      for (int k = 0; k <= n2_; ++k)
      {
        row.emplace_back(k * nx + i, -dy_(0, k));
      }
      break;
    case top:
      for (int k = 0; k <= n2_; ++k)
      {
        row.emplace_back((ny - 1 - n2_ + k) * nx + i, dy_(n2_, k));
      }
      break;
    case left:
      for (int k = 0; k <= n1_; ++k)
      {
        row.emplace_back(j * nx + k, -dx_(0, k));
      }
      break;
    case right:
      for (int k = 0; k <= n1_; ++k)
      {
        row.emplace_back(j * nx + (nx - 1 - n1_ + k), dx_(n1_, k));
      }
      break;
  }
}

std::vector<BoundaryNode> impedance_nodes(const PatchMesh &mesh)
{
  const int K = mesh.K();
  const int nx = mesh.sub_nx();
  const int ny = mesh.sub_ny();
  std::vector<BoundaryNode> out;
  auto add = [&](int p, int q, Side s, int pos)
  {
    const auto [i, j] = mesh.side_node(s, pos);
    out.push_back({mesh.node(p, q, i, j), mesh.outward_normal(s), q * K + p,
                   mesh.boundary_index(s, pos)});
  };
  for (int p = 0; p < K; ++p)
  {
    for (int pos = 1; pos <= nx - 2; ++pos)
    {
      add(p, 0, bottom, pos);
    }
  }
  for (int q = 0; q < K; ++q)
  {
    for (int pos = 1; pos <= ny - 2; ++pos)
    {
      add(K - 1, q, right, pos);
    }
  }
  for (int p = K - 1; p >= 0; --p)
  {
    for (int pos = nx - 2; pos >= 1; --pos)
    {
      add(p, K - 1, top, pos);
    }
  }
  for (int q = K - 1; q >= 0; --q)
  {
    for (int pos = ny - 2; pos >= 1; --pos)
    {
      add(0, q, left, pos);
    }
  }
  return out;
}

VectorXc interpolate_field(const PatchMesh &mesh, const VectorXc &field, const std::vector<Point2> &points)
{
  const int nx = mesh.global_nx();
  if (field.size() != static_cast<Eigen::Index>(nx) * mesh.global_ny())
  {
    throw std::invalid_argument("interpolate_field: field does not match the mesh");
  }
  const double a = mesh.half_width();
  const double pw = mesh.patch_width();
  const int P = mesh.patches_per_side();
  const int n1 = mesh.n1(), n2 = mesh.n2();
  const auto bx = cheb::lobatto_barycentric_weights(n1);
  const auto by = cheb::lobatto_barycentric_weights(n2);
  std::vector<double> xs(n1 + 1), ys(n2 + 1), wx(n1 + 1), wy(n2 + 1);
  VectorXc out(points.size());
  for (std::size_t k = 0; k < points.size(); ++k)
  {
    const Point2 x = points[k];
    const double tol = 1e-12 * a;
    if (std::abs(x.x) > a + tol || std::abs(x.y) > a + tol)
    {
      throw std::invalid_argument("interpolate_field: point outside the computational square");
    }
    const int px = std::clamp(static_cast<int>(std::floor((x.x + a) / pw)), 0, P - 1);
    const int py = std::clamp(static_cast<int>(std::floor((x.y + a) / pw)), 0, P - 1);
    for (int i = 0; i <= n1; ++i)
    {
      xs[i] = mesh.global_node(px * n1 + i, 0).x;
    }
    for (int j = 0; j <= n2; ++j)
    {
      ys[j] = mesh.global_node(0, py * n2 + j).y;
    }
    cheb::lagrange_basis(xs, bx, std::clamp(x.x, -a, a), wx);
    cheb::lagrange_basis(ys, by, std::clamp(x.y, -a, a), wy);
    cplx v = 0.0;
    for (int j = 0; j <= n2; ++j)
    {
      cplx row = 0.0;
      const Eigen::Index base = static_cast<Eigen::Index>(py * n2 + j) * nx + px * n1;
      for (int i = 0; i <= n1; ++i)
      {
        row += wx[i] * field[base + i];
      }
      v += wy[j] * row;
    }
    out[k] = v;
  }
  return out;
}

std::vector<TraceRef> boundary_patch_nodes(const PatchMesh &mesh)
{
  const int K = mesh.K();
  const int L = mesh.L();
  const int n1 = mesh.n1();
  const int n2 = mesh.n2();
  const int P = K * L;
  std::vector<TraceRef> out;
  for (int k = 0; k < P; ++k)
  {
    const int p = k / L, px = k % L;
    for (int j = 0; j <= n1; ++j)
    {
      out.push_back({p, bottom, px * n1 + j});
    }
  }
  for (int k = 0; k < P; ++k)
  {
    const int q = k / L, py = k % L;
    for (int j = 0; j <= n2; ++j)
    {
      out.push_back({q * K + K - 1, right, py * n2 + j});
    }
  }
  for (int k = P - 1; k >= 0; --k)
  {
    const int p = k / L, px = k % L;
    for (int j = 0; j <= n1; ++j)
    {
      out.push_back({(K - 1) * K + p, top, px * n1 + (n1 - j)});
    }
  }
  for (int k = P - 1; k >= 0; --k)
  {
    const int q = k / L, py = k % L;
    for (int j = 0; j <= n2; ++j)
    {
      out.push_back({q * K, left, py * n2 + (n2 - j)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// SubdomainSystem

SubdomainSystem::SubdomainSystem(const PatchMesh &mesh, const IndexFunction &index,
                                 const ProblemConfig &config, int p, int q)
    : mesh_(&mesh), p_(p), q_(q), alpha_(config.alpha), kappa_(config.kappa), beta_(config.beta)
{
  const int nx = mesh.sub_nx();
  const int ny = mesh.sub_ny();
  const int n1 = mesh.n1();
  const int n2 = mesh.n2();
  const int L = mesh.L();
  const int N = nx * ny;
  const int M = mesh.boundary_size();
  const double h = 0.5 * mesh.patch_width();  // row scaling
  const double k2 = kappa_ * kappa_;
  const Eigen::MatrixXd D2x = mesh.dx() * mesh.dx();
  const Eigen::MatrixXd D2y = mesh.dy() * mesh.dy();
  const cplx ikb = I * kappa_ * beta_;

  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(N) * (n1 + n2 + 3));
  auto id = [nx](int i, int j) { return j * nx + i; };

  // Second derivative along x in patch column px at local index lx, weighted.
  auto add_d2x = [&](int row, int px, int lx, int j, double w)
  {
    for (int k = 0; k <= n1; ++k)
    {
      trip.emplace_back(row, id(px * n1 + k, j), w * h * h * D2x(lx, k));
    }
  };
  auto add_d2y = [&](int row, int py, int ly, int i, double w)
  {
    for (int k = 0; k <= n2; ++k)
    {
      trip.emplace_back(row, id(i, py * n2 + k), w * h * h * D2y(ly, k));
    }
  };

  boundary_rows_.assign(M, -1);
  std::vector<std::pair<int, double>> dn;
  for (int j = 0; j < ny; ++j)
  {
    for (int i = 0; i < nx; ++i)
    {
      const int row = id(i, j);
      const bool edge_x = (i == 0 || i == nx - 1);
      const bool edge_y = (j == 0 || j == ny - 1);
      const bool line_x = !edge_x && i % n1 == 0;  // interior vertical patch line
      const bool line_y = !edge_y && j % n2 == 0;

      if (edge_x != edge_y)
      {
        // Incoming impedance on the subdomain boundary (no corners).
        Side s;
        int pos;
        if (edge_y)
        {
          s = (j == 0) ? bottom : top;
          pos = i;
        }
        else
        {
          s = (i == 0) ? left : right;
          pos = j;
        }
        mesh.normal_derivative(s, pos, dn);
        trip.emplace_back(row, row, alpha_);
        for (const auto &[col, v] : dn)
        {
          trip.emplace_back(row, col, ikb * v);
        }
        boundary_rows_[mesh.boundary_index(s, pos)] = row;
        continue;
      }

      const double n2v = index(mesh.node(p, q, i, j));
      if (line_x && !line_y)
      {
        // d/dx continuity across a vertical patch edge.
        const int pl = i / n1 - 1;
        for (int k = 0; k <= n1; ++k)
        {
          trip.emplace_back(row, id(pl * n1 + k, j), h * mesh.dx()(n1, k));
          trip.emplace_back(row, id((pl + 1) * n1 + k, j), -h * mesh.dx()(0, k));
        }
        continue;
      }
      if (line_y && !line_x)
      {
        const int pb = j / n2 - 1;
        for (int k = 0; k <= n2; ++k)
        {
          trip.emplace_back(row, id(i, pb * n2 + k), h * mesh.dy()(n2, k));
          trip.emplace_back(row, id(i, (pb + 1) * n2 + k), -h * mesh.dy()(0, k));
        }
        continue;
      }
      if (line_x && line_y)
      {
        // Cross point: PDE with one-sided second derivatives averaged over the four patches.
        const int pl = i / n1 - 1;
        const int pb = j / n2 - 1;
        add_d2x(row, pl, n1, j, 0.5);
        add_d2x(row, pl + 1, 0, j, 0.5);
        add_d2y(row, pb, n2, i, 0.5);
        add_d2y(row, pb + 1, 0, i, 0.5);
        trip.emplace_back(row, row, h * h * k2 * n2v);
        continue;
      }
      // Patch interior node or subdomain corner: PDE of the owning patch.
      const int px = std::min(i / n1, L - 1);
      const int py = std::min(j / n2, L - 1);
      add_d2x(row, px, i - px * n1, j, 1.0);
      add_d2y(row, py, j - py * n2, i, 1.0);
      trip.emplace_back(row, row, h * h * k2 * n2v);
    }
  }
  matrix_.resize(N, N);
  matrix_.setFromTriplets(trip.begin(), trip.end());
  matrix_.makeCompressed();

  // Outgoing impedance alpha u - i kappa beta du/dnu at each boundary unknown.
  std::vector<Triplet> out;
  for (int m = 0; m < M; ++m)
  {
    const auto [s, pos] = mesh.boundary_side(m);
    mesh.normal_derivative(s, pos, dn);
    out.emplace_back(m, boundary_rows_[m], alpha_);
    for (const auto &[col, v] : dn)
    {
      out.emplace_back(m, col, -ikb * v);
    }
  }
  outgoing_.resize(M, N);
  outgoing_.setFromTriplets(out.begin(), out.end());

  lu_.factor(matrix_);

  // Multi right-hand-side solve for the unit impedance data.
  MatrixXc E = MatrixXc::Zero(N, M);
  for (int m = 0; m < M; ++m)
  {
    E(boundary_rows_[m], m) = 1.0;
  }
  const MatrixXc X = lu_.solve(E);
  residual_ = ((matrix_ * X - E).norm()) / E.norm();
  iti_ = outgoing_ * X;

  const int K = mesh.K();
  const bool outer[4] = {q == 0, p == K - 1, q == K - 1, p == 0};
  for (int s = 0; s < 4; ++s)
  {
    if (!outer[s])
    {
      continue;
    }
    const Side side = static_cast<Side>(s);
    const int len = mesh.side_length(side);
    side_u_[s].resize(len, M);
    side_dn_[s] = MatrixXc::Zero(len, M);
    for (int pos = 0; pos < len; ++pos)
    {
      const auto [i, j] = mesh.side_node(side, pos);
      side_u_[s].row(pos) = X.row(id(i, j));
      mesh.normal_derivative(side, pos, dn);
      for (const auto &[col, v] : dn)
      {
        side_dn_[s].row(pos) += v * X.row(col);
      }
    }
  }
}

VectorXc SubdomainSystem::rhs(const VectorXc &psi) const
{
  if (psi.size() != static_cast<Eigen::Index>(boundary_rows_.size()))
  {
    throw std::invalid_argument("SubdomainSystem: impedance data size mismatch");
  }
  VectorXc b = VectorXc::Zero(matrix_.rows());
  for (std::size_t m = 0; m < boundary_rows_.size(); ++m)
  {
    b[boundary_rows_[m]] = psi[m];
  }
  return b;
}

VectorXc SubdomainSystem::solve(const VectorXc &psi) const
{
  if (!lu_.factored())
  {
    refactor();
  }
  return lu_.solve(rhs(psi));
}

VectorXc SubdomainSystem::outgoing(const VectorXc &field) const { return outgoing_ * field; }

void SubdomainSystem::refactor() const { lu_.factor(matrix_); }

// ---------------------------------------------------------------------------------------------
// InterfaceSystem

InterfaceSystem::InterfaceSystem(const PatchMesh &mesh,
                                 const std::vector<SubdomainSystem> &subdomains)
    : block_(mesh.boundary_size())
{
  const int K = mesh.K();
  const int M = block_;
  const int total = K * K * M;
  // For each unknown (s, m): the neighbour t and its index m' at the same node, or -1 on the
  // outer boundary.
  std::vector<int> nb_sub(total, -1), nb_idx(total, -1);
  std::vector<int> is_outer(total, 0);
  for (int q = 0; q < K; ++q)
  {
    for (int p = 0; p < K; ++p)
    {
      const int s = q * K + p;
      for (int m = 0; m < M; ++m)
      {
        const auto [side, pos] = mesh.boundary_side(m);
        int tp = p, tq = q;
        Side opposite = side;
        switch (side)
        {
          case bottom:
            tq = q - 1;
            opposite = top;
            break;
          case top:
            tq = q + 1;
            opposite = bottom;
            break;
          case left:
            tp = p - 1;
            opposite = right;
            break;
          case right:
            tp = p + 1;
            opposite = left;
            break;
        }
        const int row = s * M + m;
        if (tp < 0 || tq < 0 || tp >= K || tq >= K)
        {
          is_outer[row] = 1;
        }
        else
        {
          nb_sub[row] = tq * K + tp;
          nb_idx[row] = mesh.boundary_index(opposite, pos);
        }
      }
    }
  }

  // Column (t, j) holds the identity plus -R_t(m', j) in every row whose neighbour value is
  // the outgoing impedance of t at m'. Built column by column from the subdomain ItI maps.
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(total) * (1 + M / 2));
  for (int row = 0; row < total; ++row)
  {
    trip.emplace_back(row, row, 1.0);
    if (is_outer[row])
    {
      continue;
    }
    const int t = nb_sub[row];
    const MatrixXc &R = subdomains[t].iti();
    const int mp = nb_idx[row];
    for (int j = 0; j < M; ++j)
    {
      const cplx v = R(mp, j);
      if (v != 0.0)
      {
        trip.emplace_back(row, t * M + j, -v);
      }
    }
  }
  matrix_.resize(total, total);
  matrix_.setFromTriplets(trip.begin(), trip.end());
  matrix_.makeCompressed();

  const auto nodes = impedance_nodes(mesh);
  phi_rows_.reserve(nodes.size());
  for (const auto &n : nodes)
  {
    phi_rows_.push_back(n.subdomain * M + n.index);
  }
  lu_.factor(matrix_);
}

VectorXc InterfaceSystem::rhs(const VectorXc &phi) const
{
  if (phi.size() != static_cast<Eigen::Index>(phi_rows_.size()))
  {
    throw std::invalid_argument("InterfaceSystem: phi size mismatch");
  }
  VectorXc b = VectorXc::Zero(matrix_.rows());
  for (std::size_t k = 0; k < phi_rows_.size(); ++k)
  {
    b[phi_rows_[k]] = phi[k];
  }
  return b;
}

VectorXc InterfaceSystem::solve(const VectorXc &phi) const { return lu_.solve(rhs(phi)); }

// ---------------------------------------------------------------------------------------------
// VolumetricSolver

VolumetricSolver::VolumetricSolver(const ProblemConfig &config, IndexFunction index)
    : config_(config), index_(std::move(index)), mesh_(config)
{
  const auto t0 = std::chrono::steady_clock::now();
  const int K = mesh_.K();
  subdomains_.reserve(K * K);
  for (int q = 0; q < K; ++q)
  {
    for (int p = 0; p < K; ++p)
    {
      subdomains_.emplace_back(mesh_, index_, config_, p, q);
      ++stats_.subdomain_factorizations;
      if (!config_.retain_factorizations)
      {
        subdomains_.back().release_factorization();
      }
    }
  }
  stats_.assembly_seconds = seconds_since(t0);
  const auto t1 = std::chrono::steady_clock::now();
  interface_ = std::make_unique<InterfaceSystem>(mesh_, subdomains_);
  ++stats_.interface_factorizations;
  stats_.interface_nonzeros = interface_->matrix().nonZeros();
  stats_.interface_seconds = seconds_since(t1);
  phi_nodes_ = impedance_nodes(mesh_);
  trace_nodes_ = boundary_patch_nodes(mesh_);
}

VectorXc VolumetricSolver::interface_solve(const VectorXc &phi) const
{
  return interface_->solve(phi);
}

BoundaryTraces VolumetricSolver::boundary_traces(const VectorXc &g) const
{
  const int M = mesh_.boundary_size();
  const int K = mesh_.K();
  // Side traces of every outer subdomain side.
  std::vector<std::array<VectorXc, 4>> u(K * K), dn(K * K);
  for (int s = 0; s < K * K; ++s)
  {
    const auto &sub = subdomains_[s];
    const auto psi = g.segment(static_cast<Eigen::Index>(s) * M, M);
    for (int side = 0; side < 4; ++side)
    {
      if (sub.on_outer_boundary(static_cast<Side>(side)))
      {
        u[s][side] = sub.side_trace(static_cast<Side>(side)) * psi;
        dn[s][side] = sub.side_normal_derivative(static_cast<Side>(side)) * psi;
      }
    }
  }
  BoundaryTraces t;
  t.u.resize(trace_nodes_.size());
  t.dn.resize(trace_nodes_.size());
  for (std::size_t k = 0; k < trace_nodes_.size(); ++k)
  {
    const auto &r = trace_nodes_[k];
    t.u[k] = u[r.subdomain][r.side][r.pos];
    t.dn[k] = dn[r.subdomain][r.side][r.pos];
  }
  return t;
}

VectorXc VolumetricSolver::apply_iti(const VectorXc &phi) const
{
  const VectorXc g = interface_solve(phi);
  const int M = mesh_.boundary_size();
  VectorXc out(phi_nodes_.size());
  for (std::size_t k = 0; k < phi_nodes_.size(); ++k)
  {
    const auto &n = phi_nodes_[k];
    const auto &R = subdomains_[n.subdomain].iti();
    out[k] = R.row(n.index) * g.segment(static_cast<Eigen::Index>(n.subdomain) * M, M);
  }
  return out;
}

std::vector<VectorXc> VolumetricSolver::subdomain_fields(const VectorXc &phi) const
{
  const VectorXc g = interface_solve(phi);
  const int M = mesh_.boundary_size();
  std::vector<VectorXc> fields;
  fields.reserve(subdomains_.size());
  for (std::size_t s = 0; s < subdomains_.size(); ++s)
  {
    const bool rebuilt = !subdomains_[s].factored();
    if (rebuilt)
    {
      ++stats_.subdomain_factorizations;
    }
    fields.push_back(subdomains_[s].solve(g.segment(static_cast<Eigen::Index>(s) * M, M)));
    if (rebuilt && !config_.retain_factorizations)
    {
      subdomains_[s].release_factorization();
    }
  }
  return fields;
}

VectorXc VolumetricSolver::solve_bvp(const VectorXc &phi) const
{
  const auto fields = subdomain_fields(phi);
  const int K = mesh_.K();
  const int nx = mesh_.sub_nx();
  const int ny = mesh_.sub_ny();
  const int gnx = mesh_.global_nx();
  VectorXc sum = VectorXc::Zero(mesh_.node_count());
  Eigen::VectorXi count = Eigen::VectorXi::Zero(mesh_.node_count());
  for (int q = 0; q < K; ++q)
  {
    for (int p = 0; p < K; ++p)
    {
      const VectorXc &f = fields[q * K + p];
      for (int j = 0; j < ny; ++j)
      {
        const std::int64_t gj = static_cast<std::int64_t>(q) * (ny - 1) + j;
        for (int i = 0; i < nx; ++i)
        {
          const std::int64_t gi = static_cast<std::int64_t>(p) * (nx - 1) + i;
          sum[gj * gnx + gi] += f[j * nx + i];
          count[gj * gnx + gi] += 1;
        }
      }
    }
  }
  for (Eigen::Index k = 0; k < sum.size(); ++k)
  {
    sum[k] /= count[k];
  }
  return sum;
}

double VolumetricSolver::interface_mismatch(const std::vector<VectorXc> &fields) const
{
  const int K = mesh_.K();
  const int nx = mesh_.sub_nx();
  const int ny = mesh_.sub_ny();
  double worst = 0.0, scale = 0.0;
  for (const auto &f : fields)
  {
    scale = std::max(scale, f.cwiseAbs().maxCoeff());
  }
  for (int q = 0; q < K; ++q)
  {
    for (int p = 0; p < K; ++p)
    {
      const VectorXc &f = fields[q * K + p];
      if (p + 1 < K)
      {
        const VectorXc &g = fields[q * K + p + 1];
        for (int j = 0; j < ny; ++j)
        {
          worst = std::max(worst, std::abs(f[j * nx + nx - 1] - g[j * nx]));
        }
      }
      if (q + 1 < K)
      {
        const VectorXc &g = fields[(q + 1) * K + p];
        for (int i = 0; i < nx; ++i)
        {
          worst = std::max(worst, std::abs(f[(ny - 1) * nx + i] - g[i]));
        }
      }
    }
  }
  return scale > 0.0 ? worst / scale : worst;
}

void VolumetricSolver::release_subdomain_factorizations()
{
  for (auto &s : subdomains_)
  {
    s.release_factorization();
  }
}

}  // namespace hybridscat::vol
