#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hybridscat/types.hpp"

namespace hybridscat
{

//
// Scalar parameters of one run. The computational domain is the square (-a, a)^2 split
// into K x K subdomains, each holding L x L Chebyshev patches of order n1 x n2.
//
struct ProblemConfig
{
  double kappa = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double half_width = 1.0;
  int K = 1;
  int L = 1;
  int n1 = 8;
  int n2 = 8;
  int F = 16;

  // Graded change-of-variable order and near-singular distance ratio.
  int cov_order = 6;
  double near_threshold = 0.5;

  double gmres_tol = 1e-8;
  int gmres_max_iter = 200;

  // Fourier smoothing of the contrast; when off the contrast is sampled pointwise.
  bool fourier_smoothing = true;
  int pad_factor = 8;
  int interp_degree = 10;

  // Far-regime moments use Clenshaw-Curtis of order far_oversample * patch order.
  int far_oversample = 1;
  // Keep the subdomain LU factors after precomputation. When false they are rebuilt one
  // subdomain at a time for interior reconstruction; results are unchanged.
  bool retain_factorizations = true;

  // eta = alpha / (kappa beta)
  double eta() const { return alpha / (kappa * beta); }
  int patches_per_side() const { return K * L; }
  double patch_width() const { return 2.0 * half_width / (K * L); }
};

struct Box
{
  double xmin, xmax, ymin, ymax;
};

enum class ScattererKind
{
  constant_disc,
  gaussian_disc,
  square,
  four_disc_star,
  piecewise_union
};

std::string to_string(ScattererKind kind);
ScattererKind scatterer_kind_from_string(const std::string &name);

struct DiscComponent
{
  Point2 center;
  double radius = 1.0;
  double n2 = 1.0;
};

struct SquareComponent
{
  Point2 center;
  double half_side = 1.0;
  double n2 = 1.0;
};

// n^2 = base + amplitude * exp(-decay |x - center|^2) inside the disc.
struct GaussianDiscComponent
{
  Point2 center;
  double radius = 1.0;
  double base = 3.0;
  double amplitude = 2.0;
  double decay = 4.0;
};

// Square [c - s, c + s]^2 minus the four discs of radius s centred at its corners.
struct StarComponent
{
  Point2 center;
  double scale = 1.0;
  double n2 = 1.0;
};

using ScattererComponent =
    std::variant<DiscComponent, SquareComponent, GaussianDiscComponent, StarComponent>;

class RefractivityModel
{
public:
  RefractivityModel() = default;

  static RefractivityModel vacuum();
  static RefractivityModel constant_disc(Point2 center, double radius, double n2);
  static RefractivityModel gaussian_disc(Point2 center, double radius, double base = 3.0,
                                         double amplitude = 2.0, double decay = 4.0);
  static RefractivityModel square(Point2 center, double half_side, double n2);
  static RefractivityModel four_disc_star(Point2 center, double scale, double n2);
  static RefractivityModel piecewise_union(std::vector<ScattererComponent> parts);

  ScattererKind kind() const { return kind_; }
  const std::vector<ScattererComponent> &components() const { return components_; }
  bool is_vacuum() const { return components_.empty(); }

  double n_squared(Point2 x) const;
  // m(x) = 1 - n^2(x); exactly zero outside the support.
  double contrast(Point2 x) const { return 1.0 - n_squared(x); }

  // Bounding box of the support (empty model: degenerate box at the origin).
  Box support_box() const;
  double max_refractive_index() const;
  double min_n_squared() const;

  // Stable textual form, used for hashing and cache keys.
  std::string canonical() const;
  std::uint64_t hash() const;

private:
  ScattererKind kind_ = ScattererKind::piecewise_union;
  std::vector<ScattererComponent> components_;
};

double component_n_squared(const ScattererComponent &part, Point2 x, bool &inside);
Box component_box(const ScattererComponent &part);

struct Violation
{
  int index;  // stable identifier of the violated invariant
  std::string message;

  bool operator==(const Violation &) const = default;
};

struct ValidationReport
{
  std::vector<Violation> violations;
  double lambda_int = 0.0;  // 2 pi / (kappa max n)
  double mesh_spacing = 0.0;
  double points_per_wavelength = 0.0;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
  bool operator==(const ValidationReport &) const = default;
};

// Invariant identifiers carried in Violation::index.
namespace invariant
{
inline constexpr int kappa_positive = 1;
inline constexpr int half_width_positive = 2;
inline constexpr int partition_counts = 3;
inline constexpr int chebyshev_order = 4;
inline constexpr int fourier_order = 5;
inline constexpr int cov_order = 6;
inline constexpr int impedance_sign = 7;
inline constexpr int support_inside = 8;
inline constexpr int n_squared_positive = 9;
inline constexpr int solver_settings = 10;
inline constexpr int components_disjoint = 11;
}  // namespace invariant

ValidationReport validate(const ProblemConfig &config, const RefractivityModel &model);

inline double contrast(const RefractivityModel &model, Point2 x) { return model.contrast(x); }

// 64-bit FNV-1a, stable across platforms.
std::uint64_t fnv1a(const std::string &text);
std::string hex_hash(std::uint64_t h);

std::string canonical(const ProblemConfig &config);

}  // namespace hybridscat
