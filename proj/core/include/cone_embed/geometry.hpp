#pragma once

// Embedding spaces: Euclidean, Poincare ball, and the metric cone built over
// either of them.  A cone point is stored as a flat vector with the base
// coordinates first and the height s in [eps, 1-eps] as the trailing entry.

#include <span>
#include <variant>
#include <vector>

namespace cone_embed {

inline constexpr double kDefaultBoundaryEps = 1e-5;  // Poincare ball margin
inline constexpr double kDefaultHeightEps = 1e-3;    // cone height clamp

struct EuclideanSpace {
  int dim = 1;
};

struct PoincareBall {
  int dim = 1;
  double boundary_eps = kDefaultBoundaryEps;  // points kept at norm <= 1 - boundary_eps
};

using BaseSpace = std::variant<EuclideanSpace, PoincareBall>;

struct MetricCone {
  BaseSpace base;
  double beta = 1.0;  // generatrix length; smaller beta -> more negative curvature
  double eps = kDefaultHeightEps;
};

using EmbeddingSpace = std::variant<EuclideanSpace, PoincareBall, MetricCone>;

// Throws std::invalid_argument when a field violates its range.
void validate(const EmbeddingSpace& space);

// Number of stored coordinates per point (base dim + 1 for cones).
int ambient_dim(const EmbeddingSpace& space);
int base_dim(const EmbeddingSpace& space);
bool is_cone(const EmbeddingSpace& space);
const char* space_kind(const EmbeddingSpace& space);  // "euclidean" | "poincare" | "cone"

// ---------------------------------------------------------------------------
// Distances

double euclidean_distance(std::span<const double> x, std::span<const double> y);

// arcosh(1 + ||x-y||^2 / ((1-||x||^2)(1-||y||^2))); requires ||x||,||y|| < 1.
double poincare_distance(std::span<const double> x, std::span<const double> y);

double base_distance(const BaseSpace& base, std::span<const double> x,
                     std::span<const double> y);

// Opening angle of the circle section: pi * min(base_dist / beta, 1).
double cone_angle(double base_dist, double beta);

// beta * sqrt(s^2 + t^2 - 2 s t cos(cone_angle(base_dist, beta))).
// Fast path for lift mode: the base coordinates are never touched.
double cone_distance(const MetricCone& cone, double s, double t, double base_dist);

// Full cone distance between stored points (base coords + trailing height).
double cone_distance(const MetricCone& cone, std::span<const double> p,
                     std::span<const double> q);

double distance(const EmbeddingSpace& space, std::span<const double> x,
                std::span<const double> y);

// ---------------------------------------------------------------------------
// Distance gradients (Euclidean partials of d; used by the SGD and checked
// against central finite differences).  Each accumulates w * dd/dx into gx
// and w * dd/dy into gy and returns the distance.  At non-differentiable
// points (coincident points, the base-distance kink at d_Z = beta) the
// accumulated subgradient is zero.

double euclidean_distance_grad(std::span<const double> x, std::span<const double> y,
                               double w, std::span<double> gx, std::span<double> gy);

double poincare_distance_grad(std::span<const double> x, std::span<const double> y,
                              double w, std::span<double> gx, std::span<double> gy);

// Height partials only, with the base distance taken as a constant.
double cone_distance_grad(const MetricCone& cone, double s, double t,
                          double base_dist, double w, double& gs, double& gt);

// Full partials (base block + height).  gp/gq must be ambient-sized.
double cone_distance_grad(const MetricCone& cone, std::span<const double> p,
                          std::span<const double> q, double w,
                          std::span<double> gp, std::span<double> gq);

double distance_grad(const EmbeddingSpace& space, std::span<const double> x,
                     std::span<const double> y, double w, std::span<double> gx,
                     std::span<double> gy);

// ---------------------------------------------------------------------------
// Riemannian SGD pieces

// In place: grad <- g^{-1} grad at the given point.
//   Euclidean:  identity
//   Poincare:   grad *= ((1 - ||x||^2) / 2)^2
//   cone:       base block /= pi^2 s^2 (times the base scaling), height /= beta^2
void riemannian_rescale(const EmbeddingSpace& space, std::span<const double> point,
                        std::span<double> grad);

std::vector<double> riemannian_rescaled(const EmbeddingSpace& space,
                                        std::span<const double> point,
                                        std::span<const double> grad);

// In place: clamp cone heights to [eps, 1-eps]; pull Poincare points with
// norm >= 1 - boundary_eps back onto that radius; identity for Euclidean.
void project(const EmbeddingSpace& space, std::span<double> point);

// Metric tensor diagonal/conformal factors, exposed for the consistency and
// inverse-metric tests: fills `metric_diag` (ambient-sized) with the diagonal
// of g at `point`.  All three spaces have (conformally) diagonal metrics.
void metric_diagonal(const EmbeddingSpace& space, std::span<const double> point,
                     std::span<double> metric_diag);

// ---------------------------------------------------------------------------
// Curvature of the cone over an n-dimensional Riemannian base (formula
// evaluators; not used inside training)

// (pi^-2 R - n(n-1) beta^-2) / s^2; throws for s <= 0 (apex).
double cone_scalar_curvature(double base_scalar_r, int n, double beta, double s);

// Ricci entry of the cone at base indices (i,j), where index 0 is the radial
// coordinate: zero if i == 0 or j == 0, otherwise
// base_ricci - pi^2 (n-1) beta^-2 * base_metric.
double cone_ricci_curvature(double base_ricci_entry, double base_metric_entry,
                            int n, double beta, int i, int j);

// ---------------------------------------------------------------------------
// Mobius gyro-translation of the Poincare ball: x -> a (+) x.  An isometry
// for every |a| < 1; moves the origin to a.
std::vector<double> poincare_isometry(std::span<const double> x,
                                      std::span<const double> a);

}  // namespace cone_embed
