#include <cone_embed/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cone_embed {

namespace {

constexpr double kPi = std::numbers::pi;

void check_same_dim(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()));
  }
}

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double squared_dist(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void check_in_ball(std::span<const double> x, const char* what) {
  if (squared_norm(x) >= 1.0) {
    throw std::invalid_argument(std::string(what) + " lies on or outside the unit ball");
  }
}

}  // namespace

void validate(const EmbeddingSpace& space) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, EuclideanSpace>) {
          if (s.dim < 1) throw std::invalid_argument("euclidean dim must be >= 1");
        } else if constexpr (std::is_same_v<T, PoincareBall>) {
          if (s.dim < 1) throw std::invalid_argument("poincare dim must be >= 1");
          if (!(s.boundary_eps > 0.0 && s.boundary_eps < 1.0))
            throw std::invalid_argument("boundary_eps must be in (0, 1)");
        } else {
          if (!(s.beta > 0.0)) throw std::invalid_argument("beta must be positive");
          if (!(s.eps > 0.0 && s.eps < 0.5))
            throw std::invalid_argument("cone eps must be in (0, 1/2)");
          std::visit([](const auto& b) { validate(EmbeddingSpace{b}); }, s.base);
        }
      },
      space);
}

int base_dim(const EmbeddingSpace& space) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MetricCone>) {
          return std::visit([](const auto& b) { return b.dim; }, s.base);
        } else {
          return s.dim;
        }
      },
      space);
}

int ambient_dim(const EmbeddingSpace& space) {
  return base_dim(space) + (is_cone(space) ? 1 : 0);
}

bool is_cone(const EmbeddingSpace& space) {
  return std::holds_alternative<MetricCone>(space);
}

const char* space_kind(const EmbeddingSpace& space) {
  if (std::holds_alternative<EuclideanSpace>(space)) return "euclidean";
  if (std::holds_alternative<PoincareBall>(space)) return "poincare";
  return "cone";
}

// ---------------------------------------------------------------------------

double euclidean_distance(std::span<const double> x, std::span<const double> y) {
  check_same_dim(x, y);
  return std::sqrt(squared_dist(x, y));
}

double poincare_distance(std::span<const double> x, std::span<const double> y) {
  check_same_dim(x, y);
  check_in_ball(x, "first point");
  check_in_ball(y, "second point");
  const double ax = 1.0 - squared_norm(x);
  const double ay = 1.0 - squared_norm(y);
  double gamma = 1.0 + 2.0 * squared_dist(x, y) / (ax * ay);
  if (gamma < 1.0) gamma = 1.0;  // rounding
  return std::acosh(gamma);
}

double base_distance(const BaseSpace& base, std::span<const double> x,
                     std::span<const double> y) {
  if (std::holds_alternative<EuclideanSpace>(base)) return euclidean_distance(x, y);
  return poincare_distance(x, y);
}

double cone_angle(double base_dist, double beta) {
  return kPi * std::min(base_dist / beta, 1.0);
}

double cone_distance(const MetricCone& cone, double s, double t, double base_dist) {
  if (base_dist < 0.0) throw std::invalid_argument("negative base distance");
  const double c = std::cos(cone_angle(base_dist, cone.beta));
  double q = s * s + t * t - 2.0 * s * t * c;
  if (q < 0.0) q = 0.0;  // rounding near coincident points
  return cone.beta * std::sqrt(q);
}

double cone_distance(const MetricCone& cone, std::span<const double> p,
                     std::span<const double> q) {
  check_same_dim(p, q);
  const std::size_t d = p.size() - 1;
  const double bd = base_distance(cone.base, p.first(d), q.first(d));
  return cone_distance(cone, p[d], q[d], bd);
}

double distance(const EmbeddingSpace& space, std::span<const double> x,
                std::span<const double> y) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, EuclideanSpace>) {
          return euclidean_distance(x, y);
        } else if constexpr (std::is_same_v<T, PoincareBall>) {
          return poincare_distance(x, y);
        } else {
          return cone_distance(s, x, y);
        }
      },
      space);
}

// ---------------------------------------------------------------------------
// Gradients

double euclidean_distance_grad(std::span<const double> x, std::span<const double> y,
                               double w, std::span<double> gx, std::span<double> gy) {
  check_same_dim(x, y);
  const double d = std::sqrt(squared_dist(x, y));
  if (d > 0.0) {
    const double c = w / d;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = c * (x[i] - y[i]);
      gx[i] += u;
      gy[i] -= u;
    }
  }
  return d;
}

double poincare_distance_grad(std::span<const double> x, std::span<const double> y,
                              double w, std::span<double> gx, std::span<double> gy) {
  check_same_dim(x, y);
  check_in_ball(x, "first point");
  check_in_ball(y, "second point");
  const double ax = 1.0 - squared_norm(x);
  const double ay = 1.0 - squared_norm(y);
  const double n2 = squared_dist(x, y);
  double gamma = 1.0 + 2.0 * n2 / (ax * ay);
  if (gamma <= 1.0) return 0.0;  // coincident: zero subgradient
  // d = arcosh(gamma); dgamma/dx = 4/(ax ay) [ (x-y) + (n2/ax) x ]
  const double c = w * 4.0 / (ax * ay * std::sqrt(gamma * gamma - 1.0));
  for (std::size_t i = 0; i < x.size(); ++i) {
    gx[i] += c * ((x[i] - y[i]) + (n2 / ax) * x[i]);
    gy[i] += c * ((y[i] - x[i]) + (n2 / ay) * y[i]);
  }
  return std::acosh(gamma);
}

double cone_distance_grad(const MetricCone& cone, double s, double t,
                          double base_dist, double w, double& gs, double& gt) {
  if (base_dist < 0.0) throw std::invalid_argument("negative base distance");
  const double c = std::cos(cone_angle(base_dist, cone.beta));
  double qv = s * s + t * t - 2.0 * s * t * c;
  if (qv <= 0.0) return 0.0;
  const double root = std::sqrt(qv);
  gs += w * cone.beta * (s - t * c) / root;
  gt += w * cone.beta * (t - s * c) / root;
  return cone.beta * root;
}

double cone_distance_grad(const MetricCone& cone, std::span<const double> p,
                          std::span<const double> q, double w,
                          std::span<double> gp, std::span<double> gq) {
  check_same_dim(p, q);
  const std::size_t d = p.size() - 1;
  const auto pb = p.first(d);
  const auto qb = q.first(d);
  const double bd = base_distance(cone.base, pb, qb);
  const double s = p[d];
  const double t = q[d];
  const double theta = cone_angle(bd, cone.beta);
  const double c = std::cos(theta);
  double qv = s * s + t * t - 2.0 * s * t * c;
  if (qv <= 0.0) return 0.0;
  const double root = std::sqrt(qv);
  gp[d] += w * cone.beta * (s - t * c) / root;
  gq[d] += w * cone.beta * (t - s * c) / root;
  // Base block: dd/d(d_Z) = pi s t sin(theta) / sqrt(q), zero past the
  // angle saturation kink (subgradient 0 at d_Z >= beta).
  if (bd < cone.beta && bd > 0.0) {
    const double dd_dbd = kPi * s * t * std::sin(theta) / root;
    if (std::holds_alternative<EuclideanSpace>(cone.base)) {
      euclidean_distance_grad(pb, qb, w * dd_dbd, gp.first(d), gq.first(d));
    } else {
      poincare_distance_grad(pb, qb, w * dd_dbd, gp.first(d), gq.first(d));
    }
  }
  return cone.beta * root;
}

double distance_grad(const EmbeddingSpace& space, std::span<const double> x,
                     std::span<const double> y, double w, std::span<double> gx,
                     std::span<double> gy) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, EuclideanSpace>) {
          return euclidean_distance_grad(x, y, w, gx, gy);
        } else if constexpr (std::is_same_v<T, PoincareBall>) {
          return poincare_distance_grad(x, y, w, gx, gy);
        } else {
          return cone_distance_grad(s, x, y, w, gx, gy);
        }
      },
      space);
}

// ---------------------------------------------------------------------------

void riemannian_rescale(const EmbeddingSpace& space, std::span<const double> point,
                        std::span<double> grad) {
  if (point.size() != grad.size()) {
    throw std::invalid_argument("gradient dimension does not match point dimension");
  }
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, EuclideanSpace>) {
          // identity metric
        } else if constexpr (std::is_same_v<T, PoincareBall>) {
          const double f = (1.0 - squared_norm(point)) / 2.0;
          for (double& g : grad) g *= f * f;
        } else {
          const std::size_t d = point.size() - 1;
          const double h = point[d];
          double base_inv = 1.0 / (kPi * kPi * h * h);
          if (std::holds_alternative<PoincareBall>(s.base)) {
            const double f = (1.0 - squared_norm(point.first(d))) / 2.0;
            base_inv *= f * f;
          }
          for (std::size_t i = 0; i < d; ++i) grad[i] *= base_inv;
          grad[d] /= s.beta * s.beta;
        }
      },
      space);
}

std::vector<double> riemannian_rescaled(const EmbeddingSpace& space,
                                        std::span<const double> point,
                                        std::span<const double> grad) {
  std::vector<double> out(grad.begin(), grad.end());
  riemannian_rescale(space, point, out);
  return out;
}

void project(const EmbeddingSpace& space, std::span<double> point) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, EuclideanSpace>) {
          // identity
        } else if constexpr (std::is_same_v<T, PoincareBall>) {
          const double limit = 1.0 - s.boundary_eps;
          const double n = std::sqrt(squared_norm(point));
          if (n >= limit) {
            const double f = limit / n;
            for (double& v : point) v *= f;
          }
        } else {
          const std::size_t d = point.size() - 1;
          point[d] = std::clamp(point[d], s.eps, 1.0 - s.eps);
          if (const auto* ball = std::get_if<PoincareBall>(&s.base)) {
            project(EmbeddingSpace{*ball}, point.first(d));
          }
        }
      },
      space);
}

void metric_diagonal(const EmbeddingSpace& space, std::span<const double> point,
                     std::span<double> metric_diag) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, EuclideanSpace>) {
          for (double& m : metric_diag) m = 1.0;
        } else if constexpr (std::is_same_v<T, PoincareBall>) {
          const double lam = 2.0 / (1.0 - squared_norm(point));
          for (double& m : metric_diag) m = lam * lam;
        } else {
          const std::size_t d = point.size() - 1;
          const double h = point[d];
          double base = kPi * kPi * h * h;
          if (std::holds_alternative<PoincareBall>(s.base)) {
            const double lam = 2.0 / (1.0 - squared_norm(point.first(d)));
            base *= lam * lam;
          }
          for (std::size_t i = 0; i < d; ++i) metric_diag[i] = base;
          metric_diag[d] = s.beta * s.beta;
        }
      },
      space);
}

// ---------------------------------------------------------------------------

double cone_scalar_curvature(double base_scalar_r, int n, double beta, double s) {
  if (n < 1) throw std::invalid_argument("base dimension must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!(s > 0.0)) throw std::invalid_argument("scalar curvature undefined at the apex (s <= 0)");
  const double pi_sq = kPi * kPi;
  return (base_scalar_r / pi_sq - static_cast<double>(n) * (n - 1) / (beta * beta)) /
         (s * s);
}

double cone_ricci_curvature(double base_ricci_entry, double base_metric_entry,
                            int n, double beta, int i, int j) {
  if (n < 1) throw std::invalid_argument("base dimension must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (i < 0 || j < 0 || i > n || j > n) throw std::invalid_argument("index out of range");
  if (i == 0 || j == 0) return 0.0;  // radial row/column vanishes
  const double pi_sq = kPi * kPi;
  return base_ricci_entry - pi_sq * (n - 1) / (beta * beta) * base_metric_entry;
}

// ---------------------------------------------------------------------------

std::vector<double> poincare_isometry(std::span<const double> x,
                                      std::span<const double> a) {
  check_same_dim(x, a);
  check_in_ball(x, "point");
  check_in_ball(a, "translation vector");
  // Mobius addition a (+) x.
  const double ax = dot(a, x);
  const double na = squared_norm(a);
  const double nx = squared_norm(x);
  const double ca = 1.0 + 2.0 * ax + nx;
  const double cx = 1.0 - na;
  const double den = 1.0 + 2.0 * ax + na * nx;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = (ca * a[i] + cx * x[i]) / den;
  }
  return out;
}

}  // namespace cone_embed
