#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <cone_embed/embedding.hpp>
#include <cone_embed/geometry.hpp>

namespace test_util {

using cone_embed::EmbeddingSpace;

inline std::vector<double> random_euclidean_point(std::mt19937_64& rng, int dim,
                                                  double radius = 2.0) {
  std::uniform_real_distribution<double> u(-radius, radius);
  std::vector<double> p(dim);
  for (double& v : p) v = u(rng);
  return p;
}

// Uniform direction, radius uniform in [0, max_norm]; stays off the boundary.
inline std::vector<double> random_ball_point(std::mt19937_64& rng, int dim,
                                             double max_norm = 0.9) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, max_norm);
  std::vector<double> p(dim);
  double n = 0.0;
  do {
    n = 0.0;
    for (double& v : p) {
      v = g(rng);
      n += v * v;
    }
  } while (n == 0.0);
  const double scale = u(rng) / std::sqrt(n);
  for (double& v : p) v *= scale;
  return p;
}

// Random point valid in `space` (cone rows carry a strictly interior height).
inline std::vector<double> random_point(std::mt19937_64& rng,
                                        const EmbeddingSpace& space) {
  using namespace cone_embed;
  if (const auto* e = std::get_if<EuclideanSpace>(&space))
    return random_euclidean_point(rng, e->dim);
  if (const auto* b = std::get_if<PoincareBall>(&space))
    return random_ball_point(rng, b->dim);
  const auto& cone = std::get<MetricCone>(space);
  std::vector<double> p = std::holds_alternative<EuclideanSpace>(cone.base)
                              ? random_euclidean_point(rng, base_dim(space))
                              : random_ball_point(rng, base_dim(space));
  std::uniform_real_distribution<double> h(0.05, 0.95);
  p.push_back(h(rng));
  return p;
}

// Central finite difference of f() with respect to x[k].
template <class F>
double central_diff(F&& f, std::vector<double>& x, std::size_t k, double h) {
  const double orig = x[k];
  x[k] = orig + h;
  const double fp = f();
  x[k] = orig - h;
  const double fm = f();
  x[k] = orig;
  return (fp - fm) / (2.0 * h);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace test_util
