#pragma once

// Recovers cone heights from base positions plus cone distances and counts
// how many height assignments are consistent — the numerical counterpart of
// the identifiability guarantees (at most four candidates for three points,
// uniqueness for generic configurations and for well-separated bases).

#include <span>
#include <string>
#include <vector>

namespace cone_embed {

struct HeightRecoveryProblem {
  int n = 0;
  double beta = 1.0;
  std::vector<double> base_dists;  // n x n, symmetric, zero diagonal
  std::vector<double> cone_dists;  // n x n, symmetric, zero diagonal

  double base_dist(int i, int j) const {
    return base_dists[static_cast<std::size_t>(i) * n + j];
  }
  double cone_dist(int i, int j) const {
    return cone_dists[static_cast<std::size_t>(i) * n + j];
  }
  // theta_ij = pi * min(base_dist / beta, 1).
  double angle(int i, int j) const;

  // Validates symmetry, zero diagonal and nonnegativity (tolerance 1e-9).
  static HeightRecoveryProblem from_matrices(double beta,
                                             std::vector<double> base_dists,
                                             std::vector<double> cone_dists);
  // Builds the cone-distance matrix from known heights (construction helper).
  static HeightRecoveryProblem from_heights(double beta,
                                            std::vector<double> base_dists,
                                            std::span<const double> heights);
};

// One residual per unordered pair (i < j), lexicographic order:
//   t_i^2 + t_j^2 - 2 t_i t_j cos(theta_ij) - (cone_dist_ij / beta)^2.
// The cone distance enters in units of beta, matching the law of cosines on
// the circle section of radius beta.
std::vector<double> residuals(std::span<const double> heights,
                              const HeightRecoveryProblem& problem);

struct RecoveryOptions {
  int grid_resolution = 50;    // per axis, triangle stage
  int refine_iters = 40;       // damped Newton / Gauss-Newton iterations
  double residual_tol = 1e-10; // max |residual| accepted after refinement
  double merge_tol = 1e-6;     // sup-norm dedup threshold
};

struct SolutionSet {
  std::vector<std::vector<double>> solutions;  // heights in [0,1]^n
  std::vector<double> max_residuals;           // per solution
  double residual_tol = 0.0;
};

// Multi-start search.  n == 3: dense grid over [0,1]^3 with damped Newton
// refinement from the grid's local minima.  n > 3: solves the least
// degenerate triangle, extends each candidate one node at a time through the
// per-node quadratics, then polishes on the full pair system.  Throws
// NumericalError when nothing reaches residual_tol.
SolutionSet recover_heights(const HeightRecoveryProblem& problem,
                            const RecoveryOptions& options = {});

// v(theta) = 1 + 2 cos t1 cos t2 cos t3 - cos^2 t1 - cos^2 t2 - cos^2 t3.
// Proportional to the squared volume of the apex tetrahedron: zero for
// collinear base triples, negative once the angle sum exceeds 2 pi.
double tetra_volume_poly(double theta1, double theta2, double theta3);

enum class Degeneracy { generic, collinear, saturated };
const char* to_string(Degeneracy d);

// collinear when some triangle has |v(theta)| < vol_tol with angle sum
// <= 2 pi; saturated when some triangle's angle sum exceeds 2 pi; generic
// otherwise.
Degeneracy check_degeneracy(const HeightRecoveryProblem& problem,
                            double vol_tol = 1e-9);

}  // namespace cone_embed
