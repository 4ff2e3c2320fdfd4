#include <cone_embed/identifiability.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <cstdio>
#include <cstdlib>

#include <cone_embed/errors.hpp>

namespace cone_embed {

namespace {

constexpr double kPi = std::numbers::pi;

// Gaussian elimination with partial pivoting; a is n x n row-major, b length
// n; solution written into b.  Returns false on a (near-)singular pivot.
bool dense_solve(std::vector<double>& a, std::vector<double>& b, int n) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (std::abs(a[pivot * n + col]) < 1e-14) return false;
    if (pivot != col) {
      for (int c = col; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
      std::swap(b[pivot], b[col]);
    }
    const double inv = 1.0 / a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] * inv;
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * b[c];
    b[r] = s / a[r * n + r];
  }
  return true;
}

struct PairSystem {
  int n = 0;
  std::vector<double> cos_theta;  // n x n
  std::vector<double> a_sq;       // (cone_dist / beta)^2, n x n

  double c(int i, int j) const { return cos_theta[static_cast<std::size_t>(i) * n + j]; }
  double asq(int i, int j) const { return a_sq[static_cast<std::size_t>(i) * n + j]; }

  double residual(int i, int j, double ti, double tj) const {
    return ti * ti + tj * tj - 2.0 * ti * tj * c(i, j) - asq(i, j);
  }
};

PairSystem prepare(const HeightRecoveryProblem& p) {
  PairSystem s;
  s.n = p.n;
  s.cos_theta.resize(static_cast<std::size_t>(p.n) * p.n, 1.0);
  s.a_sq.resize(static_cast<std::size_t>(p.n) * p.n, 0.0);
  for (int i = 0; i < p.n; ++i) {
    for (int j = 0; j < p.n; ++j) {
      if (i == j) continue;
      s.cos_theta[static_cast<std::size_t>(i) * p.n + j] = std::cos(p.angle(i, j));
      const double a = p.cone_dist(i, j) / p.beta;
      s.a_sq[static_cast<std::size_t>(i) * p.n + j] = a * a;
    }
  }
  return s;
}

// All-pair residuals for the nodes listed in idx (heights parallel to idx).
void sub_residuals(const PairSystem& s, std::span<const int> idx,
                   std::span<const double> t, std::vector<double>& r) {
  r.clear();
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j)
      r.push_back(s.residual(idx[i], idx[j], t[i], t[j]));
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double sq_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x * x;
  return m;
}

// Damped Newton (square, m == 3) or Gauss-Newton (overdetermined) on the
// pair system restricted to idx.  Returns max |residual| at the final point.
double refine(const PairSystem& s, std::span<const int> idx, std::vector<double>& t,
              int iters, double stop_tol) {
  const int m = static_cast<int>(idx.size());
  std::vector<double> r, r_new, mat, rhs, step;
  std::vector<double> t_new(t.size());
  sub_residuals(s, idx, t, r);
  for (int it = 0; it < iters; ++it) {
    if (max_abs(r) <= stop_tol) break;
    // Jacobian rows: d r_{ij} / d t_i = 2 t_i - 2 t_j c_ij (two entries per row).
    mat.assign(static_cast<std::size_t>(m) * m, 0.0);
    rhs.assign(m, 0.0);
    if (m == 3) {
      int row = 0;
      for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j, ++row) {
          const double cij = s.c(idx[i], idx[j]);
          mat[row * m + i] = 2.0 * t[i] - 2.0 * t[j] * cij;
          mat[row * m + j] = 2.0 * t[j] - 2.0 * t[i] * cij;
          rhs[row] = -r[row];
        }
      }
    } else {
      // Normal equations J^T J step = -J^T r.
      int row = 0;
      for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j, ++row) {
          const double cij = s.c(idx[i], idx[j]);
          const double gi = 2.0 * t[i] - 2.0 * t[j] * cij;
          const double gj = 2.0 * t[j] - 2.0 * t[i] * cij;
          mat[i * m + i] += gi * gi;
          mat[j * m + j] += gj * gj;
          mat[i * m + j] += gi * gj;
          mat[j * m + i] += gi * gj;
          rhs[i] -= gi * r[row];
          rhs[j] -= gj * r[row];
        }
      }
    }
    step = rhs;
    if (!dense_solve(mat, step, m)) break;
    const double base_norm = sq_norm(r);
    double lambda = 1.0;
    bool accepted = false;
    for (int half = 0; half < 20; ++half, lambda *= 0.5) {
      for (int k = 0; k < m; ++k) t_new[k] = t[k] + lambda * step[k];
      sub_residuals(s, idx, t_new, r_new);
      if (sq_norm(r_new) < base_norm) {
        t = t_new;
        r = r_new;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return max_abs(r);
}

struct Candidate {
  std::vector<double> heights;
  double max_residual = 0.0;
};

void dedup_and_sort(std::vector<Candidate>& cands, double merge_tol) {
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) {
              return a.max_residual < b.max_residual;
            });
  std::vector<Candidate> kept;
  for (auto& c : cands) {
    bool dup = false;
    for (const auto& k : kept) {
      double d = 0.0;
      for (std::size_t i = 0; i < c.heights.size(); ++i)
        d = std::max(d, std::abs(c.heights[i] - k.heights[i]));
      if (d <= merge_tol) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(std::move(c));
  }
  std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) {
    return a.heights < b.heights;
  });
  cands = std::move(kept);
}

// Triangle stage: dense grid over [0,1]^3, Newton from the grid's local
// minima of the squared residual norm.
std::vector<Candidate> solve_triangle(const PairSystem& s, const std::array<int, 3>& tri,
                                      const RecoveryOptions& opt, double& best_residual) {
  const int res = std::max(opt.grid_resolution, 2);
  const double step = 1.0 / (res - 1);
  const double c01 = s.c(tri[0], tri[1]);
  const double c02 = s.c(tri[0], tri[2]);
  const double c12 = s.c(tri[1], tri[2]);
  const double a01 = s.asq(tri[0], tri[1]);
  const double a02 = s.asq(tri[0], tri[2]);
  const double a12 = s.asq(tri[1], tri[2]);

  std::vector<double> val(static_cast<std::size_t>(res) * res * res);
  for (int i = 0; i < res; ++i) {
    const double t0 = i * step;
    for (int j = 0; j < res; ++j) {
      const double t1 = j * step;
      const double r01 = t0 * t0 + t1 * t1 - 2.0 * t0 * t1 * c01 - a01;
      for (int k = 0; k < res; ++k) {
        const double t2 = k * step;
        const double r02 = t0 * t0 + t2 * t2 - 2.0 * t0 * t2 * c02 - a02;
        const double r12 = t1 * t1 + t2 * t2 - 2.0 * t1 * t2 * c12 - a12;
        val[(static_cast<std::size_t>(i) * res + j) * res + k] =
            r01 * r01 + r02 * r02 + r12 * r12;
      }
    }
  }

  auto at = [&](int i, int j, int k) {
    return val[(static_cast<std::size_t>(i) * res + j) * res + k];
  };
  std::vector<std::array<int, 3>> starts;
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      for (int k = 0; k < res; ++k) {
        const double v = at(i, j, k);
        if (i > 0 && at(i - 1, j, k) < v) continue;
        if (i + 1 < res && at(i + 1, j, k) < v) continue;
        if (j > 0 && at(i, j - 1, k) < v) continue;
        if (j + 1 < res && at(i, j + 1, k) < v) continue;
        if (k > 0 && at(i, j, k - 1) < v) continue;
        if (k + 1 < res && at(i, j, k + 1) < v) continue;
        starts.push_back({i, j, k});
      }
    }
  }
  std::sort(starts.begin(), starts.end(),
            [&](const auto& a, const auto& b) {
              return at(a[0], a[1], a[2]) < at(b[0], b[1], b[2]);
            });
  constexpr std::size_t kMaxStarts = 4096;
  if (starts.size() > kMaxStarts) starts.resize(kMaxStarts);

  const std::array<int, 3> idx = tri;
  const double stop = std::min(opt.residual_tol * 1e-2, 1e-12);
  std::vector<Candidate> out;
  for (const auto& st : starts) {
    std::vector<double> t = {st[0] * step, st[1] * step, st[2] * step};
    const double resid = refine(s, idx, t, opt.refine_iters, stop);
    best_residual = std::min(best_residual, resid);
    if (resid > opt.residual_tol) continue;
    bool in_box = true;
    for (double& x : t) {
      if (x < -1e-8 || x > 1.0 + 1e-8) in_box = false;
      x = std::clamp(x, 0.0, 1.0);
    }
    if (!in_box) continue;
    out.push_back({std::move(t), resid});
  }
  dedup_and_sort(out, opt.merge_tol);
  return out;
}

}  // namespace

double HeightRecoveryProblem::angle(int i, int j) const {
  return kPi * std::min(base_dist(i, j) / beta, 1.0);
}

HeightRecoveryProblem HeightRecoveryProblem::from_matrices(
    double beta, std::vector<double> base_dists, std::vector<double> cone_dists) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  const auto n_sq = base_dists.size();
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n_sq))));
  if (static_cast<std::size_t>(n) * n != n_sq || cone_dists.size() != n_sq)
    throw std::invalid_argument("distance matrices must be square and equally sized");
  auto check = [&](const std::vector<double>& m, const char* what) {
    for (int i = 0; i < n; ++i) {
      if (std::abs(m[static_cast<std::size_t>(i) * n + i]) > 1e-9)
        throw DataError(std::string(what) + ": nonzero diagonal");
      for (int j = 0; j < n; ++j) {
        const double v = m[static_cast<std::size_t>(i) * n + j];
        if (v < 0.0) throw DataError(std::string(what) + ": negative entry");
        if (std::abs(v - m[static_cast<std::size_t>(j) * n + i]) > 1e-9)
          throw DataError(std::string(what) + ": not symmetric");
      }
    }
  };
  check(base_dists, "base distance matrix");
  check(cone_dists, "cone distance matrix");
  HeightRecoveryProblem p;
  p.n = n;
  p.beta = beta;
  p.base_dists = std::move(base_dists);
  p.cone_dists = std::move(cone_dists);
  return p;
}

HeightRecoveryProblem HeightRecoveryProblem::from_heights(
    double beta, std::vector<double> base_dists, std::span<const double> heights) {
  const int n = static_cast<int>(heights.size());
  if (base_dists.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("base distance matrix size does not match heights");
  std::vector<double> cone(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double theta =
          kPi * std::min(base_dists[static_cast<std::size_t>(i) * n + j] / beta, 1.0);
      const double q = heights[i] * heights[i] + heights[j] * heights[j] -
                       2.0 * heights[i] * heights[j] * std::cos(theta);
      const double d = beta * std::sqrt(std::max(q, 0.0));
      cone[static_cast<std::size_t>(i) * n + j] = d;
      cone[static_cast<std::size_t>(j) * n + i] = d;
    }
  }
  return from_matrices(beta, std::move(base_dists), std::move(cone));
}

std::vector<double> residuals(std::span<const double> heights,
                              const HeightRecoveryProblem& problem) {
  if (static_cast<int>(heights.size()) != problem.n)
    throw std::invalid_argument("height vector size does not match problem");
  const PairSystem s = prepare(problem);
  std::vector<double> r;
  r.reserve(static_cast<std::size_t>(problem.n) * (problem.n - 1) / 2);
  for (int i = 0; i < problem.n; ++i)
    for (int j = i + 1; j < problem.n; ++j)
      r.push_back(s.residual(i, j, heights[i], heights[j]));
  return r;
}

double tetra_volume_poly(double theta1, double theta2, double theta3) {
  const double c1 = std::cos(theta1);
  const double c2 = std::cos(theta2);
  const double c3 = std::cos(theta3);
  return 1.0 + 2.0 * c1 * c2 * c3 - c1 * c1 - c2 * c2 - c3 * c3;
}

const char* to_string(Degeneracy d) {
  switch (d) {
    case Degeneracy::generic: return "generic";
    case Degeneracy::collinear: return "collinear";
    default: return "saturated";
  }
}

Degeneracy check_degeneracy(const HeightRecoveryProblem& problem, double vol_tol) {
  if (problem.n < 3) throw std::invalid_argument("degeneracy check needs n >= 3");
  bool saturated = false;
  for (int i = 0; i < problem.n; ++i) {
    for (int j = i + 1; j < problem.n; ++j) {
      for (int k = j + 1; k < problem.n; ++k) {
        const double t1 = problem.angle(j, k);
        const double t2 = problem.angle(i, k);
        const double t3 = problem.angle(i, j);
        const double sum = t1 + t2 + t3;
        if (sum > 2.0 * kPi) {
          saturated = true;
          continue;
        }
        if (std::abs(tetra_volume_poly(t1, t2, t3)) < vol_tol)
          return Degeneracy::collinear;
      }
    }
  }
  return saturated ? Degeneracy::saturated : Degeneracy::generic;
}

SolutionSet recover_heights(const HeightRecoveryProblem& problem,
                            const RecoveryOptions& options) {
  if (problem.n < 3) throw std::invalid_argument("height recovery needs n >= 3");
  const PairSystem s = prepare(problem);
  double best_residual = std::numeric_limits<double>::infinity();

  std::vector<Candidate> finals;
  if (problem.n == 3) {
    finals = solve_triangle(s, {0, 1, 2}, options, best_residual);
  } else {
    // Anchor on the least degenerate triangle.
    std::array<int, 3> anchor = {0, 1, 2};
    double best_v = -1.0;
    for (int i = 0; i < problem.n; ++i) {
      for (int j = i + 1; j < problem.n; ++j) {
        for (int k = j + 1; k < problem.n; ++k) {
          const double v = std::abs(tetra_volume_poly(
              problem.angle(j, k), problem.angle(i, k), problem.angle(i, j)));
          if (v > best_v) {
            best_v = v;
            anchor = {i, j, k};
          }
        }
      }
    }

    std::vector<Candidate> partial = solve_triangle(s, anchor, options, best_residual);
    if (std::getenv("CONE_ID_DEBUG")) fprintf(stderr, "anchor %d %d %d |v|=%g tri_solutions=%zu\n", anchor[0], anchor[1], anchor[2], best_v, partial.size());
    constexpr std::size_t kMaxCandidates = 64;
    const double ext_tol = 1e-6;

    // Extend one node at a time; each anchor vertex gives a quadratic in the
    // new height and all three must agree.
    std::vector<int> order;
    for (int v = 0; v < problem.n; ++v)
      if (v != anchor[0] && v != anchor[1] && v != anchor[2]) order.push_back(v);

    // Candidate heights are stored in full-index order as we go: indices
    // anchor[0..2] first, then `order` nodes appended.
    std::vector<int> placed(anchor.begin(), anchor.end());
    for (int node : order) {
      std::vector<Candidate> extended;
      for (const auto& cand : partial) {
        if (extended.size() >= kMaxCandidates) break;
        std::vector<double> taus;
        const double t0 = cand.heights[0];  // anchor[0]'s height
        const double c0 = s.c(anchor[0], node);
        const double disc =
            s.asq(anchor[0], node) - t0 * t0 * (1.0 - c0 * c0);
        if (disc >= -1e-10) {
          const double root = std::sqrt(std::max(disc, 0.0));
          taus.push_back(t0 * c0 + root);
          if (root > 1e-12) taus.push_back(t0 * c0 - root);
        }
        for (double tau : taus) {
          if (tau < -1e-6 || tau > 1.0 + 1e-6) continue;
          bool ok = true;
          for (int a = 0; a < 3 && ok; ++a) {
            const double ta = cand.heights[a];
            if (std::abs(s.residual(anchor[a], node, ta, tau)) > ext_tol) ok = false;
          }
          if (!ok) continue;
          Candidate next = cand;
          next.heights.push_back(std::clamp(tau, 0.0, 1.0));
          extended.push_back(std::move(next));
          if (extended.size() >= kMaxCandidates) break;
        }
      }
      partial = std::move(extended);
      placed.push_back(node);
      if (std::getenv("CONE_ID_DEBUG") && (partial.size() != 1 || placed.size() < 8))
        fprintf(stderr, "after node %d: %zu candidates\n", node, partial.size());
      if (partial.empty()) break;
    }

    // Reorder heights into node-index order and polish on the full system.
    std::vector<int> all_idx(problem.n);
    for (int i = 0; i < problem.n; ++i) all_idx[i] = i;
    const double stop = std::min(options.residual_tol * 1e-2, 1e-12);
    for (auto& cand : partial) {
      std::vector<double> t(problem.n, 0.0);
      for (std::size_t p = 0; p < placed.size(); ++p) t[placed[p]] = cand.heights[p];
      std::vector<double> r0;
      sub_residuals(s, all_idx, t, r0);
      const double pre = max_abs(r0);
      const double resid = refine(s, all_idx, t, options.refine_iters, stop);
      if (std::getenv("CONE_ID_DEBUG")) fprintf(stderr, "polish: pre=%g post=%g\n", pre, resid);
      best_residual = std::min(best_residual, resid);
      if (resid > options.residual_tol) continue;
      bool in_box = true;
      for (double& x : t) {
        if (x < -1e-8 || x > 1.0 + 1e-8) in_box = false;
        x = std::clamp(x, 0.0, 1.0);
      }
      if (!in_box) continue;
      finals.push_back({std::move(t), resid});
    }
    dedup_and_sort(finals, options.merge_tol);
  }

  if (finals.empty()) {
    throw NumericalError(
        "no height assignment reaches residual tolerance " +
        std::to_string(options.residual_tol) + " (best max residual " +
        std::to_string(best_residual) + "); input distances are inconsistent");
  }
  SolutionSet set;
  set.residual_tol = options.residual_tol;
  for (auto& c : finals) {
    set.solutions.push_back(std::move(c.heights));
    set.max_residuals.push_back(c.max_residual);
  }
  return set;
}

}  // namespace cone_embed
