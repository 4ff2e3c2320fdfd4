#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <cone_embed/errors.hpp>
#include <cone_embed/identifiability.hpp>

using namespace cone_embed;

namespace {

constexpr double kPi = std::numbers::pi;

struct Instance {
  HeightRecoveryProblem problem;
  std::vector<double> heights;
};

std::vector<double> plane_distances(const std::vector<std::array<double, 2>>& z) {
  const int n = static_cast<int>(z.size());
  std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = z[i][0] - z[j][0];
      const double dy = z[i][1] - z[j][1];
      const double dist = std::sqrt(dx * dx + dy * dy);
      d[static_cast<std::size_t>(i) * n + j] = dist;
      d[static_cast<std::size_t>(j) * n + i] = dist;
    }
  }
  return d;
}

double min_triple_volume(const HeightRecoveryProblem& p) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < p.n; ++i)
    for (int j = i + 1; j < p.n; ++j)
      for (int k = j + 1; k < p.n; ++k)
        best = std::min(best, std::abs(tetra_volume_poly(p.angle(j, k), p.angle(i, k),
                                                         p.angle(i, j))));
  return best;
}

// Random base points in the unit square with random heights; keeps the
// configuration away from collinearity so the instance is genuinely generic.
Instance generic_instance(std::mt19937_64& rng, int n, double beta) {
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::uniform_real_distribution<double> height(0.0, 1.0);
  for (;;) {
    std::vector<std::array<double, 2>> z(n);
    for (auto& p : z) p = {coord(rng), coord(rng)};
    std::vector<double> heights(n);
    for (double& h : heights) h = height(rng);
    auto problem =
        HeightRecoveryProblem::from_heights(beta, plane_distances(z), heights);
    if (min_triple_volume(problem) < 0.05) continue;
    return {std::move(problem), std::move(heights)};
  }
}

// All pairwise base distances at least beta / 2 (every angle >= pi/2).
Instance separated_instance(std::mt19937_64& rng, int n, double beta) {
  std::uniform_real_distribution<double> coord(0.0, 2.0);
  std::uniform_real_distribution<double> height(0.0, 1.0);
  for (;;) {
    std::vector<std::array<double, 2>> z(n);
    for (auto& p : z) p = {coord(rng), coord(rng)};
    const auto d = plane_distances(z);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = i + 1; j < n && ok; ++j)
        if (d[static_cast<std::size_t>(i) * n + j] < beta / 2.0) ok = false;
    if (!ok) continue;
    std::vector<double> heights(n);
    for (double& h : heights) h = height(rng);
    return {HeightRecoveryProblem::from_heights(beta, d, heights), heights};
  }
}

double sup_norm_to(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double best_match(const SolutionSet& set, const std::vector<double>& truth) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : set.solutions) best = std::min(best, sup_norm_to(s, truth));
  return best;
}

}  // namespace

TEST_CASE("residuals vanish at the constructed heights") {
  std::mt19937_64 rng(1);
  const Instance inst = generic_instance(rng, 4, 1.0);
  for (double r : residuals(inst.heights, inst.problem)) CHECK(std::abs(r) < 1e-12);
}

TEST_CASE("residuals at the zero vector are minus the normalized distances") {
  std::mt19937_64 rng(2);
  const Instance inst = generic_instance(rng, 3, 2.0);
  const std::vector<double> zero(3, 0.0);
  const auto r = residuals(zero, inst.problem);
  int idx = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j, ++idx) {
      const double a = inst.problem.cone_dist(i, j) / inst.problem.beta;
      CHECK(r[idx] == doctest::Approx(-a * a).epsilon(1e-14));
    }
  }
}

TEST_CASE("right-angle construction has zero residuals") {
  // All base distances beta/2 (equilateral): every theta is pi/2, so the
  // cone distances are beta sqrt(t_i^2 + t_j^2).
  const double beta = 1.0;
  std::vector<double> base(9, beta / 2.0);
  base[0] = base[4] = base[8] = 0.0;
  const std::vector<double> t{0.3, 0.4, 0.5};
  const auto problem = HeightRecoveryProblem::from_heights(beta, base, t);
  CHECK(problem.cone_dist(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  for (double r : residuals(t, problem)) CHECK(std::abs(r) < 1e-15);
}

TEST_CASE("tetrahedron volume polynomial") {
  CHECK(tetra_volume_poly(kPi / 2, kPi / 2, kPi / 2) == 1.0);
  // Angle sum exactly 2 pi sits on the degeneracy boundary.
  CHECK(std::abs(tetra_volume_poly(kPi, 0.0, kPi)) < 1e-15);
  // Past saturation the polynomial turns negative.
  CHECK(tetra_volume_poly(kPi, 2.0 * kPi / 3.0, kPi) ==
        doctest::Approx(-2.25).epsilon(1e-14));
  // Collinear identity: theta3 = theta1 + theta2 zeroes the polynomial.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, kPi / 2.0);
  for (int i = 0; i < 200; ++i) {
    const double t1 = u(rng), t2 = u(rng);
    CHECK(std::abs(tetra_volume_poly(t1, t2, t1 + t2)) < 1e-12);
  }
}

TEST_CASE("degeneracy classification") {
  SUBCASE("collinear points on a line") {
    std::vector<std::array<double, 2>> z{{0.0, 0.0}, {0.2, 0.0}, {0.5, 0.0}};
    const auto p = HeightRecoveryProblem::from_heights(
        1.0, plane_distances(z), std::vector<double>{0.5, 0.5, 0.5});
    CHECK(check_degeneracy(p) == Degeneracy::collinear);
  }
  SUBCASE("equilateral triangle with d = beta/3 is generic") {
    std::vector<double> base(9, 1.0 / 3.0);
    base[0] = base[4] = base[8] = 0.0;
    const auto p = HeightRecoveryProblem::from_heights(
        1.0, base, std::vector<double>{0.5, 0.5, 0.5});
    CHECK(tetra_volume_poly(p.angle(0, 1), p.angle(0, 2), p.angle(1, 2)) > 0.4);
    CHECK(check_degeneracy(p) == Degeneracy::generic);
  }
  SUBCASE("far-apart points saturate every angle") {
    std::vector<std::array<double, 2>> z{{0.0, 0.0}, {5.0, 0.0}, {0.0, 5.0}};
    const auto p = HeightRecoveryProblem::from_heights(
        1.0, plane_distances(z), std::vector<double>{0.2, 0.5, 0.8});
    CHECK(check_degeneracy(p) == Degeneracy::saturated);
  }
}

TEST_CASE("n=3 generic recovery: truth found, at most four candidates") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = generic_instance(rng, 3, 1.0);
    const SolutionSet set = recover_heights(inst.problem);
    CHECK(set.solutions.size() >= 1);
    CHECK(set.solutions.size() <= 4);
    CHECK(best_match(set, inst.heights) < 1e-8);
    for (const auto& s : set.solutions)
      for (double h : s) {
        CHECK(h >= 0.0);
        CHECK(h <= 1.0);
      }
  }
}

TEST_CASE("n=3 separated bases: unique recovery") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance inst = separated_instance(rng, 3, 1.0);
    const SolutionSet set = recover_heights(inst.problem);
    CHECK(set.solutions.size() == 1);
    CHECK(best_match(set, inst.heights) < 1e-8);
  }
}

TEST_CASE("n=4 generic recovery is essentially always unique") {
  std::mt19937_64 rng(12);
  int unique = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = generic_instance(rng, 4, 1.0);
    const SolutionSet set = recover_heights(inst.problem);
    CHECK(best_match(set, inst.heights) < 1e-8);
    if (set.solutions.size() == 1) ++unique;
  }
  CHECK(unique >= 19);
}

TEST_CASE("n=5 recovery through the extension path") {
  std::mt19937_64 rng(13);
  const Instance inst = generic_instance(rng, 5, 0.8);
  const SolutionSet set = recover_heights(inst.problem);
  CHECK(set.solutions.size() == 1);
  CHECK(best_match(set, inst.heights) < 1e-8);
  for (double r : set.max_residuals) CHECK(r <= set.residual_tol);
}

TEST_CASE("inconsistent distances raise a numerical error") {
  std::mt19937_64 rng(14);
  Instance inst = generic_instance(rng, 3, 1.0);
  // No heights in [0,1] can produce a normalized distance above 2.
  inst.problem.cone_dists[1] = inst.problem.cone_dists[3] = 10.0;
  CHECK_THROWS_AS(recover_heights(inst.problem), NumericalError);
}

TEST_CASE("collinear instance reports without crashing") {
  // The inscribed-angle construction admits a continuum of solutions; the
  // solver reports whatever refined candidates pass the residual gate.
  std::vector<std::array<double, 2>> z{{0.0, 0.0}, {0.3, 0.0}, {0.7, 0.0}};
  const auto problem = HeightRecoveryProblem::from_heights(
      1.0, plane_distances(z), std::vector<double>{0.6, 0.45, 0.55});
  CHECK(check_degeneracy(problem) == Degeneracy::collinear);
  const SolutionSet set = recover_heights(problem);
  CHECK(set.solutions.size() >= 1);
  for (double r : set.max_residuals) CHECK(r <= set.residual_tol);
  MESSAGE("collinear instance produced ", set.solutions.size(), " candidates");
}

TEST_CASE("problem construction validation") {
  std::vector<double> good(9, 0.5);
  good[0] = good[4] = good[8] = 0.0;
  CHECK_NOTHROW(HeightRecoveryProblem::from_matrices(1.0, good, good));

  auto asym = good;
  asym[1] = 0.7;
  CHECK_THROWS_AS(HeightRecoveryProblem::from_matrices(1.0, asym, good), DataError);

  auto diag = good;
  diag[0] = 0.2;
  CHECK_THROWS_AS(HeightRecoveryProblem::from_matrices(1.0, diag, good), DataError);

  auto neg = good;
  neg[1] = neg[3] = -0.5;
  CHECK_THROWS_AS(HeightRecoveryProblem::from_matrices(1.0, neg, good), DataError);

  CHECK_THROWS_AS(HeightRecoveryProblem::from_matrices(
                      1.0, std::vector<double>(6, 0.0), std::vector<double>(6, 0.0)),
                  std::invalid_argument);
}
