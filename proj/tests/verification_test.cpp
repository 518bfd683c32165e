#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace rectspec;
using rstest::rel_diff;

namespace {

RectTensor ones(std::size_t r, std::size_t s, std::size_t n, std::size_t m) {
  return RectTensor::constant({r, s, n, m}, 1.0);
}

}  // namespace

TEST(Example21, Entries) {
  const auto a = example21_tensor();
  using V = std::vector<Index>;
  EXPECT_EQ(a.at(V{0, 0}, V{1, 1}), 0.0);
  EXPECT_EQ(a.at(V{1, 0}, V{1, 1}), 0.0);
  EXPECT_EQ(a.at(V{0, 1}, V{1, 1}), 1.0);
  EXPECT_EQ(a.at(V{0, 0}, V{0, 1}), 1.0);
  EXPECT_EQ(a.nonzeros(), 14u);
  EXPECT_FALSE(is_partially_symmetric(a));
}

TEST(Example21, Certificate) {
  const auto rep = example21_analysis();
  const double r2 = std::sqrt(2.0), r17 = std::sqrt(17.0), r34 = std::sqrt(34.0);
  EXPECT_TRUE(rep.holds(1e-12));
  EXPECT_FALSE(rep.holds(1e-20));
  EXPECT_NEAR(rep.lambda_roots.first, (3 * r2 + r34) / 2, 1e-15);
  EXPECT_NEAR(rep.lambda_roots.first, 5.0368, 1e-4);
  EXPECT_NEAR(rep.lambda_roots.second, (3 * r2 - r34) / 2, 1e-15);
  EXPECT_NEAR(rep.y_ratio, (1 + r17) / 4, 1e-14);
  EXPECT_NEAR(rep.y_fourth_powers.first, 0.77195, 1e-5);
  EXPECT_NEAR(rep.y_fourth_powers.second, 0.28688, 1e-5);
  EXPECT_NEAR(rep.y_fourth_powers.first + rep.y_fourth_powers.second, 18.0 / 17.0, 1e-12);
  EXPECT_NEAR(rep.norm_defect, 1.0 / 17.0, 1e-12);
  const double lp = rep.lambda_roots.first;
  EXPECT_NEAR(lp * lp - 3 * r2 * lp - 4, 0.0, 1e-12);
  EXPECT_EQ(rep.failed_hypothesis, "partial symmetry");
  EXPECT_EQ(rep.items.size(), 9u);
}

TEST(Example21, UncheckedIterationFindsPositiveStrongTriple) {
  // The psi iteration with the symmetry check bypassed reaches a strictly
  // positive pair. Verify the strong equations with a plain loop, independent
  // of the contraction kernels.
  const auto rep = example21_analysis();
  ASSERT_TRUE(rep.solver_outcome.converged);
  const auto& t = rep.solver_triple;
  EXPECT_NEAR(t.lambda, 7.0452934, 1e-6);
  const auto a = example21_tensor();
  double gx[2] = {0, 0}, gy[2] = {0, 0};
  for (Index i1 = 0; i1 < 2; ++i1)
    for (Index i2 = 0; i2 < 2; ++i2)
      for (Index j1 = 0; j1 < 2; ++j1)
        for (Index j2 = 0; j2 < 2; ++j2) {
          const double v = (i2 == 0 && j1 == 1 && j2 == 1) ? 0.0 : 1.0;
          ASSERT_EQ(a.at(std::vector<Index>{i1, i2}, std::vector<Index>{j1, j2}), v);
          gx[i1] += v * t.x[i2] * t.y[j1] * t.y[j2];
          gy[j1] += v * t.x[i1] * t.x[i2] * t.y[j2];
        }
  for (int k = 0; k < 2; ++k) {
    EXPECT_GT(t.x[k], 0.0);
    EXPECT_GT(t.y[k], 0.0);
    EXPECT_NEAR(gx[k], t.lambda * std::pow(t.x[k], 3), 1e-9);
    EXPECT_NEAR(gy[k], t.lambda * std::pow(t.y[k], 3), 1e-9);
  }
  EXPECT_NEAR(t.x[0], std::pow(2.0, -0.25), 1e-10);
  EXPECT_NEAR(t.x[1], std::pow(2.0, -0.25), 1e-10);
  EXPECT_NEAR(std::pow(t.y[0], 4) + std::pow(t.y[1], 4), 1.0, 1e-12);
}

TEST(BruteForce, AllOnes) {
  const auto g = brute_force_max(ones(2, 2, 2, 2), {4, 4}, 0.01);
  EXPECT_NEAR(g.value, 8.0, 0.05);
  EXPECT_LE(g.value, 8.0 + 1e-12);
  EXPECT_NEAR(lp_norm(g.argmax.x, 4), 1.0, 1e-12);
  EXPECT_NEAR(lp_norm(g.argmax.y, 4), 1.0, 1e-12);
}

TEST(BruteForce, ZeroTensor) {
  EXPECT_EQ(brute_force_max(RectTensor({2, 1, 3, 2}), {2, 2}, 0.05).value, 0.0);
}

TEST(BruteForce, Errors) {
  EXPECT_THROW(brute_force_max(ones(1, 1, 5, 2), {2, 2}, 0.1), ScaleError);
  EXPECT_THROW(brute_force_max(ones(1, 1, 2, 2), {2, 2}, 0.6), DomainError);
  EXPECT_THROW(brute_force_max(ones(1, 1, 2, 2), {2, 2}, 0.0), DomainError);
  EXPECT_THROW(brute_force_max(ones(1, 1, 4, 4), {2, 2}, 1e-4), ScaleError);
}

TEST(BruteForce, Example21Reference) {
  // f_A does not see the lack of symmetry, so the grid finds the maximum of
  // the symmetrized form, which the strong triple of symmetrize(A) attains.
  const auto g = brute_force_max(example21_tensor(), {4, 4}, 0.005);
  const auto res = boundary_solve(symmetrize(example21_tensor()), {4, 4});
  ASSERT_TRUE(res.report.converged);
  EXPECT_NEAR(g.value, res.triple.lambda, 2e-2);
  EXPECT_LE(g.value, res.triple.lambda + 1e-12);
}

TEST(BruteForce, MatrixSingularValue) {
  const auto a = RectTensor::from_matrix({{3, 0}, {4, 5}});
  // The unit-circle lattice is fine enough for a 1e-3 relative gap.
  EXPECT_NEAR(brute_force_max(a, {2, 2}, 0.001).value, std::sqrt(45.0), 1e-2);
}

TEST(Gradient, AllOnesUniform) {
  const VectorPair z{{0.5, 0.5}, {0.5, 0.5}};
  EXPECT_LE(gradient_identity_check(ones(2, 2, 2, 2), z, 1e-5), 1e-8);
}

TEST(Gradient, SymmetrizedExample21) {
  std::mt19937_64 rng(60);
  const auto a = symmetrize(example21_tensor());
  for (int t = 0; t < 10; ++t)
    EXPECT_LE(gradient_identity_check(a, rstest::random_pair(2, 2, rng), 1e-5), 1e-7);
}

TEST(Gradient, RejectsAsymmetricTensor) {
  EXPECT_THROW(gradient_identity_check(example21_tensor(), {{1, 1}, {1, 1}}, 1e-5),
               StructureError);
}

TEST(Gradient, SecondOrderConvergence) {
  std::mt19937_64 rng(61);
  const auto a = symmetrize(rstest::random_tensor({3, 2, 3, 2}, rng));
  const auto z = rstest::random_pair(3, 2, rng, 0.5, 1.5);
  const double d1 = gradient_identity_check(a, z, 1e-4);
  const double d2 = gradient_identity_check(a, z, 5e-5);
  EXPECT_GE(d1 / d2, 3.5);
  EXPECT_LE(d1 / d2, 4.5);
}

TEST(Midpoint, Idempotent) {
  std::mt19937_64 rng(62);
  const PQNorms pq{3, 1.5};
  const auto z = rstest::random_sphere_pair(3, 4, pq, rng);
  const auto mid = pq_midpoint(z, z, pq);
  for (std::size_t k = 0; k < z.size(); ++k) EXPECT_NEAR(mid[k], z[k], 1e-15);
}

TEST(Midpoint, BasisPairs) {
  const auto mid = pq_midpoint({{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}, {2, 2});
  const double h = std::sqrt(0.5);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(mid[k], h, 1e-15);
}

TEST(Midpoint, StaysOnSphere) {
  std::mt19937_64 rng(63);
  for (int t = 0; t < 100; ++t) {
    const PQNorms pq{detail::uniform(rng, 1, 6), detail::uniform(rng, 1, 6)};
    const auto mid = pq_midpoint(rstest::random_sphere_pair(3, 2, pq, rng),
                                 rstest::random_sphere_pair(3, 2, pq, rng), pq);
    EXPECT_NEAR(lp_norm(mid.x, pq.p), 1.0, 1e-13);
    EXPECT_NEAR(lp_norm(mid.y, pq.q), 1.0, 1e-13);
  }
}

TEST(Midpoint, Errors) {
  EXPECT_THROW(pq_midpoint({{1, 1}, {1, 0}}, {{1, 0}, {1, 0}}, {2, 2}), DomainError);
  EXPECT_THROW(pq_midpoint({{-1, 0}, {1, 0}}, {{1, 0}, {1, 0}}, {2, 2}), DomainError);
  EXPECT_THROW(pq_midpoint({{1, 0}, {1, 0}}, {{1}, {1, 0}}, {2, 2}), DimensionError);
}

TEST(Midpoint, HolderAtBoundary) {
  std::mt19937_64 rng(64);
  for (int t = 0; t < 100; ++t) {
    const std::size_t r = 1 + rng() % 2, s = 1 + rng() % 2;
    const PQNorms pq{2.0 * static_cast<double>(r), 2.0 * static_cast<double>(s)};
    const auto a = symmetrize(rstest::random_tensor({r, s, 2 + rng() % 2, 2 + rng() % 2}, rng, 0.6));
    const auto z1 = rstest::random_sphere_pair(a.n(), a.m(), pq, rng);
    const auto z2 = rstest::random_sphere_pair(a.n(), a.m(), pq, rng);
    const double lhs = evaluate_form(a, pq_midpoint(z1, z2, pq));
    EXPECT_GE(lhs, 0.5 * (evaluate_form(a, z1) + evaluate_form(a, z2)) - 1e-12);
  }
}

TEST(PowerIteration, KnownSpectrum) {
  const auto res = power_iteration({{9, 12}, {12, 41}});
  EXPECT_TRUE(res.converged);
  EXPECT_NEAR(res.value, 45.0, 1e-10);
  EXPECT_EQ(power_iteration({{0, 0}, {0, 0}}).value, 0.0);
}

TEST(Svd, TwoByTwo) {
  const auto c = svd_crosscheck(RectTensor::from_matrix({{3, 0}, {4, 5}}));
  EXPECT_NEAR(c.oracle_lambda, std::sqrt(45.0), 1e-12);
  EXPECT_NEAR(c.solver_lambda, std::sqrt(45.0), 1e-9);
  EXPECT_NEAR(c.rho_aat, c.rho_ata, 1e-9);
  EXPECT_TRUE(c.solver_report.converged);
}

TEST(Svd, Identity) {
  const auto c = svd_crosscheck(RectTensor::from_matrix({{1, 0}, {0, 1}}));
  EXPECT_NEAR(c.oracle_lambda, 1.0, 1e-12);
  EXPECT_NEAR(c.solver_lambda, 1.0, 1e-9);
}

TEST(Svd, RandomRectangular) {
  std::mt19937_64 rng(65);
  for (int t = 0; t < 10; ++t) {
    const auto a = rstest::random_tensor({1, 1, 3, 5}, rng);
    const auto c = svd_crosscheck(a);
    ASSERT_TRUE(c.solver_report.converged);
    EXPECT_NEAR(c.solver_lambda, c.oracle_lambda, 1e-9);
    EXPECT_NEAR(c.rho_aat, c.rho_ata, 1e-9);
  }
}

TEST(Svd, WrongOrder) {
  EXPECT_THROW(svd_crosscheck(ones(2, 1, 2, 2)), UnsupportedOrderError);
}

TEST(Case2, ReducesToMatrixCase) {
  const auto a = RectTensor::from_matrix({{3, 0}, {4, 5}});
  const auto c = case2_crosscheck(a, {2, 2});
  EXPECT_NEAR(c.direct_lambda, std::sqrt(45.0), 1e-9);
  EXPECT_NEAR(c.gram_lambda, std::sqrt(45.0), 1e-9);
}

TEST(Case2, ZeroTensor) {
  const auto c = case2_crosscheck(RectTensor({1, 2, 2, 3}), {2, 4});
  EXPECT_EQ(c.direct_lambda, 0.0);
  EXPECT_EQ(c.gram_lambda, 0.0);
}

TEST(Case2, RandomOrderOneTwo) {
  std::mt19937_64 rng(66);
  for (double q : {3.0, 4.0, 6.0}) {
    const auto a = symmetrize(rstest::random_positive({1, 2, 2, 3}, rng));
    const auto c = case2_crosscheck(a, {2, q});
    ASSERT_TRUE(c.direct_report.converged);
    ASSERT_TRUE(c.gram_report.converged);
    EXPECT_NEAR(c.direct_lambda, c.gram_lambda, 1e-6 * c.direct_lambda);
    const auto g = brute_force_max(a, {2, q}, 0.005);
    EXPECT_NEAR(g.value, c.direct_lambda, 2e-2 * c.direct_lambda);
  }
}

TEST(Case2, TransposedOrderTwoOne) {
  std::mt19937_64 rng(67);
  const auto a = symmetrize(rstest::random_positive({2, 1, 3, 2}, rng));
  const auto c = case2_crosscheck(transpose(a), {2, 4});
  ASSERT_TRUE(c.direct_report.converged);
  EXPECT_NEAR(c.direct_lambda, c.gram_lambda, 1e-6 * c.direct_lambda);
  // Same eigenvalue as A itself with the norms swapped.
  EXPECT_NEAR(boundary_solve(a, {4, 2}).triple.lambda, c.direct_lambda, 1e-8);
}

TEST(Case2, Errors) {
  EXPECT_THROW(case2_crosscheck(ones(2, 1, 2, 2), {2, 2}), UnsupportedOrderError);
  EXPECT_THROW(case2_crosscheck(ones(1, 2, 2, 2), {3, 4}), DomainError);
  EXPECT_THROW(case2_crosscheck(ones(1, 3, 2, 2), {2, 4}), DomainError);
}
