#include "test_support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace homcd;
using namespace homcd::testing;

TEST(Grading, Examples) {
  const auto r1 = isotypic_grading(BlockType({1}), 5);
  for (int n = 0; n <= 5; ++n) {
    ASSERT_EQ(r1[n].size(), 1u);
    EXPECT_EQ(r1[n][0], (GradeLabel{0, n}));
  }
  const BlockType chain({1, 1});
  EXPECT_EQ(grade_dimension(chain, 0), 1);
  for (int n = 1; n <= 10; ++n)
    EXPECT_EQ(grade_dimension(chain, n), 2);
  const BlockType t({2, 1, 3});
  const std::vector<int> expect{2, 3, 6, 6, 6};
  for (int n = 0; n < 5; ++n)
    EXPECT_EQ(grade_dimension(t, n), expect[n]);
}

TEST(Grading, ExhaustiveDimensions) {
  // Every block type with total rank <= 6 and at most 4 levels.
  std::vector<std::vector<int>> types{{}};
  int checked = 0;
  for (int levels = 1; levels <= 4; ++levels) {
    std::vector<std::vector<int>> next;
    for (const auto &prefix : types)
      for (int d = 1; d <= 6; ++d) {
        auto s = prefix;
        s.push_back(d);
        if (std::accumulate(s.begin(), s.end(), 0) <= 6)
          next.push_back(s);
      }
    types = next;
    for (const auto &sizes : types) {
      const BlockType t(sizes);
      const auto g = isotypic_grading(t, 8);
      int prev = 0;
      for (int n = 0; n <= 8; ++n) {
        int dim = 0;
        for (const GradeLabel &lab : g[n]) {
          EXPECT_EQ(lab.level + lab.degree, n);
          dim += t.size(lab.level);
        }
        int expect = 0;
        for (int j = 0; j <= std::min(n, t.top()); ++j)
          expect += sizes[j];
        EXPECT_EQ(dim, expect);
        EXPECT_EQ(grade_dimension(t, n), expect);
        EXPECT_GE(dim, prev);
        prev = dim;
      }
      ++checked;
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(Multiplication, WeightedShiftsForZeroY) {
  for (const auto &sizes : std::vector<std::vector<int>>{{1}, {1, 1}, {2, 1, 2}})
    for (double eta : {0.5, 0.8, 1.6}) {
      const BlockType t(sizes);
      const BundleParams p{eta, SubdiagonalY::zero(t)};
      const GradedOperatorMatrix m = multiplication_matrix(p, BlockDiagonal::identity(t), 20);
      Matrix expect = Matrix::Zero(m.entries.rows(), m.entries.cols());
      for (std::size_t k = 0; k < m.basis.size(); ++k) {
        const BasisVector &b = m.basis[k];
        if (b.grade >= 20)
          continue;
        for (std::size_t l = 0; l < m.basis.size(); ++l) {
          const BasisVector &c = m.basis[l];
          if (c.level == b.level && c.component == b.component && c.degree == b.degree + 1)
            expect(l, k) = std::sqrt((b.degree + 1.0) / (2.0 * eta + 2.0 * b.level + b.degree));
        }
      }
      EXPECT_LT(max_abs(m.entries - expect), 1e-12);
    }
}

TEST(Multiplication, UnweightedShiftAtHalf) {
  const GradedOperatorMatrix m =
      multiplication_matrix(rank_one(0.5), BlockDiagonal::identity(BlockType({1})), 30);
  for (int n = 0; n < 30; ++n)
    EXPECT_EQ(m.block(n)(0, 0), cplx(1.0));
  EXPECT_NEAR(m.norm_estimate(), 1.0, 1e-15);
}

TEST(BlockShift, Examples) {
  EXPECT_EQ(block_shift_residual(multiplication_matrix(rank_one(0.7),
                                                       BlockDiagonal::identity(BlockType({1})), 20)),
            0.0);
  const BundleParams chain = scalar_chain_params(1.0, 1.0);
  EXPECT_LE(block_shift_residual(multiplication_matrix(chain, identity_normalization(chain), 30)),
            1e-12);
}

TEST(BlockShift, RandomDraws) {
  Rng rng(41);
  for (int s = 0; s < 100; ++s) {
    const BundleParams p = random_params(rng, 6);
    const BlockDiagonal n = random_block_invertible(rng, p.type());
    EXPECT_LE(block_shift_residual(multiplication_matrix(p, n, 16)), 1e-12);
  }
}

TEST(Asymptotics, Examples) {
  const BlockDiagonal one = BlockDiagonal::identity(BlockType({1}));
  const AsymptoticReport shift = asymptotic_diagnostics(multiplication_matrix(rank_one(0.5), one, 40));
  for (double d : shift.deviation)
    EXPECT_EQ(d, 0.0);
  EXPECT_EQ(shift.decay_exponent, -std::numeric_limits<double>::infinity());

  const AsymptoticReport bergman = asymptotic_diagnostics(multiplication_matrix(rank_one(1.0), one, 40));
  for (std::size_t i = 0; i < bergman.grades.size(); ++i) {
    const double n = bergman.grades[i];
    EXPECT_NEAR(bergman.deviation[i], 1.0 - std::sqrt((n + 1.0) / (n + 2.0)), 1e-14);
  }
  EXPECT_LE(bergman.decay_exponent, -0.9);

  const BundleParams chain = scalar_chain_params(1.0, 1.0);
  const AsymptoticReport r =
      asymptotic_diagnostics(multiplication_matrix(chain, identity_normalization(chain), 64));
  EXPECT_LE(r.decay_exponent, -0.9);
  for (std::size_t i = 1; i < r.hs_partial_sums.size(); ++i)
    EXPECT_GE(r.hs_partial_sums[i], r.hs_partial_sums[i - 1]);

  EXPECT_THROW(asymptotic_diagnostics(multiplication_matrix(chain, identity_normalization(chain), 8)),
               NumericalError);
}

TEST(Eigenspace, Examples) {
  const KernelSeries sz = kernel_series(rank_one(0.5), BlockDiagonal::identity(BlockType({1})), 40);
  EXPECT_EQ(eigenspace_dimension(sz, 0.0), 1);
  EXPECT_EQ(eigenspace_dimension(sz, 0.5), 1);

  const BundleParams chain = scalar_chain_params(1.0, 1.0);
  const KernelSeries k = kernel_series(chain, identity_normalization(chain), 40);
  for (int ri = 0; ri <= 5; ++ri)
    for (int ai = 0; ai < 12; ++ai)
      EXPECT_EQ(eigenspace_dimension(k, std::polar(0.1 * ri, std::numbers::pi / 6.0 * ai)), 2);
}

TEST(Eigenspace, RandomConstructions) {
  Rng rng(42);
  for (int s = 0; s < 10; ++s) {
    const BundleParams p = random_params(rng, 8);
    const KernelSeries k = kernel_series(p, random_block_invertible(rng, p.type()), 40);
    for (int ri = 0; ri <= 5; ++ri)
      for (int ai = 0; ai < 6; ++ai)
        EXPECT_EQ(eigenspace_dimension(k, std::polar(0.1 * ri, std::numbers::pi / 3.0 * ai)),
                  p.rank());
  }
}

TEST(Homogeneity, Examples) {
  Rng rng(43);
  std::vector<std::pair<cplx, cplx>> zw;
  std::uniform_real_distribution<double> ur(-0.28, 0.28);
  for (int i = 0; i < 20; ++i)
    zw.emplace_back(cplx(ur(rng), ur(rng)), cplx(ur(rng), ur(rng)));

  const BundleParams chain = scalar_chain_params(1.0, 1.0);
  const BlockDiagonal n = identity_normalization(chain);
  EXPECT_LE(homogeneity_residual(chain, n, 40, {MobiusElement::identity()}, zw), 1e-15);

  const BundleParams r1 = rank_one(1.3);
  EXPECT_LE(homogeneity_residual(r1, BlockDiagonal::identity(r1.type()), 40,
                                 {MobiusElement::rotation(0.4), MobiusElement::rotation(-2.0)}, zw),
            1e-10);

  std::vector<MobiusElement> gs;
  for (int i = 0; i < 20; ++i)
    gs.push_back(random_small(rng, 0.05, 0.5));
  EXPECT_LE(homogeneity_residual(chain, n, 40, gs, zw), 1e-8);
}

TEST(Multiplication, UnitaryInvariance) {
  Rng rng(44);
  for (int s = 0; s < 10; ++s) {
    const BundleParams p = random_params_in_P(rng, 6);
    const BlockDiagonal u = random_block_unitary(rng, p.type());
    const BundleParams q{p.eta, conjugate(p.y, u)};
    const GradedOperatorMatrix a = multiplication_matrix(p, identity_normalization(p), 20);
    const GradedOperatorMatrix b = multiplication_matrix(q, identity_normalization(q), 20);
    for (int n = 0; n < 20; ++n) {
      Eigen::JacobiSVD<Matrix> sa(a.block(n)), sb(b.block(n));
      EXPECT_LT((sa.singularValues() - sb.singularValues()).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(Multiplication, Errors) {
  const BundleParams p = scalar_chain_params(1.0, 1.0);
  EXPECT_THROW(multiplication_matrix(p, BlockDiagonal::identity(p.type()), 0), ValidationError);
  EXPECT_THROW(multiplication_matrix(scalar_chain_params(-1.0, 1.0),
                                     BlockDiagonal::identity(p.type()), 10),
               ValidationError);
  const GradedOperatorMatrix m = multiplication_matrix(p, BlockDiagonal::identity(p.type()), 5);
  EXPECT_THROW(m.block(5), std::out_of_range);
}
