#include "test_support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace homcd;
using namespace homcd::testing;

using std::numbers::pi;

TEST(Mobius, ConstructionChecksDeterminant) {
  EXPECT_THROW(MobiusElement(1.0, 0.5), ValidationError);
  EXPECT_NO_THROW(MobiusElement::hyperbolic(0.3, 1.0));
  EXPECT_THROW(MobiusElement::rotation(pi), ValidationError);
  EXPECT_FALSE(MobiusElement(cplx(0.0, 1.0), 0.0).branch_valid());
}

TEST(Act, Examples) {
  const cplx z(0.3, 0.1);
  EXPECT_EQ(act(MobiusElement::identity(), z), z);
  const double theta = 0.8;
  EXPECT_LT(std::abs(act(MobiusElement::rotation(theta), z) - std::polar(1.0, theta) * z),
            1e-15);
  EXPECT_NEAR(act(MobiusElement::hyperbolic(0.4), 0.0).real(), std::tanh(0.4), 1e-15);
  EXPECT_THROW(act(MobiusElement::identity(), 1.0), ValidationError);
}

TEST(Act, PreservesDisc) {
  Rng rng(21);
  std::uniform_real_distribution<double> ur(0.0, 0.999), ua(-pi, pi);
  for (int s = 0; s < 500; ++s) {
    const MobiusElement g = random_small(rng, 1.5, 2.0);
    EXPECT_LT(std::abs(act(g, std::polar(ur(rng), ua(rng)))), 1.0);
  }
}

TEST(Derivative, Examples) {
  const cplx z(0.2, -0.3);
  EXPECT_EQ(derivative(MobiusElement::identity(), z), cplx(1.0));
  EXPECT_EQ(c_of(MobiusElement::identity()), cplx(0.0));
  const double theta = -1.1;
  EXPECT_LT(std::abs(derivative(MobiusElement::rotation(theta), z) - std::polar(1.0, theta)),
            1e-15);
  EXPECT_EQ(c_of(MobiusElement::rotation(theta)), cplx(0.0));
  const double t = 0.6;
  EXPECT_NEAR(std::abs(derivative(MobiusElement::hyperbolic(t), 0.0) - 1.0 / std::pow(std::cosh(t), 2)),
              0.0, 1e-15);
  EXPECT_NEAR(std::abs(c_of(MobiusElement::hyperbolic(t)) - std::sinh(t)), 0.0, 1e-15);
  EXPECT_THROW(derivative(MobiusElement(cplx(0.0, 1.0), 0.0), z), NumericalError);
}

TEST(Derivative, MatchesFiniteDifference) {
  Rng rng(22);
  std::uniform_real_distribution<double> ur(0.0, 0.8), ua(-pi, pi);
  const double h = 1e-5;
  for (int s = 0; s < 200; ++s) {
    const MobiusElement g = random_small(rng, 0.8, 1.0);
    const cplx z = std::polar(ur(rng), ua(rng));
    const cplx fd = (act(g, z + h) - act(g, z - h)) / (2.0 * h);
    EXPECT_LT(std::abs(fd - derivative(g, z)), 1e-7);
  }
}

TEST(FractionalPower, Examples) {
  const cplx z(0.1, 0.4);
  EXPECT_LT(std::abs(fractional_power(MobiusElement::identity(), z, 2.3) - 1.0), 1e-15);
  EXPECT_LT(std::abs(fractional_power(MobiusElement::rotation(pi / 2.0), z, 0.5) -
                     std::polar(1.0, pi / 4.0)),
            1e-15);
  // Rotations near pi: e^{i s theta}, no wrap.
  const double theta = 3.0;
  EXPECT_LT(std::abs(fractional_power(MobiusElement::rotation(theta), z, 0.7) -
                     std::polar(1.0, 0.7 * theta)),
            1e-14);
  EXPECT_THROW(fractional_power(MobiusElement::identity(), 1.5, 1.0), ValidationError);
}

TEST(FractionalPower, ExponentsAdd) {
  Rng rng(23);
  std::uniform_real_distribution<double> ur(0.0, 1.0), ua(-pi, pi), us(-3.0, 3.0);
  for (int s = 0; s < 200; ++s) {
    const MobiusElement g = random_small(rng, 0.8, 1.5);
    const cplx z = std::polar(ur(rng), ua(rng));
    const double s1 = us(rng), s2 = us(rng);
    const cplx lhs = fractional_power(g, z, s1) * fractional_power(g, z, s2);
    const cplx rhs = fractional_power(g, z, s1 + s2);
    EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(rhs)));
    EXPECT_LT(std::abs(fractional_power(g, z, 1.0) - derivative(g, z)), 1e-12);
  }
}

TEST(Multiplier, Examples) {
  const BundleParams p = scalar_chain_params(1.3, cplx(0.7, -0.2));
  const cplx z(0.2, 0.1);
  EXPECT_LT(max_abs(multiplier(MobiusElement::identity(), z, p) - Matrix::Identity(2, 2)), 1e-15);

  const double theta = 0.9;
  const Matrix jr = multiplier(MobiusElement::rotation(theta), z, p);
  EXPECT_LT(std::abs(jr(0, 0) - std::polar(1.0, p.eta * theta)), 1e-14);
  EXPECT_LT(std::abs(jr(1, 1) - std::polar(1.0, (p.eta + 1.0) * theta)), 1e-14);
  EXPECT_EQ(jr(1, 0), cplx(0.0));

  const MobiusElement g = MobiusElement::hyperbolic(0.3, 0.5);
  const Matrix jg = multiplier(g, z, p);
  const cplx expect =
      -std::conj(g.b()) * std::pow(derivative(g, z), p.eta + 0.5) * p.y.block(1)(0, 0);
  EXPECT_LT(std::abs(jg(1, 0) - expect), 1e-14);
  EXPECT_EQ(jg(0, 1), cplx(0.0));
}

TEST(Multiplier, BlockLowerTriangular) {
  Rng rng(24);
  for (int s = 0; s < 50; ++s) {
    const BundleParams p = random_params(rng, 8);
    const MobiusElement g = random_small(rng);
    const Matrix j = multiplier(g, cplx(0.1, -0.3), p);
    const BlockType &t = p.type();
    for (int r = 0; r < t.levels(); ++r)
      for (int c = r + 1; c < t.levels(); ++c)
        EXPECT_EQ(max_abs(j.block(t.offset(r), t.offset(c), t.size(r), t.size(c))), 0.0);
    for (int r = 0; r < t.levels(); ++r) {
      const Matrix diag = j.block(t.offset(r), t.offset(r), t.size(r), t.size(r));
      const cplx expect = fractional_power(g, cplx(0.1, -0.3), p.eta + r);
      EXPECT_LT(max_abs(diag - expect * Matrix::Identity(t.size(r), t.size(r))), 1e-14);
    }
  }
}

TEST(Cocycle, Examples) {
  const BundleParams p = scalar_chain_params(1.0, 1.0);
  const cplx z(0.3, 0.2);
  const MobiusElement g = MobiusElement::hyperbolic(0.4, 1.0);
  EXPECT_LT(cocycle_residual(g, MobiusElement::identity(), z, p), 1e-15);
  EXPECT_LT(cocycle_residual(MobiusElement::rotation(1.2), MobiusElement::rotation(1.5), z, p),
            1e-10);
  EXPECT_LT(cocycle_residual(MobiusElement::hyperbolic(0.5, 0.3),
                             MobiusElement::hyperbolic(0.4, -2.0), z, p),
            1e-9);
}

TEST(Cocycle, RandomDraws) {
  Rng rng(25);
  std::uniform_real_distribution<double> ur(0.0, 0.9), ua(-pi, pi);
  for (int set = 0; set < 5; ++set) {
    const BundleParams p = random_params(rng, 6);
    int done = 0;
    double worst = 0.0;
    while (done < 200) {
      const MobiusElement g1 = random_small(rng), g2 = random_small(rng);
      if (!compose_is_branch_valid(g1, g2))
        continue;
      worst = std::max(worst, cocycle_residual(g1, g2, std::polar(ur(rng), ua(rng)), p));
      ++done;
    }
    EXPECT_LE(worst, 1e-9);
  }
}

TEST(Cocycle, OppositeFactorOrderFails) {
  // With Y != 0 the multipliers do not commute, and only one order composes.
  const BundleParams p = scalar_chain_params(1.0, 1.0);
  const MobiusElement g1 = MobiusElement::hyperbolic(0.4, 0.3);
  const MobiusElement g2 = MobiusElement::hyperbolic(0.3, 2.0);
  const cplx z(0.1, 0.2);
  EXPECT_LT(cocycle_residual(g1, g2, z, p), 1e-12);
  EXPECT_GT(cocycle_residual_left(g1, g2, z, p), 1e-3);
}

TEST(Compose, RejectsLeavingBranchNeighbourhood) {
  const MobiusElement g = MobiusElement::rotation(2.5);
  EXPECT_THROW(compose(g, g), NumericalError);
  EXPECT_FALSE(compose_is_branch_valid(g, g));
  const MobiusElement h = MobiusElement::hyperbolic(0.3);
  EXPECT_LT(std::abs(act(compose(h, h.inverse()), cplx(0.2, 0.1)) - cplx(0.2, 0.1)), 1e-15);
}
