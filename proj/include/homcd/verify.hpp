#pragma once

// Randomized residual checks run by `homcd verify`.

#include "homcd/io.hpp"
#include "homcd/operator.hpp"

#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace homcd {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string note;
};

/// N from the file if given, otherwise the identity-metric normalization when
/// the parameters admit one, otherwise I.
inline BlockDiagonal choose_normalization(const ParamFile &pf) {
  if (pf.normalization)
    return *pf.normalization;
  if (membership_in_P(pf.params).in_P)
    return identity_normalization(pf.params);
  return BlockDiagonal::identity(pf.params.type());
}

namespace detail {
template <typename Rng> cplx random_point(Rng &rng, double radius) {
  std::uniform_real_distribution<double> ur(0.0, 1.0), ua(-std::numbers::pi, std::numbers::pi);
  return std::polar(radius * std::sqrt(ur(rng)), ua(rng));
}
} // namespace detail

inline std::vector<CheckResult> run_verification(const ParamFile &pf, int samples,
                                                 std::uint64_t seed) {
  const BundleParams &p = pf.params;
  const BlockDiagonal n = choose_normalization(pf);
  const int degree = pf.truncation;
  std::mt19937_64 rng(seed);
  std::vector<CheckResult> out;

  {
    CheckResult c{"cocycle", 0.0, 1e-9};
    int done = 0;
    while (done < samples) {
      const MobiusElement g1 = random_small(rng, 0.5), g2 = random_small(rng, 0.5);
      if (!compose_is_branch_valid(g1, g2))
        continue;
      c.value = std::max(c.value, cocycle_residual(g1, g2, detail::random_point(rng, 0.5), p));
      ++done;
    }
    out.push_back(c);
  }

  const KernelSeries k = kernel_series(p, n, degree);
  std::vector<MobiusElement> gs;
  std::vector<std::pair<cplx, cplx>> zw;
  for (int i = 0; i < samples; ++i) {
    gs.push_back(random_small(rng, 0.05, 0.5));
    zw.emplace_back(detail::random_point(rng, 0.4), detail::random_point(rng, 0.4));
  }
  {
    CheckResult c{"transformation", 0.0, 1e-8};
    for (const MobiusElement &g : gs)
      c.value = std::max(c.value, transformation_residual(k, g, zw));
    out.push_back(c);
  }
  {
    CheckResult c{"metric-homogeneity", 0.0, 1e-8};
    for (std::size_t i = 0; i < gs.size(); ++i)
      c.value = std::max(c.value, metric_homogeneity_residual(k, gs[i], zw[i].first));
    out.push_back(c);
  }
  {
    CheckResult c{"block-shift", 0.0, 1e-12};
    c.value = block_shift_residual(multiplication_matrix(p, n, degree));
    out.push_back(c);
  }
  {
    CheckResult c{"eigenspace-dimension", 0.0, 0.0};
    int lo = p.rank(), hi = p.rank();
    for (int ri = 0; ri <= 5; ++ri)
      for (int ai = 0; ai < 8; ++ai) {
        const int d = eigenspace_dimension(k, std::polar(0.1 * ri, std::numbers::pi / 4.0 * ai));
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
    c.value = std::max(std::abs(lo - p.rank()), std::abs(hi - p.rank()));
    c.note = "rank " + std::to_string(lo) + ".." + std::to_string(hi) + " (expected " +
             std::to_string(p.rank()) + ")";
    out.push_back(c);
  }
  {
    CheckResult c{"gram-psd", 0.0, 1e-9};
    std::vector<cplx> pts;
    for (int i = 0; i < std::min(samples, 20); ++i)
      pts.push_back(detail::random_point(rng, 0.5));
    const RealVector ev = hermitian_eigenvalues(gram_matrix(k, pts));
    c.value = std::max(0.0, -ev(0));
    out.push_back(c);
  }
  for (CheckResult &c : out)
    c.passed = c.value <= c.tolerance;
  return out;
}

} // namespace homcd
