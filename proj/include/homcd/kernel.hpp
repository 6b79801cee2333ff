#pragma once

// Weighted spaces A^(lambda), the intertwiner Gamma^(eta,Y) (and Gamma_N),
// reproducing kernels of the constructed bundles, the induced metric and
// curvature at the origin.

#include "homcd/algebra.hpp"
#include "homcd/bundle.hpp"
#include "homcd/mobius.hpp"

#include <cstdio>
#include <string>
#include <utility>

namespace homcd {

/// A^(lambda): holomorphic functions with kernel (1 - z conj(w))^{-2 lambda}.
/// Monomials are orthogonal with ||z^p||^2 = p! / (2 lambda)_p.
struct WeightedSpace {
  double lambda;

  explicit WeightedSpace(double l) : lambda(l) {
    if (!(l > 0.0))
      throw ValidationError("WeightedSpace: lambda must be positive");
  }

  /// (2 lambda)_p / p!, the coefficient of (z conj(w))^p in the kernel.
  double kernel_coefficient(int p) const { return 1.0 / norm_squared(p); }

  double norm_squared(int p) const {
    double r = 1.0;
    for (int i = 0; i < p; ++i)
      r *= (i + 1.0) / (2.0 * lambda + i);
    return r;
  }

  double norm(int p) const { return std::sqrt(norm_squared(p)); }
};

/// Element of the direct sum of A^(eta+j) (x) C^{d_j}: one polynomial per level.
struct GradedSection {
  BlockType type;
  std::vector<VectorPolynomial> components;

  GradedSection(BlockType t, std::vector<VectorPolynomial> comps)
      : type(std::move(t)), components(std::move(comps)) {
    if (static_cast<int>(components.size()) != type.levels())
      throw ValidationError("GradedSection: one component per block is required");
    for (int j = 0; j < type.levels(); ++j)
      if (components[j].dim() != type.size(j))
        throw ValidationError("GradedSection: component " + std::to_string(j) +
                              " has the wrong dimension");
  }

  static GradedSection zero(const BlockType &t) {
    std::vector<VectorPolynomial> comps;
    for (int d : t.sizes())
      comps.emplace_back(d);
    return GradedSection(t, std::move(comps));
  }
};

namespace detail {

inline std::string short_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

inline void require_kernel_params(const BundleParams &p, const char *where) {
  if (!(p.eta > 0.0))
    throw ValidationError(std::string(where) + ": eta must be positive");
}

inline void require_normalization(const BundleParams &p, const BlockDiagonal &n,
                                  const char *where) {
  if (!(n.type() == p.type()))
    throw ValidationError(std::string(where) + ": N has the wrong block type");
  if (!n.invertible())
    throw ValidationError(std::string(where) + ": N must be invertible");
}

/// Concatenates per-level polynomials into one C^n-valued polynomial.
inline VectorPolynomial stack(const BlockType &t,
                              const std::vector<VectorPolynomial> &parts) {
  int deg = -1;
  for (const auto &f : parts)
    deg = std::max(deg, f.degree());
  std::vector<Vector> coeffs(std::max(deg + 1, 0), Vector::Zero(t.rank()));
  for (int l = 0; l < t.levels(); ++l)
    for (int q = 0; q <= parts[l].degree(); ++q)
      coeffs[q].segment(t.offset(l), t.size(l)) = parts[l].coeffs()[q];
  return VectorPolynomial(t.rank(), std::move(coeffs));
}

inline std::vector<VectorPolynomial> split(const BlockType &t,
                                           const VectorPolynomial &f) {
  std::vector<VectorPolynomial> parts;
  for (int l = 0; l < t.levels(); ++l) {
    std::vector<Vector> c;
    for (const Vector &v : f.coeffs())
      c.push_back(v.segment(t.offset(l), t.size(l)));
    parts.emplace_back(t.size(l), std::move(c));
  }
  return parts;
}

} // namespace detail

/// (Gamma f)_l = sum_{j<=l} 1/((l-j)! (2 eta + 2 j)_{l-j}) Y_l...Y_{j+1} f_j^{(l-j)}.
inline VectorPolynomial gamma_apply(const BundleParams &p, const GradedSection &f) {
  detail::require_kernel_params(p, "gamma_apply");
  if (!(f.type == p.type()))
    throw ValidationError("gamma_apply: section has the wrong block type");
  const BlockType &t = p.type();
  std::vector<VectorPolynomial> out;
  for (int l = 0; l < t.levels(); ++l) {
    VectorPolynomial acc(t.size(l));
    for (int j = 0; j <= l; ++j)
      acc += cplx(gamma_coefficient(p.eta, l, j)) *
             (p.y.chain(l, j) * f.components[j].derivative(l - j));
    out.push_back(std::move(acc));
  }
  return detail::stack(t, out);
}

/// Gamma o N, with N applied levelwise before Gamma.
inline VectorPolynomial gamma_n_apply(const BundleParams &p, const BlockDiagonal &n,
                                      const GradedSection &f) {
  detail::require_normalization(p, n, "gamma_n_apply");
  GradedSection g = f;
  for (int j = 0; j < p.type().levels(); ++j)
    g.components[j] = n.block(j) * f.components[j];
  return gamma_apply(p, g);
}

/// Inverse of Gamma on polynomial sections, by forward substitution over the levels.
inline GradedSection gamma_inverse(const BundleParams &p, const VectorPolynomial &g) {
  detail::require_kernel_params(p, "gamma_inverse");
  const BlockType &t = p.type();
  if (g.dim() != t.rank())
    throw ValidationError("gamma_inverse: polynomial has the wrong dimension");
  auto parts = detail::split(t, g);
  GradedSection f = GradedSection::zero(t);
  for (int l = 0; l < t.levels(); ++l) {
    VectorPolynomial acc = parts[l];
    for (int j = 0; j < l; ++j)
      acc = acc - cplx(gamma_coefficient(p.eta, l, j)) *
                      (p.y.chain(l, j) * f.components[j].derivative(l - j));
    f.components[l] = std::move(acc);
  }
  return f;
}

/// Closed form of K_N(0,0): block l is
/// sum_{j<=l} 1/((l-j)! (2eta+2j)_{l-j}) Y_l..Y_{j+1} N_j N_j* (Y_l..Y_{j+1})*.
inline BlockDiagonal kernel_at_zero(const BundleParams &p, const BlockDiagonal &n) {
  detail::require_kernel_params(p, "kernel_at_zero");
  if (!(n.type() == p.type()))
    throw ValidationError("kernel_at_zero: N has the wrong block type");
  const BlockType &t = p.type();
  std::vector<Matrix> blocks;
  for (int l = 0; l < t.levels(); ++l) {
    Matrix acc = Matrix::Zero(t.size(l), t.size(l));
    for (int j = 0; j <= l; ++j) {
      const Matrix c = p.y.chain(l, j) * n.block(j);
      acc += gamma_coefficient(p.eta, l, j) * c * c.adjoint();
    }
    blocks.push_back(hermitian_part(acc));
  }
  return BlockDiagonal(t, std::move(blocks));
}

/// Radius up to which a kernel truncated at degree D is evaluated (0.8 at D = 40).
inline double validated_radius(int degree) {
  return std::min(0.95, std::pow(0.8, 40.0 / std::max(degree, 1)));
}

/// Truncated expansion of K_N^(eta,Y)(z, w) together with its parameters.
struct KernelSeries {
  TwoVariableSeries coefficients;
  BundleParams params;
  BlockDiagonal normalization;

  int degree() const { return coefficients.degree(); }
  int dim() const { return coefficients.dim(); }

  /// K(z, w); throws when either point is outside the validated radius.
  Matrix at(cplx z, cplx w) const {
    const double r = validated_radius(degree());
    if (std::abs(z) > r || std::abs(w) > r)
      throw NumericalError("kernel evaluation outside the validated radius " +
                           detail::short_double(r) + " for truncation " +
                           std::to_string(degree()));
    return coefficients.evaluate(z, w);
  }

  /// As at(), additionally requiring the outer ring of the truncation to be
  /// below `max_tail` relative to the value.
  Matrix at_checked(cplx z, cplx w, double max_tail) const {
    Matrix k = at(z, w);
    const double tail = coefficients.tail_ratio(z, w);
    if (tail > max_tail)
      throw NumericalError("kernel truncation tail " + detail::short_double(tail) +
                           " exceeds " + detail::short_double(max_tail) +
                           "; increase the truncation");
    return k;
  }
};

/// The orthonormal monomial basis of sum_j A^(eta+j) (x) C^{d_j} pushed through
/// Gamma_N and summed as F(z) F(w)*, truncated to bidegree <= D.
inline KernelSeries kernel_series(const BundleParams &p, const BlockDiagonal &n,
                                  int degree) {
  detail::require_kernel_params(p, "kernel_series");
  detail::require_normalization(p, n, "kernel_series");
  const BlockType &t = p.type();
  if (degree < t.top())
    throw ValidationError("kernel_series: truncation must be at least m");
  TwoVariableSeries c(degree, t.rank());
  // Gamma lowers the degree by at most m, so basis degrees up to D + m are needed.
  for (int j = 0; j < t.levels(); ++j) {
    const WeightedSpace space(p.eta + j);
    for (int q = 0; q <= degree + t.top(); ++q)
      for (int i = 0; i < t.size(j); ++i) {
        GradedSection e = GradedSection::zero(t);
        e.components[j] = VectorPolynomial::monomial(
            Vector::Unit(t.size(j), i) / space.norm(q), q);
        const VectorPolynomial f = gamma_n_apply(p, n, e);
        std::vector<int> support;
        for (int a = 0; a <= std::min(f.degree(), degree); ++a)
          if (f.coeffs()[a].squaredNorm() != 0.0)
            support.push_back(a);
        for (int a : support)
          for (int b : support)
            c(a, b) += f.coeffs()[a] * f.coeffs()[b].adjoint();
      }
  }
  return KernelSeries{std::move(c), p, n};
}

/// H(z) = K(z, z)^{-1}.
inline Matrix metric_at(const KernelSeries &k, cplx z) {
  const Matrix kz = hermitian_part(k.at_checked(z, z, 1e-8));
  if (condition_number(kz) > tol::max_condition)
    throw NumericalError("metric_at: K(z,z) is numerically singular");
  return kz.inverse();
}

/// Largest entry of J_g(z) H(gz)^{-1} J_g(z)* - H(z)^{-1}.
inline double metric_homogeneity_residual(const KernelSeries &k,
                                          const MobiusElement &g, cplx z) {
  const Matrix j = multiplier(g, z, k.params);
  const Matrix lhs = j * metric_at(k, act(g, z)).inverse() * j.adjoint();
  return max_abs(lhs - metric_at(k, z).inverse());
}

/// -d/dzbar (K^{-1} dK/dz) at the origin, for the Gram metric K(z,z) = H(z)^{-1}:
/// -C00^{-1} (C11 - C01 C00^{-1} C10).
inline Matrix curvature_at_zero(const KernelSeries &k) {
  if (k.degree() < 2)
    throw ValidationError("curvature_at_zero: truncation must be at least 2");
  const TwoVariableSeries &c = k.coefficients;
  const Matrix c00_inv = c(0, 0).inverse();
  return -c00_inv * (c(1, 1) - c(0, 1) * c00_inv * c(1, 0));
}

/// Largest entry of K(z,w) - J_g(z) K(gz, gw) J_g(w)* over the samples.
inline double transformation_residual(const KernelSeries &k, const MobiusElement &g,
                                      const std::vector<std::pair<cplx, cplx>> &samples,
                                      double max_tail = 1e-10) {
  require_branch_valid(g, "transformation_residual");
  double worst = 0.0;
  for (const auto &[z, w] : samples) {
    const cplx gz = act(g, z), gw = act(g, w);
    const Matrix lhs = k.at_checked(z, w, max_tail);
    const Matrix rhs = multiplier(g, z, k.params) * k.at_checked(gz, gw, max_tail) *
                       multiplier(g, w, k.params).adjoint();
    worst = std::max(worst, max_abs(lhs - rhs));
  }
  return worst;
}

/// The block matrix [K(z_a, z_b)]_{a,b}.
inline Matrix gram_matrix(const KernelSeries &k, const std::vector<cplx> &points) {
  const Eigen::Index n = k.dim();
  const Eigen::Index s = static_cast<Eigen::Index>(points.size());
  Matrix g(s * n, s * n);
  for (Eigen::Index a = 0; a < s; ++a)
    for (Eigen::Index b = 0; b < s; ++b)
      g.block(a * n, b * n, n, n) = k.at(points[a], points[b]);
  return g;
}

} // namespace homcd
