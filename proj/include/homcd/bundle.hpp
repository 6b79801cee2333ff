#pragma once

// Elementary homogeneous bundles E^(eta, Y): parameters, the representation
// pair (rho(h), rho(y)), irreducibility, equivalence of parameters, and the
// positivity set together with its threshold in eta.

#include "homcd/algebra.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace homcd {

/// The triple (eta, d_0..d_m, Y) of an elementary bundle.
struct BundleParams {
  double eta = 1.0;
  SubdiagonalY y;

  const BlockType &type() const { return y.type(); }
  int rank() const { return y.type().rank(); }
};

inline BundleParams validate(double eta, const BlockType &type,
                             const SubdiagonalY &y) {
  if (!std::isfinite(eta))
    throw ValidationError("validate: eta must be a finite real number");
  if (!(y.type() == type))
    throw ValidationError("validate: Y was built for a different block type");
  return BundleParams{eta, y};
}

inline BundleParams validate(double eta, const BlockType &type,
                             std::vector<Matrix> y_blocks) {
  return validate(eta, type, SubdiagonalY(type, std::move(y_blocks)));
}

/// 1 / ((l-j)! (2 eta + 2 j)_{l-j}): weight of Y_l...Y_{j+1} f_j^{(l-j)} in
/// the intertwiner and of the level-j term in the kernel at the origin.
inline double gamma_coefficient(double eta, int l, int j) {
  return 1.0 / (factorial(l - j) * pochhammer(2.0 * eta + 2.0 * j, l - j));
}

// ---------------------------------------------------------------------------

struct RepresentationPair {
  Matrix rho_h;
  Matrix rho_y;
};

inline RepresentationPair representation_pair(const BundleParams &p) {
  const BlockType &t = p.type();
  Matrix h = Matrix::Zero(t.rank(), t.rank());
  for (int j = 0; j < t.levels(); ++j)
    for (int i = 0; i < t.size(j); ++i)
      h(t.offset(j) + i, t.offset(j) + i) = -(p.eta + j);
  return {std::move(h), p.y.assemble()};
}

// ---------------------------------------------------------------------------
// solution spaces of linear conditions on block-diagonal matrices

namespace detail {

/// Real orthonormal basis (Frobenius) of the d x d Hermitian matrices.
inline std::vector<Matrix> hermitian_basis(int d) {
  std::vector<Matrix> basis;
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    Matrix e = Matrix::Zero(d, d);
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  for (int i = 0; i < d; ++i)
    for (int k = i + 1; k < d; ++k) {
      Matrix re = Matrix::Zero(d, d), im = Matrix::Zero(d, d);
      re(i, k) = re(k, i) = s;
      im(i, k) = cplx(0.0, s);
      im(k, i) = cplx(0.0, -s);
      basis.push_back(re);
      basis.push_back(im);
    }
  return basis;
}

inline std::vector<Matrix> full_basis(int d) {
  std::vector<Matrix> basis;
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      Matrix e = Matrix::Zero(d, d);
      e(i, k) = 1.0;
      basis.push_back(e);
    }
  return basis;
}

/// A basis of block-diagonal matrices, one block varied at a time.
inline std::vector<BlockDiagonal>
block_basis(const BlockType &t, std::vector<Matrix> (*per_block)(int)) {
  std::vector<BlockDiagonal> basis;
  for (int j = 0; j < t.levels(); ++j)
    for (const Matrix &e : per_block(t.size(j))) {
      std::vector<Matrix> blocks;
      for (int k = 0; k < t.levels(); ++k)
        blocks.push_back(k == j ? e : Matrix::Zero(t.size(k), t.size(k)));
      basis.push_back(BlockDiagonal(t, std::move(blocks)));
    }
  return basis;
}

inline Vector flatten(const std::vector<Matrix> &parts) {
  Eigen::Index total = 0;
  for (const Matrix &m : parts)
    total += m.size();
  Vector v(total);
  Eigen::Index at = 0;
  for (const Matrix &m : parts) {
    v.segment(at, m.size()) = m.reshaped();
    at += m.size();
  }
  return v;
}

template <typename T>
BlockDiagonal combine(const std::vector<BlockDiagonal> &basis,
                      const Eigen::Matrix<T, Eigen::Dynamic, 1> &coeffs) {
  const BlockType &t = basis.front().type();
  std::vector<Matrix> blocks;
  for (int j = 0; j < t.levels(); ++j)
    blocks.push_back(Matrix::Zero(t.size(j), t.size(j)));
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (int j = 0; j < t.levels(); ++j)
      blocks[j] += cplx(coeffs(static_cast<Eigen::Index>(k))) * basis[k].block(j);
  return BlockDiagonal(t, std::move(blocks));
}

/// Residual blocks A_l Y_l - Y'_l A_{l-1}, l = 1..m (A Y = Y' A restricted to the subdiagonal).
inline std::vector<Matrix> intertwining_residual(const BlockDiagonal &a,
                                                 const SubdiagonalY &y,
                                                 const SubdiagonalY &y2) {
  std::vector<Matrix> r;
  for (int l = 1; l <= y.type().top(); ++l)
    r.push_back(a.block(l) * y.block(l) - y2.block(l) * a.block(l - 1));
  return r;
}

/// Residual blocks of A Y* = Y'* A on the superdiagonal: A_{l-1} Y_l* - Y'_l* A_l.
inline std::vector<Matrix> adjoint_intertwining_residual(const BlockDiagonal &a,
                                                         const SubdiagonalY &y,
                                                         const SubdiagonalY &y2) {
  std::vector<Matrix> r;
  for (int l = 1; l <= y.type().top(); ++l)
    r.push_back(a.block(l - 1) * y.block(l).adjoint() -
                y2.block(l).adjoint() * a.block(l));
  return r;
}

/// Complex solution space of a linear condition, as block-diagonal matrices.
template <typename Residual>
std::vector<BlockDiagonal> complex_solution_space(const BlockType &t,
                                                  Residual residual) {
  const auto basis = block_basis(t, full_basis);
  const Vector probe = flatten(residual(basis.front()));
  Matrix system(probe.size(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k)
    system.col(static_cast<Eigen::Index>(k)) = flatten(residual(basis[k]));
  const Matrix ns = null_space(system);
  std::vector<BlockDiagonal> out;
  for (Eigen::Index c = 0; c < ns.cols(); ++c)
    out.push_back(combine<cplx>(basis, ns.col(c)));
  return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// irreducibility

struct IrreducibilityResult {
  bool irreducible = true;
  /// Real dimension of the Hermitian block-diagonal commutant of Y.
  int commutant_dimension = 1;
  /// Nontrivial block-diagonal orthogonal projection commuting with Y (reducible case).
  std::optional<Matrix> witness;
};

/// Hermitian block-diagonal A with A Y = Y A, as a real linear space.
inline std::vector<BlockDiagonal> hermitian_commutant(const SubdiagonalY &y) {
  const BlockType &t = y.type();
  const auto basis = detail::block_basis(t, detail::hermitian_basis);
  std::vector<RealVector> cols;
  Eigen::Index rows = 0;
  for (const BlockDiagonal &e : basis) {
    const Vector r = detail::flatten(detail::intertwining_residual(e, y, y));
    RealVector c(2 * r.size());
    c.head(r.size()) = r.real();
    c.tail(r.size()) = r.imag();
    rows = c.size();
    cols.push_back(std::move(c));
  }
  RealMatrix system(rows, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < cols.size(); ++k)
    system.col(static_cast<Eigen::Index>(k)) = cols[k];
  const RealMatrix ns = null_space(system);
  std::vector<BlockDiagonal> out;
  for (Eigen::Index c = 0; c < ns.cols(); ++c)
    out.push_back(detail::combine<double>(basis, ns.col(c)));
  return out;
}

inline IrreducibilityResult is_irreducible(const SubdiagonalY &y,
                                           double tolerance = tol::comparison) {
  const BlockType &t = y.type();
  const auto commutant = hermitian_commutant(y);
  IrreducibilityResult res;
  res.commutant_dimension = static_cast<int>(commutant.size());
  if (commutant.size() <= 1)
    return res;

  // Remove the identity direction; the remaining element of largest norm is
  // a non-scalar Hermitian solution.
  const double n = t.rank();
  Matrix best;
  double best_norm = 0.0;
  for (const BlockDiagonal &a : commutant) {
    Matrix dense = a.assemble();
    const cplx tr = dense.trace();
    dense -= (tr / n) * Matrix::Identity(t.rank(), t.rank());
    const double norm = dense.norm();
    if (norm > best_norm) {
      best_norm = norm;
      best = std::move(dense);
    }
  }
  if (best_norm <= tolerance)
    return res;

  // Spectral projection onto the eigenvalues above the widest gap.
  const BlockDiagonal a = BlockDiagonal::from_dense(t, best);
  std::vector<Eigen::SelfAdjointEigenSolver<Matrix>> solvers;
  std::vector<double> all;
  for (int j = 0; j < t.levels(); ++j) {
    solvers.emplace_back(hermitian_part(a.block(j)));
    for (Eigen::Index i = 0; i < solvers.back().eigenvalues().size(); ++i)
      all.push_back(solvers.back().eigenvalues()(i));
  }
  std::sort(all.begin(), all.end());
  double gap = -1.0, cut = 0.0;
  for (std::size_t i = 0; i + 1 < all.size(); ++i)
    if (all[i + 1] - all[i] > gap) {
      gap = all[i + 1] - all[i];
      cut = 0.5 * (all[i] + all[i + 1]);
    }
  Matrix proj = Matrix::Zero(t.rank(), t.rank());
  for (int j = 0; j < t.levels(); ++j) {
    const auto &es = solvers[j];
    Matrix pj = Matrix::Zero(t.size(j), t.size(j));
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i) > cut)
        pj += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    proj.block(t.offset(j), t.offset(j), t.size(j), t.size(j)) = pj;
  }
  res.irreducible = false;
  res.witness = std::move(proj);
  return res;
}

// ---------------------------------------------------------------------------
// equivalence

/// Invertible block-diagonal A with A Y_p = Y_q A when eta_p == eta_q, if one exists.
inline std::optional<BlockDiagonal>
bundles_equivalent(const BundleParams &p, const BundleParams &q,
                   double tolerance = tol::comparison, std::uint64_t seed = 0) {
  if (!(p.type() == q.type()) || std::abs(p.eta - q.eta) > tolerance)
    return std::nullopt;
  const BlockType &t = p.type();
  bool same = true;
  for (int l = 1; l <= t.top(); ++l)
    same = same && max_abs(p.y.block(l) - q.y.block(l)) <= tolerance;
  if (same)
    return BlockDiagonal::identity(t);

  const auto space = detail::complex_solution_space(
      t, [&](const BlockDiagonal &a) {
        return detail::intertwining_residual(a, p.y, q.y);
      });
  if (space.empty())
    return std::nullopt;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int attempt = 0; attempt < 16; ++attempt) {
    Vector c(static_cast<Eigen::Index>(space.size()));
    for (Eigen::Index k = 0; k < c.size(); ++k)
      c(k) = cplx(normal(rng), normal(rng));
    BlockDiagonal a = detail::combine<cplx>(space, c);
    if (!a.invertible())
      continue;
    // Scale so that the dominant entry of block 0 equals 1.
    Eigen::Index r0, c0;
    a.block(0).cwiseAbs().maxCoeff(&r0, &c0);
    const cplx pivot = a.block(0)(r0, c0);
    a = a.transform([&](const Matrix &b) -> Matrix { return b / pivot; });
    double residual = 0.0;
    for (const Matrix &r : detail::intertwining_residual(a, p.y, q.y))
      residual = std::max(residual, max_abs(r));
    double scale = 0.0;
    for (const Matrix &b : a.blocks())
      scale = std::max(scale, max_abs(b));
    if (residual <= tolerance * std::max(1.0, scale))
      return a;
  }
  return std::nullopt;
}

/// Block-diagonal unitary U with U Y U* = Y2, for irreducible Y and Y2.
///
/// Solves A Y = Y2 A together with A Y* = Y2* A. A*A then commutes with Y and
/// Y*, so it is a positive scalar c and A / sqrt(c) is unitary.
inline std::optional<BlockDiagonal>
unitary_equivalent(const SubdiagonalY &y, const SubdiagonalY &y2,
                   double tolerance = tol::comparison) {
  if (!(y.type() == y2.type()))
    return std::nullopt;
  if (!is_irreducible(y, tolerance).irreducible ||
      !is_irreducible(y2, tolerance).irreducible)
    throw ValidationError("unitary_equivalent: inputs must be irreducible; "
                          "decompose into irreducible summands first");
  const BlockType &t = y.type();
  const auto space = detail::complex_solution_space(
      t, [&](const BlockDiagonal &a) {
        auto r = detail::intertwining_residual(a, y, y2);
        auto s = detail::adjoint_intertwining_residual(a, y, y2);
        r.insert(r.end(), s.begin(), s.end());
        return r;
      });
  if (space.empty())
    return std::nullopt;

  const Matrix a = space.front().assemble();
  const Matrix gram = a.adjoint() * a;
  const double c = gram.trace().real() / t.rank();
  if (c <= 0.0)
    return std::nullopt;
  Matrix u = a / std::sqrt(c);
  if (max_abs(u.adjoint() * u - Matrix::Identity(t.rank(), t.rank())) > 1e-8)
    return std::nullopt;
  // Fix the free phase: the dominant entry of block 0 becomes real positive.
  Eigen::Index r0, c0;
  u.topLeftCorner(t.size(0), t.size(0)).cwiseAbs().maxCoeff(&r0, &c0);
  u *= std::abs(u(r0, c0)) / u(r0, c0);
  const BlockDiagonal result = BlockDiagonal::from_dense(t, u);
  for (const Matrix &r : detail::intertwining_residual(result, y, y2))
    if (max_abs(r) > tolerance * std::max(1.0, max_abs(y.assemble())))
      return std::nullopt;
  return result;
}

// ---------------------------------------------------------------------------
// the positivity set

struct PositivityCertificate {
  bool in_P = false;
  /// Delta_0 = I, ..., Delta_m; the N_l N_l* solving K_N(0,0) = I.
  std::vector<Matrix> deltas;
  std::optional<int> failing_level;
  std::string reason;
};

/// Recursion Delta_0 = I,
/// Delta_l = I - sum_{j<l} c(l,j) Y_l...Y_{j+1} Delta_j (Y_l...Y_{j+1})*;
/// (eta, Y) is in the set iff every Delta_l is positive definite.
inline PositivityCertificate membership_in_P(const BundleParams &p,
                                             double tolerance = tol::positivity) {
  PositivityCertificate cert;
  if (!(p.eta > 0.0)) {
    cert.reason = "eta must be positive for the reproducing-kernel construction";
    return cert;
  }
  const BlockType &t = p.type();
  cert.in_P = true;
  for (int l = 0; l < t.levels(); ++l) {
    Matrix delta = Matrix::Identity(t.size(l), t.size(l));
    for (int j = 0; j < l; ++j) {
      const Matrix c = p.y.chain(l, j);
      delta -= gamma_coefficient(p.eta, l, j) * c * cert.deltas[j] * c.adjoint();
    }
    delta = hermitian_part(delta);
    if (!is_positive_definite(delta, tolerance) && cert.in_P) {
      cert.in_P = false;
      cert.failing_level = l;
      cert.reason = "Delta_" + std::to_string(l) + " is not positive definite";
    }
    cert.deltas.push_back(std::move(delta));
  }
  return cert;
}

/// N with N_l = Delta_l^{1/2}, so that K_N(0,0) = I.
inline BlockDiagonal identity_normalization(const BundleParams &p) {
  const auto cert = membership_in_P(p);
  if (!cert.in_P)
    throw ValidationError("identity_normalization: parameters are not in the "
                          "positivity set (" + cert.reason + ")");
  return BlockDiagonal(p.type(), cert.deltas).sqrt();
}

struct ThresholdResult {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  /// Grid samples on either side of the estimate whose membership disagrees
  /// with the step-function picture.
  int violations = 0;
  int samples = 0;
};

/// Bisection for the eta at which membership switches on.
inline ThresholdResult eta_threshold(const SubdiagonalY &y, double tolerance = 1e-12) {
  const auto member = [&](double eta) {
    return membership_in_P(BundleParams{eta, y}, 0.0).in_P;
  };
  ThresholdResult r;
  constexpr double tiny = 1e-12;
  if (member(tiny)) {
    r.upper = tiny;
  } else {
    double lo = tiny, hi = 1.0;
    while (!member(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1048576.0)
        throw NumericalError("eta_threshold: no membership up to eta = 2^20");
    }
    for (int it = 0; it < 400 && hi - lo > tolerance; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi)
        break;
      (member(mid) ? hi : lo) = mid;
    }
    r.lower = lo;
    r.upper = hi;
    r.estimate = 0.5 * (lo + hi);
  }

  const double est = r.estimate;
  const double step = std::max(est, 1.0) / 25.0;
  for (int k = 1; k <= 25; ++k) {
    const double above = r.upper + k * step;
    ++r.samples;
    if (!member(above))
      ++r.violations;
    if (est > 0.0) {
      const double below = r.lower * (k - 1) / 25.0;
      if (below <= 0.0)
        continue;
      ++r.samples;
      if (member(below))
        ++r.violations;
    }
  }
  return r;
}

/// Transports (E^(eta,Y), H) to the identity metric: Y -> A Y A^{-1}, A = H^{1/2}.
inline BundleParams normalize_to_identity_metric(const BundleParams &p,
                                                 const BlockDiagonal &h) {
  if (!(h.type() == p.type()))
    throw ValidationError("normalize_to_identity_metric: block types differ");
  for (const Matrix &b : h.blocks())
    if (!is_positive_definite(b))
      throw ValidationError(
          "normalize_to_identity_metric: metric is not positive definite");
  return BundleParams{p.eta, conjugate(p.y, h.sqrt())};
}

} // namespace homcd
