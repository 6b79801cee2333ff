#pragma once

// Disc automorphisms z -> (a z + b) / (conj(b) z + conj(a)) near the identity,
// and the bundle multiplier J_g(z) built from g'(z) and c_g.

#include "homcd/algebra.hpp"
#include "homcd/bundle.hpp"

#include <numbers>
#include <random>

namespace homcd {

/// Element of SU(1,1) acting on the unit disc. Only elements with
/// Re(a) > |b| are branch-valid: then conj(b) z + conj(a) stays in the right
/// half plane on the closed disc and principal powers of g' are continuous.
class MobiusElement {
public:
  MobiusElement() = default;

  MobiusElement(cplx a, cplx b) : a_(a), b_(b) {
    const double det = std::norm(a) - std::norm(b);
    if (std::abs(det - 1.0) > 1e-12 * std::max(1.0, std::norm(a)))
      throw ValidationError("MobiusElement: |a|^2 - |b|^2 must equal 1");
  }

  static MobiusElement identity() { return {1.0, 0.0}; }

  /// z -> e^{i theta} z with theta in (-pi, pi).
  static MobiusElement rotation(double theta) {
    if (!(std::abs(theta) < std::numbers::pi))
      throw ValidationError("rotation: angle must lie in (-pi, pi)");
    return {std::polar(1.0, theta / 2.0), 0.0};
  }

  /// a = cosh t, b = e^{i phi} sinh t; maps 0 to e^{i phi} tanh t.
  static MobiusElement hyperbolic(double t, double phi = 0.0) {
    return {std::cosh(t), std::polar(std::sinh(t), phi)};
  }

  cplx a() const { return a_; }
  cplx b() const { return b_; }

  bool branch_valid() const { return a_.real() > std::abs(b_); }

  /// conj(b) z + conj(a)
  cplx denominator(cplx z) const { return std::conj(b_) * z + std::conj(a_); }

  MobiusElement inverse() const { return {std::conj(a_), -b_}; }

  /// g1 o g2 (apply g2 first), renormalized, without the branch check.
  friend MobiusElement product(const MobiusElement &g1, const MobiusElement &g2) {
    cplx a = g1.a_ * g2.a_ + g1.b_ * std::conj(g2.b_);
    cplx b = g1.a_ * g2.b_ + g1.b_ * std::conj(g2.a_);
    const double scale = std::sqrt(std::norm(a) - std::norm(b));
    return {a / scale, b / scale};
  }

  /// g1 o g2; fails when the product is not branch-valid.
  friend MobiusElement compose(const MobiusElement &g1, const MobiusElement &g2) {
    MobiusElement g = product(g1, g2);
    if (!g.branch_valid())
      throw NumericalError("compose: product leaves the branch-valid neighbourhood");
    return g;
  }

private:
  cplx a_{1.0};
  cplx b_{0.0};
};

inline bool compose_is_branch_valid(const MobiusElement &g1, const MobiusElement &g2) {
  return g1.branch_valid() && g2.branch_valid() && product(g1, g2).branch_valid();
}

inline void require_branch_valid(const MobiusElement &g, const char *where) {
  if (!g.branch_valid())
    throw NumericalError(std::string(where) +
                         ": element is outside the branch-valid neighbourhood");
}

inline cplx act(const MobiusElement &g, cplx z) {
  if (!(std::abs(z) < 1.0))
    throw ValidationError("act: point must lie in the open unit disc");
  return (g.a() * z + g.b()) / g.denominator(z);
}

/// g'(z) = (conj(b) z + conj(a))^{-2}
inline cplx derivative(const MobiusElement &g, cplx z) {
  require_branch_valid(g, "derivative");
  const cplx d = g.denominator(z);
  return 1.0 / (d * d);
}

/// Lower-left entry of the SU(1,1) matrix.
inline cplx c_of(const MobiusElement &g) {
  require_branch_valid(g, "c_of");
  return std::conj(g.b());
}

/// (g'(z))^s on the principal branch of log(conj(b) z + conj(a)).
inline cplx fractional_power(const MobiusElement &g, cplx z, double s) {
  if (std::abs(z) > 1.0)
    throw ValidationError("fractional_power: point must lie in the closed disc");
  const cplx d = g.denominator(z);
  if (!(d.real() > 0.0))
    throw NumericalError("fractional_power: branch violation at this point");
  return std::exp(-2.0 * s * std::log(d));
}

/// Block lower-triangular multiplier with blocks
/// (1/(p-l)!) (-c_g)^{p-l} g'(z)^{eta + (p+l)/2} Y_p ... Y_{l+1}, p >= l.
inline Matrix multiplier(const MobiusElement &g, cplx z, const BundleParams &p) {
  require_branch_valid(g, "multiplier");
  if (!(std::abs(z) < 1.0))
    throw ValidationError("multiplier: point must lie in the open unit disc");
  const BlockType &t = p.type();
  const cplx minus_c = -c_of(g);
  Matrix j = Matrix::Zero(t.rank(), t.rank());
  for (int row = 0; row < t.levels(); ++row)
    for (int col = 0; col <= row; ++col) {
      const cplx scal = std::pow(minus_c, row - col) / factorial(row - col) *
                        fractional_power(g, z, p.eta + 0.5 * (row + col));
      j.block(t.offset(row), t.offset(col), t.size(row), t.size(col)) =
          scal * p.y.chain(row, col);
    }
  return j;
}

/// max-entry size of J_{g1 o g2}(z) - J_{g2}(z) J_{g1}(g2 z).
///
/// This is the ordering under which the section action f -> J_{g^-1} (f o g^-1)
/// is a representation and the kernel rule K(z,w) = J_g(z) K(gz,gw) J_g(w)*
/// is consistent under composition.
inline double cocycle_residual(const MobiusElement &g1, const MobiusElement &g2,
                               cplx z, const BundleParams &p) {
  const MobiusElement g12 = compose(g1, g2);
  const Matrix lhs = multiplier(g12, z, p);
  const Matrix rhs = multiplier(g2, z, p) * multiplier(g1, act(g2, z), p);
  return max_abs(lhs - rhs);
}

/// The same difference in the opposite factor order, J_{g1}(g2 z) J_{g2}(z).
inline double cocycle_residual_left(const MobiusElement &g1, const MobiusElement &g2,
                                    cplx z, const BundleParams &p) {
  const MobiusElement g12 = compose(g1, g2);
  return max_abs(multiplier(g12, z, p) -
                 multiplier(g1, act(g2, z), p) * multiplier(g2, z, p));
}

/// Draws rotation(theta) o hyperbolic(t, phi) with |theta| <= max_angle and
/// 0 <= t <= max_t; redraws until branch-valid.
template <typename Rng>
MobiusElement random_small(Rng &rng, double max_t = 0.5, double max_angle = 0.5) {
  std::uniform_real_distribution<double> ut(0.0, max_t);
  std::uniform_real_distribution<double> uang(-max_angle, max_angle);
  std::uniform_real_distribution<double> uphi(-std::numbers::pi, std::numbers::pi);
  for (;;) {
    const MobiusElement h = MobiusElement::hyperbolic(ut(rng), uphi(rng));
    const MobiusElement r = MobiusElement::rotation(uang(rng));
    const cplx a = r.a() * h.a();
    const cplx b = r.a() * h.b();
    MobiusElement g(a, b);
    if (g.branch_valid())
      return g;
  }
}

} // namespace homcd
