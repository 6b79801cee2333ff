#pragma once

// Numeric substrate: complex dense matrices, block-structured matrices,
// vector-valued polynomials, truncated power series and two-variable series.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace homcd {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Malformed input: shapes, parameter ranges, non-Hermitian data.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A computation left its domain of validity (truncation, branch cut, rank).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double comparison = 1e-9;
inline constexpr double positivity = 1e-10;
inline constexpr double hermitian = 1e-12;
inline constexpr double null_space = 1e-8;
inline constexpr double max_condition = 1e12;
} // namespace tol

// ---------------------------------------------------------------------------
// scalar helpers

/// Rising factorial x(x+1)...(x+k-1); the empty product is 1.
inline double pochhammer(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i)
    r *= x + i;
  return r;
}

inline double factorial(int k) { return pochhammer(1.0, k); }

/// Falling factorial p(p-1)...(p-k+1), the factor picked up by d^k/dz^k z^p.
inline double falling_factorial(int p, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i)
    r *= p - i;
  return r;
}

// ---------------------------------------------------------------------------
// dense matrix helpers

inline double max_abs(const Matrix &a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline Matrix hermitian_part(const Matrix &a) {
  return (a + a.adjoint()) / 2.0;
}

inline bool is_hermitian(const Matrix &a, double tolerance = tol::hermitian) {
  if (a.rows() != a.cols())
    return false;
  return max_abs(a - a.adjoint()) <= tolerance * std::max(1.0, max_abs(a));
}

/// Eigenvalues of the symmetrized matrix, ascending.
inline RealVector hermitian_eigenvalues(const Matrix &a) {
  if (a.size() == 0)
    return RealVector();
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// True iff the smallest eigenvalue of A exceeds `tolerance`.
/// A must be Hermitian to within the comparison tolerance (relative).
inline bool is_positive_definite(const Matrix &a,
                                 double tolerance = tol::positivity) {
  if (a.rows() != a.cols())
    throw ValidationError("is_positive_definite: matrix is not square");
  if (a.size() == 0)
    return true;
  if (!is_hermitian(a, tol::comparison))
    throw ValidationError("is_positive_definite: matrix is not Hermitian");
  return hermitian_eigenvalues(a)(0) > tolerance;
}

/// Principal square root of a positive semidefinite Hermitian matrix.
inline Matrix hermitian_sqrt(const Matrix &a) {
  if (a.size() == 0)
    return a;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a));
  RealVector ev = es.eigenvalues();
  if (ev(0) < -tol::positivity * std::max(1.0, std::abs(ev(ev.size() - 1))))
    throw ValidationError("hermitian_sqrt: matrix is not positive semidefinite");
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() *
         es.eigenvectors().adjoint();
}

inline double condition_number(const Matrix &a) {
  if (a.size() == 0)
    return 1.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto &s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin == 0.0 ? std::numeric_limits<double>::infinity() : s(0) / smin;
}

/// Rank with singular values below `rel_tol * sigma_max` treated as zero.
inline int numerical_rank(const Matrix &a, double rel_tol = tol::null_space) {
  if (a.size() == 0)
    return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto &s = svd.singularValues();
  if (s(0) == 0.0)
    return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0))
      ++r;
  return r;
}

namespace detail {
template <typename Mat> Mat null_space_impl(const Mat &a, double rel_tol) {
  const Eigen::Index cols = a.cols();
  if (a.rows() == 0 || cols == 0)
    return Mat::Identity(cols, cols);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const auto &s = svd.singularValues();
  const double cutoff = rel_tol * s(0);
  Eigen::Index rank = 0;
  if (s(0) > 0.0)
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > cutoff)
        ++rank;
  return svd.matrixV().rightCols(cols - rank);
}
} // namespace detail

/// Orthonormal basis (as columns) of the numerical null space of A.
/// Singular values at most `rel_tol` times the largest count as zero.
inline Matrix null_space(const Matrix &a, double rel_tol = tol::null_space) {
  return detail::null_space_impl(a, rel_tol);
}

inline RealMatrix null_space(const RealMatrix &a,
                             double rel_tol = tol::null_space) {
  return detail::null_space_impl(a, rel_tol);
}

// ---------------------------------------------------------------------------
// block structure

/// Block sizes d_0, ..., d_m of an elementary representation.
class BlockType {
public:
  BlockType() = default;

  explicit BlockType(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty())
      throw ValidationError("BlockType: at least one block is required");
    offsets_.reserve(sizes_.size() + 1);
    offsets_.push_back(0);
    for (int d : sizes_) {
      if (d < 1)
        throw ValidationError("BlockType: block sizes must be positive");
      offsets_.push_back(offsets_.back() + d);
    }
  }

  /// Number of blocks, m + 1.
  int levels() const { return static_cast<int>(sizes_.size()); }
  /// Index m of the last block.
  int top() const { return levels() - 1; }
  /// Total dimension n.
  int rank() const { return offsets_.empty() ? 0 : offsets_.back(); }
  int size(int j) const { return sizes_.at(j); }
  int offset(int j) const { return offsets_.at(j); }
  const std::vector<int> &sizes() const { return sizes_; }

  friend bool operator==(const BlockType &, const BlockType &) = default;

private:
  std::vector<int> sizes_;
  std::vector<int> offsets_;
};

/// Strictly block-subdiagonal matrix given by Y_1, ..., Y_m, Y_j : C^{d_{j-1}} -> C^{d_j}.
class SubdiagonalY {
public:
  SubdiagonalY() = default;

  SubdiagonalY(BlockType type, std::vector<Matrix> blocks)
      : type_(std::move(type)), blocks_(std::move(blocks)) {
    if (static_cast<int>(blocks_.size()) != type_.top())
      throw ValidationError("SubdiagonalY: expected " +
                            std::to_string(type_.top()) + " blocks, got " +
                            std::to_string(blocks_.size()));
    for (int j = 1; j <= type_.top(); ++j) {
      const Matrix &b = blocks_[j - 1];
      if (b.rows() != type_.size(j) || b.cols() != type_.size(j - 1))
        throw ValidationError(
            "SubdiagonalY: Y_" + std::to_string(j) + " has shape " +
            std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
            ", expected " + std::to_string(type_.size(j)) + "x" +
            std::to_string(type_.size(j - 1)));
    }
  }

  static SubdiagonalY zero(const BlockType &type) {
    std::vector<Matrix> blocks;
    for (int j = 1; j <= type.top(); ++j)
      blocks.push_back(Matrix::Zero(type.size(j), type.size(j - 1)));
    return SubdiagonalY(type, std::move(blocks));
  }

  const BlockType &type() const { return type_; }
  /// Y_j for 1 <= j <= m.
  const Matrix &block(int j) const { return blocks_.at(j - 1); }
  const std::vector<Matrix> &blocks() const { return blocks_; }

  /// Y_l Y_{l-1} ... Y_{j+1} : C^{d_j} -> C^{d_l}; the identity when l == j.
  Matrix chain(int l, int j) const {
    Matrix r = Matrix::Identity(type_.size(j), type_.size(j));
    for (int k = j + 1; k <= l; ++k)
      r = block(k) * r;
    return r;
  }

  Matrix assemble() const {
    const int n = type_.rank();
    Matrix y = Matrix::Zero(n, n);
    for (int j = 1; j <= type_.top(); ++j)
      y.block(type_.offset(j), type_.offset(j - 1), type_.size(j),
              type_.size(j - 1)) = block(j);
    return y;
  }

private:
  BlockType type_;
  std::vector<Matrix> blocks_;
};

/// Block-diagonal matrix with blocks of size d_j x d_j.
class BlockDiagonal {
public:
  BlockDiagonal() = default;

  BlockDiagonal(BlockType type, std::vector<Matrix> blocks)
      : type_(std::move(type)), blocks_(std::move(blocks)) {
    if (static_cast<int>(blocks_.size()) != type_.levels())
      throw ValidationError("BlockDiagonal: expected " +
                            std::to_string(type_.levels()) + " blocks, got " +
                            std::to_string(blocks_.size()));
    for (int j = 0; j < type_.levels(); ++j)
      if (blocks_[j].rows() != type_.size(j) ||
          blocks_[j].cols() != type_.size(j))
        throw ValidationError("BlockDiagonal: block " + std::to_string(j) +
                              " must be " + std::to_string(type_.size(j)) +
                              "x" + std::to_string(type_.size(j)));
  }

  static BlockDiagonal identity(const BlockType &type) {
    std::vector<Matrix> blocks;
    for (int d : type.sizes())
      blocks.push_back(Matrix::Identity(d, d));
    return BlockDiagonal(type, std::move(blocks));
  }

  /// Splits a dense n x n matrix into its diagonal blocks (off-diagonal parts are dropped).
  static BlockDiagonal from_dense(const BlockType &type, const Matrix &a) {
    std::vector<Matrix> blocks;
    for (int j = 0; j < type.levels(); ++j)
      blocks.push_back(a.block(type.offset(j), type.offset(j), type.size(j),
                               type.size(j)));
    return BlockDiagonal(type, std::move(blocks));
  }

  const BlockType &type() const { return type_; }
  const Matrix &block(int j) const { return blocks_.at(j); }
  const std::vector<Matrix> &blocks() const { return blocks_; }

  Matrix assemble() const {
    const int n = type_.rank();
    Matrix a = Matrix::Zero(n, n);
    for (int j = 0; j < type_.levels(); ++j)
      a.block(type_.offset(j), type_.offset(j), type_.size(j), type_.size(j)) =
          blocks_[j];
    return a;
  }

  double condition() const {
    double smax = 0.0, smin = std::numeric_limits<double>::infinity();
    for (const Matrix &b : blocks_) {
      Eigen::JacobiSVD<Matrix> svd(b);
      const auto &s = svd.singularValues();
      smax = std::max(smax, s(0));
      smin = std::min(smin, s(s.size() - 1));
    }
    if (smin == 0.0)
      return std::numeric_limits<double>::infinity();
    return smax / smin;
  }

  bool invertible(double max_condition = tol::max_condition) const {
    return condition() <= max_condition;
  }

  BlockDiagonal adjoint() const {
    return transform([](const Matrix &b) -> Matrix { return b.adjoint(); });
  }
  BlockDiagonal inverse() const {
    if (!invertible())
      throw NumericalError("BlockDiagonal: matrix is numerically singular");
    return transform([](const Matrix &b) -> Matrix { return b.inverse(); });
  }
  /// Blockwise principal square root; blocks must be positive semidefinite.
  BlockDiagonal sqrt() const { return transform(hermitian_sqrt); }

  friend BlockDiagonal operator*(const BlockDiagonal &a, const BlockDiagonal &b) {
    if (!(a.type_ == b.type_))
      throw ValidationError("BlockDiagonal: block types differ");
    std::vector<Matrix> blocks;
    for (int j = 0; j < a.type_.levels(); ++j)
      blocks.push_back(a.blocks_[j] * b.blocks_[j]);
    return BlockDiagonal(a.type_, std::move(blocks));
  }

  template <typename F> BlockDiagonal transform(F &&f) const {
    std::vector<Matrix> blocks;
    blocks.reserve(blocks_.size());
    for (const Matrix &b : blocks_)
      blocks.push_back(f(b));
    return BlockDiagonal(type_, std::move(blocks));
  }

private:
  BlockType type_;
  std::vector<Matrix> blocks_;
};

/// Conjugates Y by a block-diagonal A: blocks A_j Y_j A_{j-1}^{-1}.
inline SubdiagonalY conjugate(const SubdiagonalY &y, const BlockDiagonal &a) {
  if (!(y.type() == a.type()))
    throw ValidationError("conjugate: block types differ");
  std::vector<Matrix> blocks;
  for (int j = 1; j <= y.type().top(); ++j)
    blocks.push_back(a.block(j) * y.block(j) * a.block(j - 1).inverse());
  return SubdiagonalY(y.type(), std::move(blocks));
}

// ---------------------------------------------------------------------------
// polynomials and truncated series

/// Polynomial sum_p c_p z^p with coefficients in C^dim.
class VectorPolynomial {
public:
  VectorPolynomial() = default;
  explicit VectorPolynomial(int dim) : dim_(dim) {}
  VectorPolynomial(int dim, std::vector<Vector> coeffs)
      : dim_(dim), coeffs_(std::move(coeffs)) {
    for (const Vector &c : coeffs_)
      if (c.size() != dim_)
        throw ValidationError("VectorPolynomial: coefficient dimension mismatch");
  }

  /// v z^p
  static VectorPolynomial monomial(const Vector &v, int p) {
    std::vector<Vector> c(p + 1, Vector::Zero(v.size()));
    c[p] = v;
    return VectorPolynomial(static_cast<int>(v.size()), std::move(c));
  }

  int dim() const { return dim_; }
  /// Length of the coefficient list minus one; -1 for the empty polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Vector> &coeffs() const { return coeffs_; }

  /// Coefficient of z^p (zero beyond the stored range).
  Vector coeff(int p) const {
    if (p < 0 || p > degree())
      return Vector::Zero(dim_);
    return coeffs_[p];
  }

  /// Exact k-th formal derivative.
  VectorPolynomial derivative(int k = 1) const {
    if (k < 0)
      throw ValidationError("derivative: order must be nonnegative");
    std::vector<Vector> c;
    for (int p = k; p <= degree(); ++p)
      c.push_back(falling_factorial(p, k) * coeffs_[p]);
    return VectorPolynomial(dim_, std::move(c));
  }

  VectorPolynomial times_z() const {
    std::vector<Vector> c;
    c.reserve(coeffs_.size() + 1);
    c.push_back(Vector::Zero(dim_));
    c.insert(c.end(), coeffs_.begin(), coeffs_.end());
    return VectorPolynomial(dim_, std::move(c));
  }

  Vector evaluate(cplx z) const {
    Vector r = Vector::Zero(dim_);
    for (int p = degree(); p >= 0; --p)
      r = r * z + coeffs_[p];
    return r;
  }

  /// Applies a linear map to every coefficient.
  friend VectorPolynomial operator*(const Matrix &a, const VectorPolynomial &f) {
    if (a.cols() != f.dim_)
      throw ValidationError("VectorPolynomial: matrix shape mismatch");
    std::vector<Vector> c;
    c.reserve(f.coeffs_.size());
    for (const Vector &v : f.coeffs_)
      c.push_back(a * v);
    return VectorPolynomial(static_cast<int>(a.rows()), std::move(c));
  }

  friend VectorPolynomial operator*(cplx s, const VectorPolynomial &f) {
    VectorPolynomial r = f;
    for (Vector &v : r.coeffs_)
      v *= s;
    return r;
  }

  VectorPolynomial &operator+=(const VectorPolynomial &o) {
    if (o.dim_ != dim_)
      throw ValidationError("VectorPolynomial: dimension mismatch");
    if (o.coeffs_.size() > coeffs_.size())
      coeffs_.resize(o.coeffs_.size(), Vector::Zero(dim_));
    for (std::size_t p = 0; p < o.coeffs_.size(); ++p)
      coeffs_[p] += o.coeffs_[p];
    return *this;
  }
  friend VectorPolynomial operator+(VectorPolynomial a, const VectorPolynomial &b) {
    return a += b;
  }
  friend VectorPolynomial operator-(VectorPolynomial a, const VectorPolynomial &b) {
    return a += cplx(-1.0) * b;
  }

private:
  int dim_ = 0;
  std::vector<Vector> coeffs_;
};

/// Scalar power series truncated after z^order.
using Series = std::vector<cplx>;

namespace series {

inline Series truncate(Series a, int order) {
  a.resize(order + 1, cplx(0.0));
  return a;
}

inline Series multiply(const Series &a, const Series &b, int order) {
  Series r(order + 1, cplx(0.0));
  for (std::size_t i = 0; i < a.size() && static_cast<int>(i) <= order; ++i) {
    if (a[i] == cplx(0.0))
      continue;
    for (std::size_t j = 0; j < b.size() && static_cast<int>(i + j) <= order; ++j)
      r[i + j] += a[i] * b[j];
  }
  return r;
}

/// (1 + u z)^s, truncated.
inline Series binomial(cplx u, double s, int order) {
  Series r(order + 1);
  r[0] = 1.0;
  for (int k = 1; k <= order; ++k)
    r[k] = r[k - 1] * u * (s - (k - 1)) / static_cast<double>(k);
  return r;
}

/// Coefficients of f(g(z)) truncated; g(0) need not vanish, f is evaluated by Horner.
inline Series compose(const Series &f, const Series &g, int order) {
  Series r(order + 1, cplx(0.0));
  for (auto it = f.rbegin(); it != f.rend(); ++it) {
    r = multiply(r, g, order);
    r[0] += *it;
  }
  return r;
}

inline cplx evaluate(const Series &a, cplx z) {
  cplx r = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it)
    r = r * z + *it;
  return r;
}

} // namespace series

/// Truncated sesqui-holomorphic expansion sum_{p,q<=D} C_{p,q} z^p conj(w)^q with n x n coefficients.
class TwoVariableSeries {
public:
  TwoVariableSeries() = default;
  TwoVariableSeries(int degree, int dim)
      : degree_(degree), dim_(dim),
        coeffs_(static_cast<std::size_t>((degree + 1) * (degree + 1)),
                Matrix::Zero(dim, dim)) {
    if (degree < 0 || dim < 1)
      throw ValidationError("TwoVariableSeries: bad degree or dimension");
  }

  int degree() const { return degree_; }
  int dim() const { return dim_; }

  Matrix &operator()(int p, int q) { return coeffs_[index(p, q)]; }
  const Matrix &operator()(int p, int q) const { return coeffs_[index(p, q)]; }

  Matrix evaluate(cplx z, cplx w) const {
    const cplx wb = std::conj(w);
    Matrix r = Matrix::Zero(dim_, dim_);
    for (int p = degree_; p >= 0; --p) {
      Matrix row = Matrix::Zero(dim_, dim_);
      for (int q = degree_; q >= 0; --q)
        row = row * wb + (*this)(p, q);
      r = r * z + row;
    }
    return r;
  }

  /// Size of the outermost retained ring (max(p,q) == D) relative to the
  /// whole sum, at the point (z, w).
  double tail_ratio(cplx z, cplx w) const {
    const double rz = std::abs(z), rw = std::abs(w);
    double tail = 0.0;
    for (int k = 0; k <= degree_; ++k) {
      tail += max_abs((*this)(degree_, k)) * std::pow(rz, degree_) * std::pow(rw, k);
      if (k < degree_)
        tail += max_abs((*this)(k, degree_)) * std::pow(rz, k) * std::pow(rw, degree_);
    }
    const double total = max_abs(evaluate(z, w));
    return total == 0.0 ? tail : tail / total;
  }

  bool hermitian_symmetric(double tolerance = tol::hermitian) const {
    for (int p = 0; p <= degree_; ++p)
      for (int q = 0; q <= p; ++q)
        if (max_abs((*this)(p, q) - (*this)(q, p).adjoint()) > tolerance)
          return false;
    return true;
  }

private:
  std::size_t index(int p, int q) const {
    if (p < 0 || q < 0 || p > degree_ || q > degree_)
      throw std::out_of_range("TwoVariableSeries: index out of range");
    return static_cast<std::size_t>(p * (degree_ + 1) + q);
  }

  int degree_ = 0;
  int dim_ = 0;
  std::vector<Matrix> coeffs_;
};

} // namespace homcd
