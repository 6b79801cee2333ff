#pragma once

// The multiplication operator M (f -> z f) on the sections of
// (E^(eta,Y), K_N), written in the orthonormal basis Gamma_N(e_{j,p,i}), with
// its grading H(n) = span{e_{j,p,i} : j + p = n}.

#include "homcd/kernel.hpp"

#include <limits>

namespace homcd {

/// Label (j, p) of the monomial z^p in level j; it lies in H(j + p).
struct GradeLabel {
  int level;
  int degree;
  friend bool operator==(const GradeLabel &, const GradeLabel &) = default;
};

/// For every n <= D, the labels (j, p) with j + p = n, ordered by j.
inline std::vector<std::vector<GradeLabel>> isotypic_grading(const BlockType &t,
                                                             int degree) {
  std::vector<std::vector<GradeLabel>> grading;
  for (int n = 0; n <= degree; ++n) {
    std::vector<GradeLabel> labels;
    for (int j = 0; j <= std::min(t.top(), n); ++j)
      labels.push_back({j, n - j});
    grading.push_back(std::move(labels));
  }
  return grading;
}

inline int grade_dimension(const BlockType &t, int n) {
  int d = 0;
  for (int j = 0; j <= std::min(t.top(), n); ++j)
    d += t.size(j);
  return d;
}

struct BasisVector {
  int grade;
  int level;
  int degree;
  int component;
};

struct GradedOperatorMatrix {
  BundleParams params;
  BlockDiagonal normalization;
  int degree = 0;
  /// Entry (l, k) is <M b_k, b_l>. Columns in H(D) are left zero (their image
  /// lies beyond the truncation).
  Matrix entries;
  std::vector<BasisVector> basis;
  /// grade_start[n] is the first basis index in H(n); grade_start[D+1] = size.
  std::vector<int> grade_start;

  int grade_size(int n) const { return grade_start[n + 1] - grade_start[n]; }

  /// M_n : H(n) -> H(n+1), for 0 <= n < D.
  Matrix block(int n) const {
    if (n < 0 || n >= degree)
      throw std::out_of_range("GradedOperatorMatrix::block: grade out of range");
    return entries.block(grade_start[n + 1], grade_start[n], grade_size(n + 1),
                         grade_size(n));
  }

  /// sup_n ||M_n|| over the computed blocks; equals ||M|| of the truncation.
  double norm_estimate() const {
    double best = 0.0;
    for (int n = 0; n < degree; ++n) {
      Eigen::JacobiSVD<Matrix> svd(block(n));
      best = std::max(best, svd.singularValues()(0));
    }
    return best;
  }
};

/// Matrix of f -> z f pulled back through Gamma_N onto the normalized monomial basis.
inline GradedOperatorMatrix multiplication_matrix(const BundleParams &p,
                                                  const BlockDiagonal &n, int degree) {
  detail::require_kernel_params(p, "multiplication_matrix");
  detail::require_normalization(p, n, "multiplication_matrix");
  if (degree < 1)
    throw ValidationError("multiplication_matrix: truncation must be positive");
  const BlockType &t = p.type();

  GradedOperatorMatrix m;
  m.params = p;
  m.normalization = n;
  m.degree = degree;
  const auto grading = isotypic_grading(t, degree);
  for (int g = 0; g <= degree; ++g) {
    m.grade_start.push_back(static_cast<int>(m.basis.size()));
    for (const GradeLabel &lab : grading[g])
      for (int i = 0; i < t.size(lab.level); ++i)
        m.basis.push_back({g, lab.level, lab.degree, i});
  }
  m.grade_start.push_back(static_cast<int>(m.basis.size()));

  std::vector<WeightedSpace> spaces;
  for (int j = 0; j < t.levels(); ++j)
    spaces.emplace_back(p.eta + j);

  const BlockDiagonal n_inv = n.inverse();
  const Eigen::Index size = static_cast<Eigen::Index>(m.basis.size());
  m.entries = Matrix::Zero(size, size);
  for (Eigen::Index k = 0; k < size; ++k) {
    const BasisVector &b = m.basis[k];
    if (b.grade >= degree)
      continue;
    GradedSection e = GradedSection::zero(t);
    e.components[b.level] = VectorPolynomial::monomial(
        Vector::Unit(t.size(b.level), b.component) / spaces[b.level].norm(b.degree),
        b.degree);
    const VectorPolynomial image = gamma_n_apply(p, n, e).times_z();
    GradedSection f = gamma_inverse(p, image);
    for (int j = 0; j < t.levels(); ++j)
      f.components[j] = n_inv.block(j) * f.components[j];
    for (Eigen::Index l = 0; l < size; ++l) {
      const BasisVector &c = m.basis[l];
      const cplx coeff = f.components[c.level].coeff(c.degree)(c.component);
      m.entries(l, k) = coeff * spaces[c.level].norm(c.degree);
    }
  }
  return m;
}

/// Largest entry outside the blocks H(n) -> H(n+1).
inline double block_shift_residual(const GradedOperatorMatrix &m) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < m.entries.cols(); ++k)
    for (Eigen::Index l = 0; l < m.entries.rows(); ++l)
      if (m.basis[l].grade != m.basis[k].grade + 1)
        worst = std::max(worst, std::abs(m.entries(l, k)));
  return worst;
}

struct AsymptoticReport {
  std::vector<int> grades;
  /// ||M_n - I|| (spectral norm), with H(n) and H(n+1) aligned by (j,p) -> (j,p+1).
  std::vector<double> deviation;
  /// ||M_n - I||_HS^2 and the running sums of those terms.
  std::vector<double> hs_terms;
  std::vector<double> hs_partial_sums;
  /// Least-squares slope of log ||M_n - I|| against log n over the upper half
  /// of the grades; -infinity when the deviations vanish identically there.
  double decay_exponent = 0.0;
};

inline AsymptoticReport asymptotic_diagnostics(const GradedOperatorMatrix &m) {
  const int top = m.params.type().top();
  const int first = std::max(top, 1);
  if (m.degree - first < 10)
    throw NumericalError("asymptotic_diagnostics: need at least 10 full-size "
                         "blocks; increase the truncation");
  AsymptoticReport r;
  double sum = 0.0;
  for (int n = first; n < m.degree; ++n) {
    const Matrix b = m.block(n);
    const Matrix diff = b - Matrix::Identity(b.rows(), b.cols());
    Eigen::JacobiSVD<Matrix> svd(diff);
    const double hs = diff.squaredNorm();
    sum += hs;
    r.grades.push_back(n);
    r.deviation.push_back(svd.singularValues()(0));
    r.hs_terms.push_back(hs);
    r.hs_partial_sums.push_back(sum);
  }

  std::vector<double> xs, ys;
  for (std::size_t i = r.grades.size() / 2; i < r.grades.size(); ++i)
    if (r.deviation[i] > 1e-300) {
      xs.push_back(std::log(static_cast<double>(r.grades[i])));
      ys.push_back(std::log(r.deviation[i]));
    }
  if (xs.size() < 2 || *std::max_element(r.deviation.begin() + r.deviation.size() / 2,
                                          r.deviation.end()) < 1e-14) {
    r.decay_exponent = -std::numeric_limits<double>::infinity();
    return r;
  }
  const double k = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  r.decay_exponent = sxy / sxx;
  return r;
}

/// Numerical rank of K(w, w): the dimension of the eigenspace of M* at conj(w).
inline int eigenspace_dimension(const KernelSeries &k, cplx w) {
  return numerical_rank(k.at_checked(w, w, 1e-8), tol::null_space);
}

/// Largest transformation residual of K_N over the sampled group elements.
inline double homogeneity_residual(const BundleParams &p, const BlockDiagonal &n,
                                   int degree, const std::vector<MobiusElement> &gs,
                                   const std::vector<std::pair<cplx, cplx>> &samples) {
  const KernelSeries k = kernel_series(p, n, degree);
  double worst = 0.0;
  for (const MobiusElement &g : gs)
    worst = std::max(worst, transformation_residual(k, g, samples));
  return worst;
}

} // namespace homcd
