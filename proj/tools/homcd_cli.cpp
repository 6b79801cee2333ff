// homcd: command-line front end for the homogeneous bundle / operator library.
//
// Exit codes: 0 success, 1 parse or validation error, 2 numerical failure,
// 3 negative verdict, 4 verification residual exceeded.

#include "homcd/homcd.hpp"
#include "homcd/io.hpp"
#include "homcd/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace homcd;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kNumerical = 2;
constexpr int kNegative = 3;
constexpr int kResidual = 4;

std::string fmt_complex(cplx z) {
  std::ostringstream os;
  os << std::setprecision(10) << z.real() << (z.imag() < 0 ? "-" : "+")
     << std::abs(z.imag()) << "i";
  return os.str();
}

void print_matrix(std::ostream &out, const Matrix &m, const std::string &indent = "  ") {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out << indent;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out << std::setw(24) << fmt_complex(m(r, c));
    out << '\n';
  }
}

cplx parse_point(const std::string &s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos)
      return {std::stod(s), 0.0};
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception &) {
    throw ValidationError("cannot parse point '" + s + "' (use re or re,im)");
  }
}

int cmd_describe(const std::string &file) {
  const ParamFile pf = load_param_file(file);
  const BundleParams &p = pf.params;
  std::cout << "eta: " << std::setprecision(17) << p.eta << '\n';
  std::cout << "block type:";
  for (int d : p.type().sizes())
    std::cout << ' ' << d;
  std::cout << "  (n = " << p.rank() << ", m = " << p.type().top() << ")\n";
  const RepresentationPair rp = representation_pair(p);
  std::cout << std::setprecision(6) << "rho(h):\n";
  print_matrix(std::cout, rp.rho_h);
  std::cout << "rho(y):\n";
  print_matrix(std::cout, rp.rho_y);
  const double comm = max_abs(rp.rho_h * rp.rho_y - rp.rho_y * rp.rho_h + rp.rho_y);
  std::cout << "commutator residual |[rho(h),rho(y)] + rho(y)|: " << comm << '\n';
  const IrreducibilityResult irr = is_irreducible(p.y);
  std::cout << "Hermitian block-diagonal commutant dimension: " << irr.commutant_dimension
            << '\n';
  std::cout << "irreducible: " << (irr.irreducible ? "yes" : "no") << '\n';
  if (irr.witness) {
    std::cout << "reducing projection:\n";
    print_matrix(std::cout, *irr.witness);
  }
  return kOk;
}

int cmd_check_p(const std::string &file) {
  const ParamFile pf = load_param_file(file);
  const PositivityCertificate cert = membership_in_P(pf.params);
  std::cout << "in P: " << (cert.in_P ? "yes" : "no") << '\n';
  if (!cert.reason.empty())
    std::cout << "reason: " << cert.reason << '\n';
  std::cout << std::setprecision(12);
  for (std::size_t l = 0; l < cert.deltas.size(); ++l) {
    const RealVector ev = hermitian_eigenvalues(cert.deltas[l]);
    std::cout << "Delta_" << l << " eigenvalues:";
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      std::cout << ' ' << ev(i);
    std::cout << '\n';
  }
  return cert.in_P ? kOk : kNegative;
}

int cmd_eta_threshold(const std::string &file, double tolerance) {
  const ParamFile pf = load_param_file(file);
  const ThresholdResult r = eta_threshold(pf.params.y, tolerance);
  std::cout << std::setprecision(15);
  std::cout << "eta_Y: " << r.estimate << '\n';
  std::cout << "bracket: [" << r.lower << ", " << r.upper << "]\n";
  std::cout << "monotonicity grid: " << r.samples << " samples, " << r.violations
            << " violations\n";
  return kOk;
}

int cmd_equivalent(const std::string &f1, const std::string &f2, bool unitary) {
  const ParamFile a = load_param_file(f1);
  const ParamFile b = load_param_file(f2);
  std::optional<BlockDiagonal> x;
  if (unitary) {
    if (std::abs(a.params.eta - b.params.eta) > tol::comparison) {
      std::cout << "NOT-EQUIVALENT (eta differs)\n";
      return kNegative;
    }
    x = unitary_equivalent(a.params.y, b.params.y);
  } else {
    x = bundles_equivalent(a.params, b.params, tol::comparison, a.seed);
  }
  if (!x) {
    std::cout << "NOT-EQUIVALENT\n";
    return kNegative;
  }
  std::cout << (unitary ? "EQUIVALENT (block-diagonal unitary U with U Y U* = Y')\n"
                        : "EQUIVALENT (block-diagonal A with A Y A^-1 = Y')\n");
  std::cout << std::setprecision(8);
  for (int j = 0; j < x->type().levels(); ++j) {
    std::cout << "block " << j << ":\n";
    print_matrix(std::cout, x->block(j));
  }
  return kOk;
}

int cmd_kernel(const std::string &file, std::optional<int> deg,
               const std::vector<std::string> &at) {
  const ParamFile pf = load_param_file(file);
  const int degree = deg.value_or(pf.truncation);
  const BlockDiagonal n = choose_normalization(pf);
  const KernelSeries k = kernel_series(pf.params, n, degree);
  if (at.empty()) {
    write_kernel_csv(std::cout, k.coefficients);
    return kOk;
  }
  if (at.size() != 2)
    throw ValidationError("--at expects two points z w");
  write_matrix_csv(std::cout, k.at(parse_point(at[0]), parse_point(at[1])));
  return kOk;
}

int cmd_operator(const std::string &file, std::optional<int> deg) {
  const ParamFile pf = load_param_file(file);
  const int degree = deg.value_or(pf.truncation);
  const BlockDiagonal n = choose_normalization(pf);
  const GradedOperatorMatrix m = multiplication_matrix(pf.params, n, degree);

  std::cout << "# grading: n dim labels(j,p)\n";
  const auto grading = isotypic_grading(pf.params.type(), degree);
  for (int g = 0; g <= degree; ++g) {
    std::cout << "# H(" << g << ") " << m.grade_size(g);
    for (const GradeLabel &lab : grading[g])
      std::cout << " (" << lab.level << ',' << lab.degree << ')';
    std::cout << '\n';
  }
  std::cout << std::setprecision(10);
  std::cout << "# block-shift residual: " << block_shift_residual(m) << '\n';
  std::cout << "# norm estimate: " << m.norm_estimate() << '\n';
  try {
    const AsymptoticReport r = asymptotic_diagnostics(m);
    std::cout << "# asymptotics: n ||M_n - I|| ||M_n - I||_HS^2 partial_sum\n";
    for (std::size_t i = 0; i < r.grades.size(); ++i)
      std::cout << "# " << r.grades[i] << ' ' << r.deviation[i] << ' ' << r.hs_terms[i]
                << ' ' << r.hs_partial_sums[i] << '\n';
    std::cout << "# decay exponent: " << r.decay_exponent << '\n';
  } catch (const NumericalError &e) {
    std::cout << "# asymptotics unavailable: " << e.what() << '\n';
  }
  std::cout << "row,col,re,im\n";
  for (Eigen::Index c = 0; c < m.entries.cols(); ++c)
    for (Eigen::Index r = 0; r < m.entries.rows(); ++r)
      if (m.entries(r, c) != cplx(0.0))
        std::cout << r << ',' << c << ',' << format_double(m.entries(r, c).real()) << ','
                  << format_double(m.entries(r, c).imag()) << '\n';
  return kOk;
}

int cmd_verify(const std::string &file, int samples, std::optional<std::uint64_t> seed) {
  const ParamFile pf = load_param_file(file);
  const auto results = run_verification(pf, samples, seed.value_or(pf.seed));
  bool ok = true;
  std::cout << std::left << std::setw(22) << "check" << std::setw(16) << "max residual"
            << std::setw(12) << "tolerance" << "status\n";
  for (const CheckResult &c : results) {
    std::cout << std::setw(22) << c.name << std::setw(16) << std::setprecision(4)
              << c.value << std::setw(12) << c.tolerance << (c.passed ? "ok" : "FAILED");
    if (!c.note.empty())
      std::cout << "  " << c.note;
    std::cout << '\n';
    ok = ok && c.passed;
  }
  return ok ? kOk : kResidual;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Homogeneous Cowen-Douglas operators: bundles, kernels and "
               "multiplication operators on the unit disc"};
  app.require_subcommand(1);

  std::string file, file2;
  double eta_tol = 1e-12;
  bool unitary = false;
  std::optional<int> deg;
  std::vector<std::string> at;
  int samples = 20;
  std::optional<std::uint64_t> seed;

  auto *describe = app.add_subcommand(
      "describe", "Print the block type, rho(h), rho(y) and the irreducibility verdict");
  describe->add_option("file", file, "Parameter file")->required();

  auto *check_p = app.add_subcommand(
      "check-p", "Positivity certificate; exit 0 if in P, 3 if not");
  check_p->add_option("file", file, "Parameter file")->required();

  auto *threshold = app.add_subcommand("eta-threshold",
                                       "Bisect for the eta above which membership holds");
  threshold->add_option("file", file, "Parameter file")->required();
  threshold->add_option("--tol", eta_tol, "Bracket width")->capture_default_str();

  auto *equivalent = app.add_subcommand(
      "equivalent", "Block-diagonal intertwiner between two parameter sets; exit 0/3");
  equivalent->add_option("file1", file, "First parameter file")->required();
  equivalent->add_option("file2", file2, "Second parameter file")->required();
  equivalent->add_flag("--unitary", unitary,
                       "Require a block-diagonal unitary (irreducible inputs only)");

  auto *kernel = app.add_subcommand(
      "kernel", "Dump kernel coefficients as CSV (p,q,row,col,re,im) or evaluate K(z,w)");
  kernel->add_option("file", file, "Parameter file")->required();
  kernel->add_option("--deg", deg, "Truncation degree (default: file or 40)");
  kernel->add_option("--at", at, "Evaluate at z w (each 're' or 're,im')")->expected(2);

  auto *op = app.add_subcommand(
      "operator", "Dump the multiplication-operator matrix, grading and asymptotics");
  op->add_option("file", file, "Parameter file")->required();
  op->add_option("--deg", deg, "Truncation degree (default: file or 40)");

  auto *verify = app.add_subcommand(
      "verify", "Randomized residual checks; exit 0 if all pass, 4 otherwise");
  verify->add_option("file", file, "Parameter file")->required();
  verify->add_option("--samples", samples, "Samples per check")->capture_default_str();
  verify->add_option("--seed", seed, "Random seed (default: file seed or 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*describe)
      return cmd_describe(file);
    if (*check_p)
      return cmd_check_p(file);
    if (*threshold)
      return cmd_eta_threshold(file, eta_tol);
    if (*equivalent)
      return cmd_equivalent(file, file2, unitary);
    if (*kernel)
      return cmd_kernel(file, deg, at);
    if (*op)
      return cmd_operator(file, deg);
    if (*verify)
      return cmd_verify(file, samples, seed);
  } catch (const ValidationError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const NumericalError &e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kInvalid;
}
