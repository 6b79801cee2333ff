#pragma once

// Parameter files (JSON) and CSV serialization of kernel coefficients.
//
// Parameter file keys:
//   eta         real
//   blocks      [d_0, ..., d_m]
//   Y           [Y_1, ..., Y_m], each a list of rows of [re, im] pairs
//   N           optional, [N_0, ..., N_m] in the same encoding
//   truncation  optional integer, default 40
//   seed        optional integer, default 0

#include "homcd/bundle.hpp"
#include "homcd/kernel.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

namespace homcd {

struct ParamFile {
  BundleParams params;
  std::optional<BlockDiagonal> normalization;
  int truncation = 40;
  std::uint64_t seed = 0;
};

namespace detail {

using json = nlohmann::json;

inline cplx parse_complex(const json &v, const std::string &path) {
  if (v.is_number())
    return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ValidationError(path + ": expected a [re, im] pair");
  return {v[0].get<double>(), v[1].get<double>()};
}

inline Matrix parse_matrix(const json &v, int rows, int cols, const std::string &path) {
  if (!v.is_array())
    throw ValidationError(path + ": expected a list of rows");
  if (static_cast<int>(v.size()) != rows)
    throw ValidationError(path + ": expected " + std::to_string(rows) + " rows, got " +
                          std::to_string(v.size()));
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json &row = v[r];
    const std::string rpath = path + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ValidationError(rpath + ": expected a row of " + std::to_string(cols) +
                            " entries");
    for (int c = 0; c < cols; ++c)
      m(r, c) = parse_complex(row[c], rpath + "[" + std::to_string(c) + "]");
  }
  return m;
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json matrix_to_json(const Matrix &m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace detail

/// Parses a parameter document; errors name the offending field or the
/// line and column of a syntax error.
inline ParamFile parse_param_file(std::istream &in, const std::string &source = "<input>") {
  using detail::json;
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ValidationError(source + ": " + e.what());
  }
  if (!doc.is_object())
    throw ValidationError(source + ": top level must be an object");

  const auto field = [&](const char *key) -> const json & {
    if (!doc.contains(key))
      throw ValidationError(source + ": missing field '" + key + "'");
    return doc[key];
  };

  const json &eta = field("eta");
  if (!eta.is_number())
    throw ValidationError(source + ": eta: expected a real number");

  const json &blocks = field("blocks");
  if (!blocks.is_array() || blocks.empty())
    throw ValidationError(source + ": blocks: expected a nonempty list of integers");
  std::vector<int> sizes;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (!blocks[i].is_number_integer() || blocks[i].get<int>() < 1)
      throw ValidationError(source + ": blocks[" + std::to_string(i) +
                            "]: expected a positive integer");
    sizes.push_back(blocks[i].get<int>());
  }
  const BlockType type(sizes);

  std::vector<Matrix> y;
  const json empty = json::array();
  const json &yj = doc.contains("Y") ? doc["Y"] : empty;
  if (!doc.contains("Y") && type.top() > 0)
    throw ValidationError(source + ": missing field 'Y'");
  if (!yj.is_array() || static_cast<int>(yj.size()) != type.top())
    throw ValidationError(source + ": Y: expected " + std::to_string(type.top()) +
                          " blocks for " + std::to_string(type.levels()) + " levels");
  for (int j = 1; j <= type.top(); ++j)
    y.push_back(detail::parse_matrix(yj[j - 1], type.size(j), type.size(j - 1),
                                     source + ": Y[" + std::to_string(j - 1) + "]"));

  ParamFile pf;
  pf.params = validate(eta.get<double>(), type, std::move(y));

  if (doc.contains("N")) {
    const json &nj = doc["N"];
    if (!nj.is_array() || static_cast<int>(nj.size()) != type.levels())
      throw ValidationError(source + ": N: expected " + std::to_string(type.levels()) +
                            " blocks");
    std::vector<Matrix> nb;
    for (int j = 0; j < type.levels(); ++j)
      nb.push_back(detail::parse_matrix(nj[j], type.size(j), type.size(j),
                                        source + ": N[" + std::to_string(j) + "]"));
    pf.normalization = BlockDiagonal(type, std::move(nb));
  }
  if (doc.contains("truncation")) {
    if (!doc["truncation"].is_number_integer() || doc["truncation"].get<int>() < 1)
      throw ValidationError(source + ": truncation: expected a positive integer");
    pf.truncation = doc["truncation"].get<int>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned())
      throw ValidationError(source + ": seed: expected a nonnegative integer");
    pf.seed = doc["seed"].get<std::uint64_t>();
  }
  return pf;
}

inline ParamFile load_param_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ValidationError(path + ": cannot open file");
  return parse_param_file(in, path);
}

inline std::string to_json(const ParamFile &pf) {
  using detail::json;
  json doc;
  doc["eta"] = pf.params.eta;
  doc["blocks"] = pf.params.type().sizes();
  json y = json::array();
  for (const Matrix &b : pf.params.y.blocks())
    y.push_back(detail::matrix_to_json(b));
  doc["Y"] = std::move(y);
  if (pf.normalization) {
    json n = json::array();
    for (const Matrix &b : pf.normalization->blocks())
      n.push_back(detail::matrix_to_json(b));
    doc["N"] = std::move(n);
  }
  doc["truncation"] = pf.truncation;
  doc["seed"] = pf.seed;
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Header "p,q,row,col,re,im", one line per coefficient entry.
inline void write_kernel_csv(std::ostream &out, const TwoVariableSeries &s) {
  out << "p,q,row,col,re,im\n";
  for (int p = 0; p <= s.degree(); ++p)
    for (int q = 0; q <= s.degree(); ++q)
      for (int r = 0; r < s.dim(); ++r)
        for (int c = 0; c < s.dim(); ++c) {
          const cplx v = s(p, q)(r, c);
          out << p << ',' << q << ',' << r << ',' << c << ',' << format_double(v.real())
              << ',' << format_double(v.imag()) << '\n';
        }
}

inline TwoVariableSeries read_kernel_csv(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) || line != "p,q,row,col,re,im")
    throw ValidationError("kernel csv: missing header");
  struct Entry {
    int p, q, r, c;
    double re, im;
  };
  std::vector<Entry> entries;
  int max_deg = -1, max_dim = -1;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty())
      continue;
    Entry e{};
    std::istringstream ls(line);
    char c1, c2, c3, c4;
    if (!(ls >> e.p >> c1 >> e.q >> c2 >> e.r >> c3 >> e.c >> c4) || c1 != ',' ||
        c2 != ',' || c3 != ',' || c4 != ',')
      throw ValidationError("kernel csv: malformed line " + std::to_string(lineno));
    std::string rest;
    std::getline(ls, rest);
    const auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw ValidationError("kernel csv: malformed line " + std::to_string(lineno));
    try {
      e.re = std::stod(rest.substr(0, comma));
      e.im = std::stod(rest.substr(comma + 1));
    } catch (const std::exception &) {
      throw ValidationError("kernel csv: bad number on line " + std::to_string(lineno));
    }
    max_deg = std::max({max_deg, e.p, e.q});
    max_dim = std::max({max_dim, e.r, e.c});
    entries.push_back(e);
  }
  if (entries.empty())
    throw ValidationError("kernel csv: no entries");
  TwoVariableSeries s(max_deg, max_dim + 1);
  for (const Entry &e : entries)
    s(e.p, e.q)(e.r, e.c) = cplx(e.re, e.im);
  return s;
}

/// Header "row,col,re,im".
inline void write_matrix_csv(std::ostream &out, const Matrix &m) {
  out << "row,col,re,im\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out << r << ',' << c << ',' << format_double(m(r, c).real()) << ','
          << format_double(m(r, c).imag()) << '\n';
}

} // namespace homcd
