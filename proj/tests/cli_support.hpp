#pragma once

// Runs the homcd binary and captures stdout+stderr and the exit status.

#include <array>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>
#include <sys/wait.h>

namespace homcd::testing {

struct CommandResult {
  int status = -1;
  std::string output;
};

inline CommandResult run_cli(const std::string &args) {
  const std::string cmd = std::string(HOMCD_CLI_PATH) + " " + args + " 2>&1";
  CommandResult r;
  FILE *pipe = popen(cmd.c_str(), "r");
  if (!pipe)
    return r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
    r.output.append(buf.data(), got);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

inline std::string param_path(const std::string &name) {
  return std::string(HOMCD_PARAMS_DIR) + "/" + name;
}

/// Value following `key` on its line, parsed as a double; NaN if absent.
inline double field_value(const std::string &text, const std::string &key) {
  const auto at = text.find(key);
  if (at == std::string::npos)
    return std::numeric_limits<double>::quiet_NaN();
  try {
    return std::stod(text.substr(at + key.size()));
  } catch (const std::exception &) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

struct VerifyRow {
  std::string name;
  double value = 0.0;
  std::string status;
};

/// Rows of the `verify` table (name, max residual, status).
inline std::vector<VerifyRow> verify_rows(const std::string &text) {
  std::vector<VerifyRow> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    VerifyRow r;
    double tolerance;
    if (ls >> r.name >> r.value >> tolerance >> r.status)
      rows.push_back(r);
  }
  return rows;
}

} // namespace homcd::testing
