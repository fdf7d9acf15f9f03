#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace robust::cli {

enum ExitCode : int { Ok = 0, Internal = 1, Invalid = 2, Finding = 3 };

struct RunConfig {
  std::string command;     // bounds, structure, hedge, btp-check, asian-ct, verify
  std::string subcommand;  // asian-ct: one-marginal, hedge-audit, counterexample, conjecture
  std::vector<std::string> inputs;
  std::string out_dir;  // empty: report on stdout only
  std::string mode = "rational";
  double tol = 1e-9;
  std::uint64_t seed = 0;
  std::size_t grid = 200;

  // structure
  bool figure = false;
  double diag_tol = 0;  // 0: twice the smallest gap between atoms of the last marginal

  // asian-ct
  std::string phi_path;
  std::string strike = "0";
  std::size_t trials = 100;
  bool lp = false;
};

/// Parses argv (CLI11) and runs; returns the process exit code.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs a parsed configuration. Validation problems give 2, falsification
/// findings 3.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace robust::cli
