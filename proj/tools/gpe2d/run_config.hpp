#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gpe2d/minimize.hpp"
#include "gpe2d/segregation.hpp"

namespace gpe2d::cli {

/// Everything one command needs. Text form: `key = value` lines under the
/// section headers [system] [basis] [solver] [excited] [sweep] [output];
/// `#` starts a comment. Every key is optional and defaults as below.
struct RunConfig {
  SystemParams system;
  BasisSpec basis_x;
  BasisSpec basis_y;
  SolverConfig solver;
  InitialGuess excited{{{{1, 0}, {0, 0}}}, true};
  std::vector<double> kappas;
  SweepOptions sweep;
  Grid2D grid;
  std::string out_dir = "out";

  /// Throws InvalidParameter naming the offending key.
  void validate() const;

  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

/// Throws ParseError on malformed lines and InvalidParameter on unknown keys
/// or bad values.
RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::filesystem::path& path);

/// Writes every key; parse_run_config(write_run_config(c)) == c.
std::string write_run_config(const RunConfig& config);

/// "a,b,c" into doubles; throws InvalidParameter(key) on junk.
std::vector<double> parse_double_list(const std::string& text, const std::string& key);

}  // namespace gpe2d::cli
