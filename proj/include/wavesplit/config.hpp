#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wavesplit/medium.hpp"

namespace wavesplit {

/// Loads a medium config file (JSON): constant matrices or named analytic
/// profiles per tensor, SI/normalized units flag, sample lattice.
/// Throws ConfigError on malformed input.
MediumSpec load_medium(const std::string& path);

/// Parses "a", "a+bi", "a-bi" (also accepts 'j' and 'i' suffix forms).
Complex parse_complex(const std::string& text);

/// Batch run configuration for the `run` pipeline.
struct RunConfig {
  std::string medium_path;
  int nx1 = 32, nx2 = 32;
  double L1 = 1.0, L2 = 1.0;
  std::vector<Complex> s_list;
  double S_R = 0.0;  // 0 -> per-s default 0.9 Re s
  std::string method = "sign";
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::vector<std::string> stages;
  // stage knobs
  std::int64_t strip_samples = 2000;
  double depth = 0.1;
  bool allow_growth = false;
  std::string field_dump;        // optional input field for propagate
  std::string field_preset = "gaussian";
  double lambda_re = 0.0, lambda_im = 0.0;  // symbol-dump lambda

  std::string raw_json;  // canonical serialization, feeds the stage hashes
};

RunConfig load_run_config(const std::string& path);

LaplaceParameter laplace_for(const RunConfig& cfg, Complex s);

}  // namespace wavesplit
