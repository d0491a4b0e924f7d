#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "levelset/consistency.hpp"
#include "levelset/error.hpp"
#include "levelset/io.hpp"
#include "levelset/parallel.hpp"

namespace lsq::cli {

using nlohmann::json;

// Stable process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitProtocol = 4;

int exit_code(ErrorCode code);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::filesystem::path base_dir = ".";  // relative paths in the config resolve here
  int jobs = 0;                          // 0: runtime default, 1: serial

  Execution execution() const { return jobs == 1 ? Execution::Serial : Execution::Parallel; }
};

// Each command validates `config` against its schema, writes its files into
// out_dir and returns a short summary. Errors propagate as lsq::Error.
json cmd_gaussian_demo(const json& config, const RunOptions& opts);
json cmd_probe(const json& config, const RunOptions& opts);
json cmd_audit(const json& config, const RunOptions& opts);
json cmd_train(const json& config, const RunOptions& opts);

// Default Z bin edges of the audit report.
std::vector<double> default_bin_edges();

// Index of the bin holding z; edges.size() - 1 is the remainder bin.
std::size_t z_bin(double z, const std::vector<double>& edges);

// Roll-up of one audited set: counts, Z histogram, straddles and per-bin accuracy.
json audit_rollup(const std::string& name, const std::vector<io::IntervalRecord>& records,
                  const std::vector<FeasibleSet>& sets, const std::vector<double>& edges);

// Full command line; returns the exit code. Diagnostics go to stderr.
int run(int argc, char** argv);

}  // namespace lsq::cli
