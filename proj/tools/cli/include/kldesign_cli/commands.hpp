#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "kldesign/types.hpp"

namespace kld::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitMaxIterations = 2;
inline constexpr int kExitStalled = 3;
inline constexpr int kExitRejected = 4;
inline constexpr int kExitSingular = 5;
inline constexpr int kExitBenchmarkFailed = 6;

/// Flags shared by every subcommand; unset fields leave the config alone.
struct GlobalOptions {
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
};

/// Writes result.json, iterations.csv and final_design.json.
/// Exit 0 efficiency reached, 2 iteration budget exhausted, 3 stalled
/// (including a regularized continuation), 1 on configuration errors.
int cmd_run(const std::string& config_path, const GlobalOptions& options, std::ostream& out, std::ostream& err);

/// Writes certificate.json and psi_curve.csv for a design given in the run
/// coordinates (the format written by cmd_run). Exit 0 certified, 4 rejected,
/// 5 singular without regularization, 1 on input errors.
int cmd_verify(const std::string& config_path, const std::string& design_path, const GlobalOptions& options,
               std::ostream& out, std::ostream& err);

/// Writes transformed_design.json; exit 1 for a singular matrix or bad input.
int cmd_transform(const std::string& design_path, const Vector& offset, const Matrix& matrix,
                  const GlobalOptions& options, std::ostream& out, std::ostream& err);

/// Runs the acceptance criteria and prints a pass/fail table; exit 0 iff all pass, 6 otherwise.
/// tolerance_scale multiplies every acceptance tolerance (test hook).
int cmd_benchmark(bool list_only, double tolerance_scale, const GlobalOptions& options, std::ostream& out,
                  std::ostream& err);

/// "2" -> [2]; "1,0.5" -> [1, 0.5].
Vector parse_vector_arg(const std::string& text);
/// Rows separated by ';', entries by ','; "4" -> [[4]].
Matrix parse_matrix_arg(const std::string& text);

std::string utc_timestamp();

}  // namespace kld::cli
