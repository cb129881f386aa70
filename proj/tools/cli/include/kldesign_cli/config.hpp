#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "kldesign/design.hpp"
#include "kldesign/inner_solver.hpp"
#include "kldesign/models.hpp"
#include "kldesign/outer.hpp"

namespace kld::cli {

/// Configuration problem; the message names the file, line and field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed run configuration (see configs/annotated.yaml for the format).
struct RunConfig {
  std::string path;
  ModelPair pair;
  DesignSpace space;
  Design initial_design;
  AlgoConfig algo;
  InnerConfig inner;
  std::optional<RegularizationConfig> regularization;
  /// Optimize I_gamma from the first iteration instead of only after a handoff.
  bool regularize_from_start = false;
  std::optional<AffineMap> transform;
  int verify_grid = 0;
  std::string output_dir = "kl-design-out";
  std::uint64_t seed = 1;

  /// Propagates a new seed to the algorithm and inner solver.
  void set_seed(std::uint64_t s);
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& path = "<config>");

}  // namespace kld::cli
