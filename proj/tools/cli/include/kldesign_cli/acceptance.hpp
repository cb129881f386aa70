#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace kld::cli {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Multiplies every tolerance; anything other than 1 is a test hook.
  double tolerance_scale = 1.0;
  /// Scratch directory for configs, CSV curves and CLI outputs.
  std::filesystem::path work_dir = std::filesystem::temp_directory_path() / "kldesign-acceptance";
};

/// Short names of the eight criteria, index 0 is criterion 1.
const std::vector<std::string>& acceptance_criteria();

/// Runs the end-to-end checks. Expensive runs are computed once and shared
/// between criteria.
class AcceptanceSuite {
 public:
  explicit AcceptanceSuite(AcceptanceOptions options = {});
  ~AcceptanceSuite();

  CriterionResult run(int id);
  std::vector<CriterionResult> run_all(const std::function<void(const CriterionResult&)>& on_result = {});

  const AcceptanceOptions& options() const { return options_; }

 private:
  struct Cache;
  AcceptanceOptions options_;
  std::unique_ptr<Cache> cache_;
};

/// "[PASS] 1 chebyshev-optimum (3.9 s): detail"
std::string format_result_line(const CriterionResult& r);

}  // namespace kld::cli
