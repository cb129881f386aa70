#include "kldesign_cli/commands.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "kldesign/io.hpp"
#include "kldesign/outer.hpp"
#include "kldesign/parallel.hpp"
#include "kldesign/verify.hpp"
#include "kldesign_cli/acceptance.hpp"
#include "kldesign_cli/config.hpp"

namespace kld::cli {
namespace {

void apply_options(RunConfig& cfg, const GlobalOptions& options) {
  if (options.seed) cfg.set_seed(*options.seed);
  if (options.output_dir) cfg.output_dir = *options.output_dir;
  if (options.threads) set_thread_count(*options.threads);
}

std::filesystem::path prepare_output_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

int exit_code(Termination t) {
  switch (t) {
    case Termination::kEfficiencyReached:
      return kExitOk;
    case Termination::kMaxIterations:
      return kExitMaxIterations;
    case Termination::kStalled:
    case Termination::kStalledRegularized:
      return kExitStalled;
  }
  return kExitStalled;
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Vector parse_vector_arg(const std::string& text) {
  std::vector<double> values;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (token.find_first_not_of(" \t", used) != std::string::npos) {
      throw std::invalid_argument("'" + token + "' is not a number");
    }
    values.push_back(v);
  }
  if (values.empty()) throw std::invalid_argument("empty vector argument");
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Matrix parse_matrix_arg(const std::string& text) {
  std::vector<Vector> rows;
  std::string row;
  std::istringstream in(text);
  while (std::getline(in, row, ';')) rows.push_back(parse_vector_arg(row));
  if (rows.empty()) throw std::invalid_argument("empty matrix argument");
  Matrix m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw std::invalid_argument("matrix rows have different lengths");
    m.row(static_cast<Eigen::Index>(i)) = rows[i];
  }
  return m;
}

int cmd_run(const std::string& config_path, const GlobalOptions& options, std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = load_config(config_path);
    apply_options(cfg, options);
    const RunResult result = cfg.regularize_from_start
                                 ? run_regularized(cfg.pair, cfg.initial_design, cfg.algo, cfg.inner, *cfg.regularization)
                                 : run_first_order(cfg.pair, cfg.initial_design, cfg.algo, cfg.inner);
    const auto dir = prepare_output_dir(cfg.output_dir);
    io::write_text((dir / "result.json").string(), io::run_result_to_json(result, utc_timestamp()).dump(2) + "\n");
    io::write_text((dir / "iterations.csv").string(), io::iterations_csv(result));
    io::write_design((dir / "final_design.json").string(), result.final_design);
    out << "termination: " << to_string(result.termination) << "\n"
        << "iterations: " << result.history.size() - 1 << "\n"
        << "value: " << io::format_double(result.final_value) << "\n"
        << "efficiency: " << io::format_double(result.final_efficiency) << "\n"
        << "support: " << result.final_design.size() << " points\n"
        << "output: " << dir.string() << "\n";
    for (const auto& d : result.diagnostics) err << "note: " << d << "\n";
    return exit_code(result.termination);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int cmd_verify(const std::string& config_path, const std::string& design_path, const GlobalOptions& options,
               std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = load_config(config_path);
    apply_options(cfg, options);
    Design design = io::read_design(design_path);
    design.space = cfg.space;
    const ValidationReport report = validate_design(design);
    if (!report.ok()) {
      for (const auto& v : report.violations) err << "error: " << design_path << ": " << v << "\n";
      return kExitConfigError;
    }
    const EquivalenceReport cert = equivalence_check(cfg.pair, design, cfg.verify_grid, cfg.inner, cfg.regularization);
    const auto dir = prepare_output_dir(cfg.output_dir);
    nlohmann::json j = io::certificate_to_json(cert);
    j["design"] = io::design_to_json(design);
    io::write_text((dir / "certificate.json").string(), j.dump(2) + "\n");
    io::write_text((dir / "psi_curve.csv").string(), io::psi_curve_csv(cert, design));
    out << "verdict: " << to_string(cert.verdict) << "\n"
        << "value: " << io::format_double(cert.criterion_value) << "\n"
        << "psi_max: " << io::format_double(cert.psi_max) << "\n"
        << "tolerance: " << io::format_double(cert.pass_tolerance) << "\n"
        << "output: " << dir.string() << "\n";
    switch (cert.verdict) {
      case Verdict::kCertified:
        return kExitOk;
      case Verdict::kRejected:
        return kExitRejected;
      case Verdict::kSingularNeedsRegularization:
        return kExitSingular;
    }
    return kExitRejected;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int cmd_transform(const std::string& design_path, const Vector& offset, const Matrix& matrix,
                  const GlobalOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const Design design = io::read_design(design_path);
    require_valid(design);
    const AffineMap map(offset, matrix);
    if (map.dim() != design.dim()) throw DomainError("transform dimension does not match the design");
    const Design image = transform_design(design, map);
    const auto dir = prepare_output_dir(options.output_dir.value_or("."));
    const auto path = dir / "transformed_design.json";
    io::write_design(path.string(), image);
    out << io::design_to_json(image).dump(2) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int cmd_benchmark(bool list_only, double tolerance_scale, const GlobalOptions& options, std::ostream& out,
                  std::ostream& err) {
  const auto& names = acceptance_criteria();
  if (list_only) {
    for (std::size_t i = 0; i < names.size(); ++i) out << i + 1 << ' ' << names[i] << "\n";
    return kExitOk;
  }
  if (options.threads) set_thread_count(*options.threads);
  AcceptanceOptions opts;
  opts.tolerance_scale = tolerance_scale;
  if (options.output_dir) opts.work_dir = *options.output_dir;
  try {
    AcceptanceSuite suite(opts);
    int failed = 0;
    suite.run_all([&](const CriterionResult& r) {
      if (!r.passed) ++failed;
      out << format_result_line(r) << std::endl;
    });
    out << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
    return failed == 0 ? kExitOk : kExitBenchmarkFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace kld::cli
