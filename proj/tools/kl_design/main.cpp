#include <iostream>
#include <limits>
#include <string>

#include <CLI11.hpp>

#include "kldesign_cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace kld::cli;
  CLI::App app{"KL-optimum designs for discriminating two rival models"};
  app.require_subcommand(1);
  app.fallthrough();

  int threads = 0;
  std::uint64_t seed = 0;
  std::string output_dir;
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads (default: all cores)")
                          ->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
  auto* out_opt = app.add_option("--output-dir", output_dir, "Directory for output files");

  std::string config_path;
  std::string design_path;
  std::string offset_text;
  std::string matrix_text;
  bool list_only = false;
  double tolerance_scale = 1.0;

  auto* run = app.add_subcommand("run", "Run the exchange algorithm from a config file");
  run->add_option("config", config_path)->required();

  auto* verify = app.add_subcommand("verify", "Check a design against the equivalence theorem");
  verify->add_option("config", config_path)->required();
  verify->add_option("design", design_path)->required();

  auto* transform = app.add_subcommand("transform", "Push a design through z = offset + matrix * x");
  transform->add_option("design", design_path)->required();
  transform->add_option("--offset", offset_text, "Comma-separated offset, e.g. 2")->required();
  transform->add_option("--matrix", matrix_text, "Rows separated by ';', entries by ',', e.g. 4")->required();

  auto* bench = app.add_subcommand("benchmark", "Run the built-in acceptance checks");
  bench->add_flag("--list", list_only, "List the checks without running them");
  bench->add_option("--tolerance-scale", tolerance_scale)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfigError;
  }

  GlobalOptions options;
  if (*threads_opt) options.threads = threads;
  if (*seed_opt) options.seed = seed;
  if (*out_opt) options.output_dir = output_dir;

  if (*run) return cmd_run(config_path, options, std::cout, std::cerr);
  if (*verify) return cmd_verify(config_path, design_path, options, std::cout, std::cerr);
  if (*transform) {
    kld::Vector offset;
    kld::Matrix matrix;
    try {
      offset = parse_vector_arg(offset_text);
      matrix = parse_matrix_arg(matrix_text);
    } catch (const std::exception& e) {
      std::cerr << "error: --offset/--matrix: " << e.what() << "\n";
      return kExitConfigError;
    }
    return cmd_transform(design_path, offset, matrix, options, std::cout, std::cerr);
  }
  return cmd_benchmark(list_only, tolerance_scale, options, std::cout, std::cerr);
}
