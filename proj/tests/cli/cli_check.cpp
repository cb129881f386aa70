// Small assertion helper for the command-line tests.
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "kldesign/design.hpp"
#include "kldesign/io.hpp"

namespace {

nlohmann::json load(const std::string& path) { return nlohmann::json::parse(kld::io::read_text(path)); }

int fail(const std::string& msg) {
  std::cerr << "cli_check: " << msg << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) return fail("usage: cli_check <mode> ...");
  const std::string mode = argv[1];
  try {
    if (mode == "wasserstein" && argc == 5) {
      const kld::Design a = kld::io::read_design(argv[2]);
      kld::Design b = kld::io::read_design(argv[3]);
      b.space = a.space;
      const double w = kld::wasserstein_distance(a, b);
      std::cout << "wasserstein " << w << "\n";
      return w <= std::stod(argv[4]) ? 0 : fail("distance too large");
    }
    if (mode == "json-close" && argc == 7) {
      const double a = load(argv[2])[std::string(argv[3])].get<double>();
      const double b = load(argv[4])[std::string(argv[5])].get<double>();
      std::cout << a << " vs " << b << "\n";
      return std::abs(a - b) <= std::stod(argv[6]) ? 0 : fail("values differ");
    }
    if (mode == "csv-max" && argc == 4) {
      std::ifstream in(argv[2]);
      std::string line;
      std::getline(in, line);
      double worst = -INFINITY;
      int rows = 0;
      while (std::getline(in, line)) {
        worst = std::max(worst, std::stod(line.substr(line.rfind(',') + 1)));
        ++rows;
      }
      std::cout << rows << " rows, max " << worst << "\n";
      return rows > 0 && worst <= std::stod(argv[3]) ? 0 : fail("column exceeds the bound");
    }
    if (mode == "same-json" && argc == 5) {
      auto a = load(argv[2]);
      auto b = load(argv[3]);
      a.erase(std::string(argv[4]));
      b.erase(std::string(argv[4]));
      return a == b ? 0 : fail("documents differ");
    }
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return fail("bad arguments for " + mode);
}
