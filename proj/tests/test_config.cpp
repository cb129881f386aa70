#include <gtest/gtest.h>

#include <filesystem>

#include "kldesign/io.hpp"
#include "kldesign_cli/commands.hpp"
#include "kldesign_cli/config.hpp"

using namespace kld;
using namespace kld::cli;

namespace {

const char* kChebyshev = R"(seed: 42
output_dir: out
model:
  kind: gaussian-regression
  true_predictor: [0, 0, 0, 1]
  rival_basis: [0, 1, 2]
  sigma2: 0.5
  param_box: {lower: [-5, -5, -5], upper: [5, 5, 5]}
space: {lower: [-1], upper: [1]}
initial_design:
  points: [-1, -0.6, 0.1, 0.8]
  weights: [0.25, 0.25, 0.25, 0.25]
algorithm:
  delta: 0.95
  max_iterations: 300
inner:
  multistart_count: 6
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  if (at != std::string::npos) s.replace(at, from.size(), to);
  return s;
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "cfg.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ParseConfig, ChebyshevConfig) {
  const RunConfig c = parse_config(kChebyshev, "cfg.yaml");
  EXPECT_EQ(c.pair.kind(), DivergenceKind::kGaussianRegression);
  EXPECT_EQ(c.pair.rival_dim(), 3);
  EXPECT_EQ(c.initial_design.size(), 4u);
  EXPECT_DOUBLE_EQ(c.algo.delta, 0.95);
  EXPECT_EQ(c.algo.max_iterations, 300);
  EXPECT_EQ(c.inner.multistart_count, 6);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.algo.seed, 42u);
  EXPECT_EQ(c.inner.seed, 42u);
  EXPECT_EQ(c.output_dir, "out");
  EXPECT_EQ(c.verify_grid, 2001);
  EXPECT_FALSE(c.regularization.has_value());
}

TEST(ParseConfig, SeedOverride) {
  RunConfig c = parse_config(kChebyshev, "cfg.yaml");
  c.set_seed(9);
  EXPECT_EQ(c.algo.seed, 9u);
  EXPECT_EQ(c.inner.seed, 9u);
}

TEST(ParseConfig, WeightSumNamesFieldAndLine) {
  const std::string msg = error_of(replace(kChebyshev, "[0.25, 0.25, 0.25, 0.25]", "[0.25, 0.25, 0.25, 0.15]"));
  EXPECT_NE(msg.find("initial_design.weights"), std::string::npos) << msg;
  EXPECT_NE(msg.find("cfg.yaml:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("0.9"), std::string::npos) << msg;
}

TEST(ParseConfig, BadNumberNamesField) {
  const std::string msg = error_of(replace(kChebyshev, "delta: 0.95", "delta: high"));
  EXPECT_NE(msg.find("algorithm.delta"), std::string::npos) << msg;
  EXPECT_NE(msg.find("cfg.yaml:14"), std::string::npos) << msg;
}

TEST(ParseConfig, OutOfRangeDelta) {
  EXPECT_NE(error_of(replace(kChebyshev, "delta: 0.95", "delta: 1.5")).find("algorithm"), std::string::npos);
}

TEST(ParseConfig, MissingSection) {
  const std::string msg = error_of(replace(kChebyshev, "space: {lower: [-1], upper: [1]}\n", ""));
  EXPECT_NE(msg.find("'space'"), std::string::npos) << msg;
}

TEST(ParseConfig, UnknownKind) {
  EXPECT_NE(error_of(replace(kChebyshev, "gaussian-regression", "poisson")).find("model.kind"), std::string::npos);
}

TEST(ParseConfig, PointOutsideSpace) {
  EXPECT_NE(error_of(replace(kChebyshev, "[-1, -0.6, 0.1, 0.8]", "[-1, -0.6, 0.1, 1.8]")).find("initial_design"),
            std::string::npos);
}

TEST(ParseConfig, SyntaxError) {
  EXPECT_NE(error_of("model: [unclosed\n").find("parse error"), std::string::npos);
}

TEST(ParseConfig, Transform) {
  const RunConfig c = parse_config(std::string(kChebyshev) + "transform: {offset: [2], matrix: [[4]]}\n", "cfg.yaml");
  ASSERT_TRUE(c.transform.has_value());
  EXPECT_DOUBLE_EQ(c.space.lower(0), -2.0);
  EXPECT_DOUBLE_EQ(c.space.upper(0), 6.0);
  EXPECT_DOUBLE_EQ(c.initial_design.points[0](0), -2.0);
  EXPECT_NEAR(c.pair.true_predictor().univariate_coefficients().at(3), 1.0 / 64, 1e-15);
  EXPECT_NE(error_of(std::string(kChebyshev) + "transform: {offset: [2], matrix: [[0]]}\n").find("transform"),
            std::string::npos);
}

TEST(ParseConfig, LogisticWithDefaultReference) {
  const char* text = R"(model:
  kind: logistic-glm
  true_predictor: [1, 1, 1]
  rival_basis: [1, 2]
  param_box: {lower: [-20, -20], upper: [20, 20]}
space: {lower: [0], upper: [1]}
initial_design: {points: [0, 0.5, 1], weights: [0.2, 0.3, 0.5]}
regularization: {gamma: 0.1}
)";
  const RunConfig c = parse_config(text, "l.yaml");
  ASSERT_TRUE(c.regularization.has_value());
  EXPECT_DOUBLE_EQ(c.regularization->gamma, 0.1);
  EXPECT_EQ(c.regularization->reference.size(), 3u);
  ASSERT_TRUE(c.algo.regularization.has_value());
  EXPECT_FALSE(c.regularize_from_start);
}

TEST(ParseConfig, TermListPredictorInTwoDimensions) {
  const char* text = R"(model:
  kind: gaussian-regression
  true_predictor:
    - {exponents: [1, 1], coefficient: 2.0}
  rival_basis: [[0, 0], [1, 0], [0, 1]]
  param_box: {lower: [-5, -5, -5], upper: [5, 5, 5]}
space: {lower: [-1, -1], upper: [1, 1]}
initial_design: {points: [[0, 0], [1, 1], [-1, 1]], weights: [0.4, 0.3, 0.3]}
)";
  const RunConfig c = parse_config(text, "q2.yaml");
  EXPECT_EQ(c.pair.space_dim(), 2);
  EXPECT_EQ(c.verify_grid, 201);
  EXPECT_DOUBLE_EQ(c.pair.true_predictor()((Vector(2) << 0.5, 3).finished()), 3.0);
  EXPECT_NE(error_of(replace(text, "    - {exponents: [1, 1], coefficient: 2.0}", "    [0, 1]"))
                .find("true_predictor"),
            std::string::npos);
}

TEST(ParseConfig, DesignFromFileRelativeToConfig) {
  const auto dir = std::filesystem::temp_directory_path() / "kldesign_cfg_test";
  std::filesystem::create_directories(dir);
  io::write_text((dir / "start.json").string(),
                 R"({"space":{"lower":[-1],"upper":[1]},"points":[[-1],[1]],"weights":[0.5,0.5]})");
  const std::string text = replace(kChebyshev, "  points: [-1, -0.6, 0.1, 0.8]\n  weights: [0.25, 0.25, 0.25, 0.25]",
                                   "  file: start.json");
  io::write_text((dir / "c.yaml").string(), text);
  const RunConfig c = load_config((dir / "c.yaml").string());
  EXPECT_EQ(c.initial_design.size(), 2u);
  const std::string missing = replace(text, "start.json", "nope.json");
  EXPECT_NE(error_of(missing).find("initial_design.file"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(ParseConfig, MissingFile) { EXPECT_THROW(load_config("/nonexistent/cfg.yaml"), ConfigError); }

TEST(CliArgs, VectorsAndMatrices) {
  EXPECT_EQ(parse_vector_arg("2"), Vector::Constant(1, 2.0));
  EXPECT_EQ(parse_vector_arg("1, -0.5").size(), 2);
  const Matrix m = parse_matrix_arg("1,2;3,4");
  EXPECT_EQ(m(1, 0), 3.0);
  EXPECT_THROW(parse_vector_arg("x"), std::invalid_argument);
  EXPECT_THROW(parse_matrix_arg("1,2;3"), std::invalid_argument);
}
