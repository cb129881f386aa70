#include "kldesign_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "kldesign/io.hpp"

namespace kld::cli {
namespace {

class Reader {
 public:
  explicit Reader(std::string path) : path_(std::move(path)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& field, const std::string& msg) const {
    std::ostringstream os;
    os << path_;
    if (at.IsDefined() && at.Mark().line >= 0) os << ':' << at.Mark().line + 1;
    os << ": field '" << field << "': " << msg;
    throw ConfigError(os.str());
  }

  YAML::Node child(const YAML::Node& parent, const std::string& key, const std::string& field, bool required) const {
    if (!parent.IsMap()) fail(parent, field, "expected a mapping");
    YAML::Node n = parent[key];
    if (required && !n.IsDefined()) fail(parent, field, "missing");
    return n;
  }

  double number(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected a number");
    double v = 0.0;
    try {
      v = n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, field, "'" + n.Scalar() + "' is not a number");
    }
    if (!std::isfinite(v)) fail(n, field, "must be finite");
    return v;
  }

  double number_or(const YAML::Node& parent, const std::string& key, const std::string& prefix, double def) const {
    const YAML::Node n = child(parent, key, prefix + key, false);
    return n.IsDefined() ? number(n, prefix + key) : def;
  }

  long long integer(const YAML::Node& n, const std::string& field) const {
    const double v = number(n, field);
    if (v != std::floor(v)) fail(n, field, "expected an integer");
    return static_cast<long long>(v);
  }

  int int_or(const YAML::Node& parent, const std::string& key, const std::string& prefix, int def) const {
    const YAML::Node n = child(parent, key, prefix + key, false);
    return n.IsDefined() ? static_cast<int>(integer(n, prefix + key)) : def;
  }

  std::string text(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected a string");
    return n.Scalar();
  }

  Vector vector(const YAML::Node& n, const std::string& field) const {
    if (!n.IsSequence()) fail(n, field, "expected a list of numbers");
    Vector v(static_cast<Eigen::Index>(n.size()));
    for (std::size_t i = 0; i < n.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) = number(n[i], field + "[" + std::to_string(i) + "]");
    }
    return v;
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Predictor given either as dense univariate coefficients [c0, c1, ...] or as
// a list of terms {exponents: [...], coefficient: c}.
Polynomial read_polynomial(const Reader& r, const YAML::Node& n, const std::string& field, int q) {
  if (!n.IsSequence() || n.size() == 0) r.fail(n, field, "expected a non-empty list");
  if (n[0].IsScalar()) {
    if (q != 1) r.fail(n, field, "dense coefficient lists are only allowed when the space is one-dimensional");
    const Vector c = r.vector(n, field);
    return Polynomial::univariate(std::span<const double>(c.data(), static_cast<std::size_t>(c.size())));
  }
  std::vector<Monomial> terms;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    const YAML::Node e = r.child(n[i], "exponents", f + ".exponents", true);
    Monomial m;
    if (!e.IsSequence()) r.fail(e, f + ".exponents", "expected a list of integers");
    for (std::size_t k = 0; k < e.size(); ++k) m.exponents.push_back(static_cast<int>(r.integer(e[k], f + ".exponents")));
    m.coefficient = r.number(r.child(n[i], "coefficient", f + ".coefficient", true), f + ".coefficient");
    if (static_cast<int>(m.exponents.size()) != q) r.fail(e, f + ".exponents", "needs one exponent per coordinate");
    terms.push_back(std::move(m));
  }
  return Polynomial(q, std::move(terms));
}

std::vector<Polynomial> read_basis(const Reader& r, const YAML::Node& n, const std::string& field, int q) {
  if (!n.IsSequence() || n.size() == 0) r.fail(n, field, "expected a non-empty list of exponents");
  std::vector<Polynomial> basis;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    std::vector<int> exps;
    if (n[i].IsScalar()) {
      exps.push_back(static_cast<int>(r.integer(n[i], f)));
    } else if (n[i].IsSequence()) {
      for (std::size_t k = 0; k < n[i].size(); ++k) exps.push_back(static_cast<int>(r.integer(n[i][k], f)));
    } else {
      r.fail(n[i], f, "expected an exponent or a list of exponents");
    }
    if (static_cast<int>(exps.size()) != q) r.fail(n[i], f, "needs one exponent per coordinate");
    if (std::any_of(exps.begin(), exps.end(), [](int e) { return e < 0; })) r.fail(n[i], f, "negative exponent");
    basis.push_back(Polynomial::monomial(std::move(exps)));
  }
  return basis;
}

Design read_inline_design(const Reader& r, const YAML::Node& n, const std::string& field, const DesignSpace& space,
                          const std::filesystem::path& base) {
  if (!n.IsMap()) r.fail(n, field, "expected a mapping with points/weights or file");
  Design d;
  if (n["file"].IsDefined()) {
    const std::filesystem::path file = base / r.text(n["file"], field + ".file");
    if (!std::filesystem::exists(file)) r.fail(n["file"], field + ".file", "file '" + file.string() + "' does not exist");
    try {
      d = io::read_design(file.string());
    } catch (const std::exception& e) {
      r.fail(n["file"], field + ".file", e.what());
    }
    d.space = space;
  } else {
    const YAML::Node pts = r.child(n, "points", field + ".points", true);
    if (!pts.IsSequence()) r.fail(pts, field + ".points", "expected a list");
    d.space = space;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string f = field + ".points[" + std::to_string(i) + "]";
      d.points.push_back(pts[i].IsScalar() ? Vector::Constant(1, r.number(pts[i], f)) : r.vector(pts[i], f));
    }
    const YAML::Node w = r.child(n, "weights", field + ".weights", true);
    const Vector wv = r.vector(w, field + ".weights");
    d.weights.assign(wv.data(), wv.data() + wv.size());
  }
  const ValidationReport report = validate_design(d);
  if (!report.ok()) {
    std::string msg;
    for (const auto& v : report.violations) msg += (msg.empty() ? "" : "; ") + v;
    const bool weights = msg.find("weight") != std::string::npos;
    const std::string key = n["file"].IsDefined() ? "file" : (weights ? "weights" : "points");
    r.fail(n[key], field + "." + key, msg);
  }
  return d;
}

}  // namespace

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  algo.seed = s;
  inner.seed = s;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str(), path);
}

RunConfig parse_config(const std::string& text, const std::string& path) {
  const Reader r(path);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(path + ":" + std::to_string(e.mark.line + 1) + ": parse error: " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError(path + ": top level must be a mapping");
  const std::filesystem::path base = std::filesystem::path(path).parent_path();

  // space
  const YAML::Node sn = r.child(root, "space", "space", true);
  DesignSpace space{r.vector(r.child(sn, "lower", "space.lower", true), "space.lower"),
                    r.vector(r.child(sn, "upper", "space.upper", true), "space.upper")};
  try {
    space.check();
  } catch (const DomainError& e) {
    r.fail(sn, "space", e.what());
  }
  const int q = space.dim();

  // model
  const YAML::Node mn = r.child(root, "model", "model", true);
  const std::string kind_tag = r.text(r.child(mn, "kind", "model.kind", true), "model.kind");
  DivergenceKind kind{};
  try {
    kind = divergence_kind_from_string(kind_tag);
  } catch (const std::exception& e) {
    r.fail(mn["kind"], "model.kind", e.what());
  }
  const YAML::Node bn = r.child(mn, "param_box", "model.param_box", true);
  const ParamBox box{r.vector(r.child(bn, "lower", "model.param_box.lower", true), "model.param_box.lower"),
                     r.vector(r.child(bn, "upper", "model.param_box.upper", true), "model.param_box.upper")};
  std::optional<ModelPair> pair;
  try {
    if (kind == DivergenceKind::kSyntheticFamily) {
      pair = ModelPair::synthetic_family(box);
      if (q != 1) r.fail(sn, "space", "the synthetic family lives on [0, 1]");
    } else {
      const Polynomial truth = read_polynomial(r, r.child(mn, "true_predictor", "model.true_predictor", true),
                                               "model.true_predictor", q);
      std::vector<Polynomial> basis =
          read_basis(r, r.child(mn, "rival_basis", "model.rival_basis", true), "model.rival_basis", q);
      if (kind == DivergenceKind::kGaussianRegression) {
        pair = ModelPair::gaussian_regression(truth, std::move(basis), r.number_or(mn, "sigma2", "model.", 0.5), box);
      } else {
        pair = ModelPair::logistic_glm(truth, std::move(basis), box);
      }
    }
  } catch (const DomainError& e) {
    r.fail(mn, "model", e.what());
  }

  Design initial = read_inline_design(r, r.child(root, "initial_design", "initial_design", true), "initial_design",
                                      space, base);

  AlgoConfig algo;
  if (const YAML::Node an = root["algorithm"]; an.IsDefined()) {
    const std::string p = "algorithm.";
    algo.delta = r.number_or(an, "delta", p, algo.delta);
    algo.max_iterations = r.int_or(an, "max_iterations", p, algo.max_iterations);
    algo.grid_points_per_dim = r.int_or(an, "grid_points_per_dim", p, algo.grid_points_per_dim);
    algo.line_search_tolerance = r.number_or(an, "line_search_tolerance", p, algo.line_search_tolerance);
    if (an["collapse_radius_base"].IsDefined()) {
      algo.collapse_radius_base = r.number(an["collapse_radius_base"], p + "collapse_radius_base");
    }
    algo.collapse_radius_exponent = r.number_or(an, "collapse_radius_exponent", p, algo.collapse_radius_exponent);
    algo.anchor_weight_exponent = r.number_or(an, "anchor_weight_exponent", p, algo.anchor_weight_exponent);
    algo.prune_abs = r.number_or(an, "prune_abs", p, algo.prune_abs);
    algo.prune_rel = r.number_or(an, "prune_rel", p, algo.prune_rel);
    if (an["allow_regularization"].IsDefined()) {
      try {
        algo.allow_regularization = an["allow_regularization"].as<bool>();
      } catch (const YAML::Exception&) {
        r.fail(an["allow_regularization"], p + "allow_regularization", "expected true or false");
      }
    }
    try {
      algo.check();
    } catch (const DomainError& e) {
      r.fail(an, "algorithm", e.what());
    }
  }

  InnerConfig inner;
  if (const YAML::Node in = root["inner"]; in.IsDefined()) {
    const std::string p = "inner.";
    inner.multistart_count = r.int_or(in, "multistart_count", p, inner.multistart_count);
    inner.tolerance = r.number_or(in, "tolerance", p, inner.tolerance);
    inner.max_local_iterations = r.int_or(in, "max_local_iterations", p, inner.max_local_iterations);
    inner.warm_start_noise_scale = r.number_or(in, "warm_start_noise_scale", p, inner.warm_start_noise_scale);
    if (in["dispersion_threshold"].IsDefined()) {
      inner.dispersion_threshold = r.number(in["dispersion_threshold"], p + "dispersion_threshold");
    }
    try {
      inner.check();
    } catch (const DomainError& e) {
      r.fail(in, "inner", e.what());
    }
  }

  std::optional<RegularizationConfig> reg;
  if (const YAML::Node rn = root["regularization"]; rn.IsDefined()) {
    const double gamma = r.number_or(rn, "gamma", "regularization.", 0.05);
    try {
      if (rn["reference_design"].IsDefined()) {
        reg = RegularizationConfig{gamma, read_inline_design(r, rn["reference_design"],
                                                             "regularization.reference_design", space, base)};
        reg->check(*pair);
      } else {
        reg = RegularizationConfig::with_default_reference(*pair, space, gamma);
      }
    } catch (const DomainError& e) {
      r.fail(rn, "regularization", e.what());
    }
  }

  std::optional<AffineMap> transform;
  if (const YAML::Node tn = root["transform"]; tn.IsDefined()) {
    const Vector offset = r.vector(r.child(tn, "offset", "transform.offset", true), "transform.offset");
    const YAML::Node mm = r.child(tn, "matrix", "transform.matrix", true);
    if (!mm.IsSequence()) r.fail(mm, "transform.matrix", "expected a list of rows");
    Matrix B(static_cast<Eigen::Index>(mm.size()), offset.size());
    for (std::size_t i = 0; i < mm.size(); ++i) {
      const Vector row = r.vector(mm[i], "transform.matrix[" + std::to_string(i) + "]");
      if (row.size() != offset.size()) r.fail(mm[i], "transform.matrix", "rows must have q entries");
      B.row(static_cast<Eigen::Index>(i)) = row;
    }
    try {
      transform.emplace(offset, B);
      if (transform->dim() != q) r.fail(tn, "transform", "dimension must match the design space");
    } catch (const DomainError& e) {
      r.fail(tn, "transform", e.what());
    }
  }

  bool from_start = false;
  if (reg && root["regularization"]["from_start"].IsDefined()) {
    try {
      from_start = root["regularization"]["from_start"].as<bool>();
    } catch (const YAML::Exception&) {
      r.fail(root["regularization"]["from_start"], "regularization.from_start", "expected true or false");
    }
  }
  RunConfig cfg{path, *pair, space, initial, algo, inner, reg, from_start, transform};
  if (const YAML::Node vn = root["verify"]; vn.IsDefined()) {
    cfg.verify_grid = r.int_or(vn, "grid_points_per_dim", "verify.", 0);
    if (cfg.verify_grid != 0 && cfg.verify_grid < 2) r.fail(vn, "verify.grid_points_per_dim", "must be >= 2");
  }
  if (root["output_dir"].IsDefined()) cfg.output_dir = r.text(root["output_dir"], "output_dir");
  if (root["seed"].IsDefined()) {
    const long long s = r.integer(root["seed"], "seed");
    if (s < 0) r.fail(root["seed"], "seed", "must be non-negative");
    cfg.set_seed(static_cast<std::uint64_t>(s));
  } else {
    cfg.set_seed(1);
  }

  if (transform) {
    try {
      cfg.pair = reparametrize_under_affine(cfg.pair, *transform);
    } catch (const std::exception& e) {
      r.fail(root["transform"], "transform", e.what());
    }
    cfg.space = transform->image(space);
    cfg.initial_design = transform_design(initial, *transform);
    if (cfg.regularization) cfg.regularization->reference = transform_design(cfg.regularization->reference, *transform);
  }
  if (cfg.regularization) cfg.algo.regularization = cfg.regularization;
  if (cfg.verify_grid == 0) cfg.verify_grid = q == 1 ? 2001 : 201;
  return cfg;
}

}  // namespace kld::cli
