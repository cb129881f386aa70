#include "kldesign/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace kld::io {
namespace {

Vector vector_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array()) throw DomainError("design json: '" + field + "' must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw DomainError("design json: '" + field + "' must contain only numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json vector_to_json(const Vector& v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

nlohmann::json design_to_json(const Design& design) {
  nlohmann::json j;
  j["space"] = {{"lower", vector_to_json(design.space.lower)}, {"upper", vector_to_json(design.space.upper)}};
  j["points"] = nlohmann::json::array();
  for (const Vector& x : design.points) j["points"].push_back(vector_to_json(x));
  j["weights"] = design.weights;
  return j;
}

Design design_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DomainError("design json: expected an object");
  for (const char* key : {"space", "points", "weights"}) {
    if (!j.contains(key)) throw DomainError(std::string("design json: missing field '") + key + "'");
  }
  const auto& space = j.at("space");
  if (!space.is_object() || !space.contains("lower") || !space.contains("upper")) {
    throw DomainError("design json: 'space' needs 'lower' and 'upper'");
  }
  Design d;
  d.space.lower = vector_from_json(space.at("lower"), "space.lower");
  d.space.upper = vector_from_json(space.at("upper"), "space.upper");
  if (!j.at("points").is_array()) throw DomainError("design json: 'points' must be an array");
  for (std::size_t i = 0; i < j.at("points").size(); ++i) {
    const auto& p = j.at("points")[i];
    // bare numbers are accepted for one-dimensional designs
    d.points.push_back(p.is_number() ? Vector::Constant(1, p.get<double>())
                                     : vector_from_json(p, "points[" + std::to_string(i) + "]"));
  }
  const Vector w = vector_from_json(j.at("weights"), "weights");
  d.weights.assign(w.data(), w.data() + w.size());
  return d;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out << text;
}

Design read_design(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError("design file '" + path + "': " + e.what());
  }
  return design_from_json(j);
}

void write_design(const std::string& path, const Design& design) {
  write_text(path, design_to_json(design).dump(2) + "\n");
}

nlohmann::json run_result_to_json(const RunResult& result, const std::string& timestamp) {
  nlohmann::json j;
  j["termination"] = to_string(result.termination);
  j["final_design"] = design_to_json(result.final_design);
  j["final_beta2"] = vector_to_json(result.final_beta2);
  j["final_value"] = result.final_value;
  j["final_unregularized_value"] = result.final_unregularized_value;
  j["final_efficiency"] = result.final_efficiency;
  j["iterations"] = result.history.size();
  j["regularized"] = result.regularized;
  if (result.regularized) j["gamma"] = result.gamma;
  j["handoff_iteration"] = result.handoff_iteration;
  j["diagnostics"] = result.diagnostics;
  auto history = nlohmann::json::array();
  for (const IterationRecord& r : result.history) {
    history.push_back({{"n", r.n},
                       {"value", r.value},
                       {"psi_max", r.psi_max},
                       {"alpha", r.alpha},
                       {"efficiency", r.efficiency},
                       {"support_size", r.design.size()},
                       {"best_point", vector_to_json(r.best_point)},
                       {"beta2_hat", vector_to_json(r.beta2_hat)},
                       {"singular_flag", r.singular_flag},
                       {"regularized", r.regularized}});
  }
  j["history"] = std::move(history);
  j["timestamp"] = timestamp;
  return j;
}

std::string iterations_csv(const RunResult& result) {
  std::ostringstream os;
  os << "n,value,psi_max,alpha,U,support_size\n";
  for (const IterationRecord& r : result.history) {
    os << r.n << ',' << format_double(r.value) << ',' << format_double(r.psi_max) << ',' << format_double(r.alpha)
       << ',' << format_double(r.efficiency) << ',' << r.design.size() << '\n';
  }
  return os.str();
}

nlohmann::json certificate_to_json(const EquivalenceReport& report) {
  nlohmann::json j;
  j["verdict"] = to_string(report.verdict);
  j["grid_points_per_dim"] = report.grid_points_per_dim;
  j["criterion_value"] = report.criterion_value;
  j["beta2_hat"] = vector_to_json(report.beta2_hat);
  j["psi_max"] = report.psi_max;
  j["psi_argmax"] = vector_to_json(report.psi_argmax);
  j["pass_tolerance"] = report.pass_tolerance;
  j["support_psi"] = report.support_psi;
  auto near = nlohmann::json::array();
  for (const Vector& x : report.near_zero) near.push_back(vector_to_json(x));
  j["near_zero"] = std::move(near);
  j["gamma"] = report.gamma ? nlohmann::json(*report.gamma) : nlohmann::json(nullptr);
  return j;
}

std::string psi_curve_csv(const EquivalenceReport& report, const Design& design) {
  std::ostringstream os;
  const int q = design.dim();
  for (int i = 0; i < q; ++i) os << 'x' << (i + 1) << ',';
  os << "psi\n";
  const auto row = [&](const Vector& x, double psi) {
    for (int i = 0; i < q; ++i) os << format_double(x(i)) << ',';
    os << format_double(psi) << '\n';
  };
  for (const PsiSample& s : report.curve) row(s.x, s.psi);
  for (std::size_t i = 0; i < report.support_psi.size(); ++i) row(design.points[i], report.support_psi[i]);
  return os.str();
}

}  // namespace kld::io
