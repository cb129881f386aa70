#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "kldesign/design.hpp"
#include "kldesign/outer.hpp"
#include "kldesign/verify.hpp"

namespace kld::io {

/// {"space": {"lower": [..], "upper": [..]}, "points": [[..], ..], "weights": [..]}
nlohmann::json design_to_json(const Design& design);
/// Parses the schema above; shape errors raise DomainError naming the field.
/// The result is not validated.
Design design_from_json(const nlohmann::json& j);

Design read_design(const std::string& path);
void write_design(const std::string& path, const Design& design);

nlohmann::json vector_to_json(const Vector& v);

/// RunResult without the per-iteration designs; `timestamp` is the only
/// field that varies between identical runs.
nlohmann::json run_result_to_json(const RunResult& result, const std::string& timestamp);

/// Header "n,value,psi_max,alpha,U,support_size", one row per record, %.17g.
std::string iterations_csv(const RunResult& result);

nlohmann::json certificate_to_json(const EquivalenceReport& report);

/// Columns x1..xq then psi, grid curve followed by the support points.
std::string psi_curve_csv(const EquivalenceReport& report, const Design& design);

std::string format_double(double v);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace kld::io
