#pragma once

// JSON and CSV forms of the library types.
//
//   function   {"kind":"unit_step","x0":0.5}
//              {"kind":"staircase","alphas":[...]}
//              {"kind":"preset","id":"square"}   (logistic: "steepness", "center")
//   estimator  {"kind":"simple_mc","n":16} | {"kind":"control_variate","n":16}
//              {"kind":"stratified","boundaries":[...],"allocation":[...]}
//              {"kind":"trapezoid","n":16}
//
// Schema problems throw ParseError; well-formed values that break an
// invariant throw InvariantError.

#include <span>
#include <string>

#include <json.hpp>

#include "monoquad/analysis.hpp"
#include "monoquad/estimators.hpp"
#include "monoquad/function_model.hpp"
#include "monoquad/oracle.hpp"

namespace monoquad {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const MonotoneFunction& f);
MonotoneFunction function_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EstimatorSpec& spec);
EstimatorSpec estimator_from_json(const nlohmann::json& j);

/// Parses text as JSON, mapping syntax errors to ParseError.
nlohmann::json parse_json(const std::string& text);

/// {"estimator":..., "function":..., "replications":R, "seed":s, "p":2}
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

/// Report with its config. Wall time is left out so that the document is a
/// pure function of the config.
nlohmann::json to_json(const Report& report, const ExperimentConfig& config);
std::string report_csv(const Report& report, const ExperimentConfig& config);

nlohmann::json to_json(const VarianceCertificate& cert);

/// Floats in CSV output: 13 significant digits (%.13g).
std::string format_number(double value);

/// RFC 4180 field: quoted when it contains a comma, quote or line break.
std::string csv_field(const std::string& value);

/// Header plus one row per report; CRLF line endings.
std::string bound_reports_csv(std::span<const BoundReport> rows);

}  // namespace monoquad
