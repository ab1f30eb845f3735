#include "monoquad/io.hpp"

#include <cstdio>
#include <sstream>

#include "monoquad/errors.hpp"

namespace monoquad {
namespace {

using nlohmann::json;

const json& field(const json& j, const char* name) {
    if (!j.is_object()) throw ParseError("expected a JSON object");
    const auto it = j.find(name);
    if (it == j.end()) throw ParseError(std::string("missing field '") + name + "'");
    return *it;
}

double number_field(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_number()) throw ParseError(std::string("field '") + name + "' must be a number");
    return v.get<double>();
}

double optional_number(const json& j, const char* name, double fallback) {
    return j.contains(name) ? number_field(j, name) : fallback;
}

std::string string_field(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_string()) throw ParseError(std::string("field '") + name + "' must be a string");
    return v.get<std::string>();
}

// Negative counts are invariant violations, non-integers are parse errors.
std::uint64_t count_value(const json& v, const std::string& name) {
    if (!v.is_number_integer()) throw ParseError("field '" + name + "' must be an integer");
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    const auto signed_value = v.get<std::int64_t>();
    if (signed_value < 0) throw InvariantError("field '" + name + "' must be non-negative");
    return static_cast<std::uint64_t>(signed_value);
}

std::uint64_t count_field(const json& j, const char* name) { return count_value(field(j, name), name); }

std::vector<double> number_array(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_array()) throw ParseError(std::string("field '") + name + "' must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number()) throw ParseError(std::string("field '") + name + "' must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

}  // namespace

json to_json(const MonotoneFunction& f) {
    return std::visit(
        [](const auto& r) -> json {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, UnitStep>) {
                return {{"kind", "unit_step"}, {"x0", r.x0}};
            } else if constexpr (std::is_same_v<T, Staircase>) {
                return {{"kind", "staircase"}, {"alphas", r.alphas}};
            } else {
                json j = {{"kind", "preset"}, {"id", std::string(to_string(r.id))}};
                if (r.id == PresetId::logistic) {
                    j["steepness"] = r.steepness;
                    j["center"] = r.center;
                }
                return j;
            }
        },
        f.representation());
}

MonotoneFunction function_from_json(const json& j) {
    const std::string kind = string_field(j, "kind");
    if (kind == "unit_step") return MonotoneFunction::unit_step(number_field(j, "x0"));
    if (kind == "staircase") return MonotoneFunction::staircase(number_array(j, "alphas"));
    if (kind == "preset") {
        const PresetId id = preset_from_string(string_field(j, "id"));
        return MonotoneFunction::preset(id, optional_number(j, "steepness", 10.0), optional_number(j, "center", 0.5));
    }
    throw ParseError("unknown function kind '" + kind + "'");
}

json to_json(const EstimatorSpec& spec) {
    return std::visit(
        [&spec](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            const std::string kind(to_string(spec.kind()));
            if constexpr (std::is_same_v<T, Stratified>) {
                return {{"kind", kind},
                        {"boundaries", m.strata.boundaries()},
                        {"allocation", m.strata.allocation()}};
            } else {
                return {{"kind", kind}, {"n", m.n}};
            }
        },
        spec.method());
}

EstimatorSpec estimator_from_json(const json& j) {
    const std::string kind = string_field(j, "kind");
    if (kind == "simple_mc") return EstimatorSpec::simple_mc(count_field(j, "n"));
    if (kind == "control_variate") return EstimatorSpec::control_variate(count_field(j, "n"));
    if (kind == "trapezoid") return EstimatorSpec::trapezoid(count_field(j, "n"));
    if (kind == "stratified") {
        const json& alloc = field(j, "allocation");
        if (!alloc.is_array()) throw ParseError("field 'allocation' must be an array");
        std::vector<std::size_t> allocation;
        for (const auto& e : alloc) allocation.push_back(count_value(e, "allocation"));
        return EstimatorSpec::stratified(StrataSpec(number_array(j, "boundaries"), std::move(allocation)));
    }
    throw ParseError("unknown estimator kind '" + kind + "'");
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig config{
        .estimator = estimator_from_json(field(j, "estimator")),
        .function = function_from_json(field(j, "function")),
    };
    if (j.contains("replications")) config.replications = count_field(j, "replications");
    if (j.contains("seed")) config.seed = count_field(j, "seed");
    config.p = optional_number(j, "p", 2.0);
    return config;
}

json to_json(const ExperimentConfig& config) {
    return {{"estimator", to_json(config.estimator)},
            {"function", to_json(config.function)},
            {"replications", config.replications},
            {"seed", config.seed},
            {"p", config.p}};
}

json to_json(const Report& report, const ExperimentConfig& config) {
    json j = {
        {"schema", kReportSchemaVersion},
        {"config", to_json(config)},
        {"replications", report.replications},
        {"p", report.p},
        {"empirical_mean", report.empirical_mean},
        {"empirical_variance", report.empirical_variance},
        {"standard_error", report.standard_error},
        {"empirical_lp_error", report.empirical_lp_error},
        {"lp_standard_error", report.lp_standard_error},
        {"exact_integral", report.exact_integral},
        {"exact_variance", report.exact_variance ? json(*report.exact_variance) : json(nullptr)},
        {"variance_estimator", "unbiased (R-1 denominator)"},
        {"tolerance_bands", "normal / chi-square approximations, intended for R >= 1e5"},
    };
    return j;
}

std::string report_csv(const Report& report, const ExperimentConfig& config) {
    std::ostringstream out;
    out << "schema,estimator,function,replications,seed,p,empirical_mean,empirical_variance,standard_error,"
           "empirical_lp_error,lp_standard_error,exact_integral,exact_variance\r\n";
    out << kReportSchemaVersion << ',' << csv_field(to_json(config.estimator).dump()) << ','
        << csv_field(to_json(config.function).dump()) << ',' << report.replications << ',' << config.seed << ','
        << format_number(report.p) << ',' << format_number(report.empirical_mean) << ','
        << format_number(report.empirical_variance) << ',' << format_number(report.standard_error) << ','
        << format_number(report.empirical_lp_error) << ',' << format_number(report.lp_standard_error) << ','
        << format_number(report.exact_integral) << ','
        << (report.exact_variance ? format_number(*report.exact_variance) : std::string()) << "\r\n";
    return out.str();
}

json to_json(const VarianceCertificate& cert) {
    return {{"estimator", to_json(cert.spec)},
            {"worst_case_variance", cert.worst_case_variance},
            {"witness", to_json(cert.witness)}};
}

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.13g", value);
    return buf;
}

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string bound_reports_csv(std::span<const BoundReport> rows) {
    std::ostringstream out;
    out << "n,lp_lb_p2,var_lb,mc_wc,cv_wc,lhs_wc,best_unbiased,ratio_unbiased,trap_sq_err,ratio_trap\r\n";
    for (const auto& r : rows) {
        out << r.n << ',' << format_number(r.lp_lower_bound) << ',' << format_number(r.variance_lower_bound) << ','
            << format_number(r.mc_worst_case) << ',' << format_number(r.cv_worst_case) << ','
            << format_number(r.lhs_worst_case) << ',' << format_number(r.best_unbiased) << ','
            << format_number(r.ratio_unbiased) << ',' << format_number(r.trapezoid_squared_error) << ','
            << format_number(r.ratio_trapezoid) << "\r\n";
    }
    return out.str();
}

}  // namespace monoquad
