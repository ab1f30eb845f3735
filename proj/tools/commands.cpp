#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "monoquad/analysis.hpp"
#include "monoquad/errors.hpp"
#include "monoquad/estimators.hpp"
#include "monoquad/function_model.hpp"
#include "monoquad/io.hpp"
#include "monoquad/oracle.hpp"

namespace monoquad::cli {
namespace {

using nlohmann::json;

constexpr double kCertificateTolerance = 1e-12;

// What a command produced, plus what is needed to reproduce it.
struct Outcome {
    std::string payload;
    std::vector<std::string> argv;  // canonical, fully resolved
    json config;
    int status = kSuccess;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << contents;
}

// Inline JSON, or @path to read it from a file.
json json_argument(const std::string& value) {
    if (!value.empty() && value.front() == '@') return parse_json(read_file(value.substr(1)));
    return parse_json(value);
}

std::string exact_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

unsigned default_jobs() {
    if (const char* env = std::getenv("MONOQUAD_JOBS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// worst-case

Outcome worst_case(const std::string& estimator_arg, const std::string& format) {
    const EstimatorSpec spec = estimator_from_json(json_argument(estimator_arg));

    json result = {{"command", "worst-case"}, {"estimator", to_json(spec)}};
    std::string quantity;
    double closed_form = 0.0;
    double oracle = 0.0;
    std::optional<MonotoneFunction> witness;
    if (spec.randomized()) {
        const VarianceCertificate cert = certify_worst_case(spec);
        quantity = "worst-case variance";
        closed_form = cert.worst_case_variance;
        oracle = exact_estimator_variance(spec, cert.witness);
        witness = cert.witness;
        result["quantity"] = "variance";
    } else {
        const std::size_t n = spec.sample_size();
        const TrapezoidWorstCase wc = trapezoid_worst_case(n);
        // f = 0 has S(f) = 0 while the rule assumes f(1) = 1.
        witness = MonotoneFunction::constant(0.0);
        quantity = "worst-case error";
        closed_form = wc.error;
        oracle = std::abs(exact_integral(*witness) - trapezoid(*witness, n));
        result["quantity"] = "error";
        result["squared_error"] = wc.squared_error;
    }
    const bool verified = std::abs(oracle - closed_form) <= kCertificateTolerance;
    result["worst_case"] = closed_form;
    result["witness"] = to_json(*witness);
    result["oracle_at_witness"] = oracle;
    result["verified"] = verified;

    Outcome outcome;
    outcome.config = {{"estimator", to_json(spec)}, {"format", format}};
    outcome.argv = {"worst-case", "--estimator", to_json(spec).dump(), "--format", format};
    outcome.status = verified ? kSuccess : kInvariantViolation;
    if (format == "json") {
        outcome.payload = dump(result);
    } else {
        std::ostringstream t;
        t << std::left;
        t << std::setw(20) << "estimator" << spec.describe() << "\n";
        t << std::setw(20) << "quantity" << quantity << "\n";
        t << std::setw(20) << "closed form" << format_number(closed_form) << "\n";
        if (!spec.randomized()) {
            t << std::setw(20) << "squared" << format_number(result["squared_error"].get<double>()) << "\n";
        }
        t << std::setw(20) << "witness" << witness->describe() << "\n";
        t << std::setw(20) << "oracle at witness" << format_number(oracle) << "\n";
        t << std::setw(20) << "verified" << (verified ? "yes" : "NO") << " (|diff| = "
          << format_number(std::abs(oracle - closed_form)) << ", tolerance 1e-12)\n";
        outcome.payload = t.str();
    }
    return outcome;
}

// ---------------------------------------------------------------------------
// ratios

Outcome ratios(std::size_t n_max) {
    const auto rows = ratio_table(n_max);
    Outcome outcome;
    outcome.payload = bound_reports_csv(rows);
    outcome.config = {{"n_max", n_max}};
    outcome.argv = {"ratios", "--n-max", std::to_string(n_max)};
    return outcome;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string config_path;
    std::optional<std::string> estimator;
    std::optional<std::string> function;
    std::optional<std::uint64_t> replications;
    std::optional<std::uint64_t> seed;
    std::optional<double> p;
    std::string format = "json";
};

Outcome simulate(const SimulateArgs& args, unsigned jobs) {
    json j = args.config_path.empty() ? json::object() : parse_json(read_file(args.config_path));
    if (!j.is_object()) throw ParseError("config must be a JSON object");
    if (args.estimator) j["estimator"] = json_argument(*args.estimator);
    if (args.function) j["function"] = json_argument(*args.function);
    if (args.replications) j["replications"] = *args.replications;
    if (args.seed) j["seed"] = *args.seed;
    if (args.p) j["p"] = *args.p;

    const ExperimentConfig config = config_from_json(j);
    const Report report = run_experiment(config, jobs);

    Outcome outcome;
    outcome.payload = args.format == "csv" ? report_csv(report, config) : dump(to_json(report, config));
    outcome.config = to_json(config);
    outcome.config["format"] = args.format;
    outcome.argv = {"simulate",
                    "--estimator",
                    to_json(config.estimator).dump(),
                    "--function",
                    to_json(config.function).dump(),
                    "--replications",
                    std::to_string(config.replications),
                    "--seed",
                    std::to_string(config.seed),
                    "--p",
                    exact_double(config.p),
                    "--format",
                    args.format};
    return outcome;
}

// ---------------------------------------------------------------------------
// brute-force

Outcome brute_force(const std::string& estimator_arg, std::size_t m, std::size_t g, std::uint64_t cap,
                    bool heuristic) {
    const EstimatorSpec spec = estimator_from_json(json_argument(estimator_arg));
    SearchOptions options;
    options.candidate_cap = cap;
    options.allow_heuristic = heuristic;

    SearchResult found = spec.randomized() ? brute_force_max_variance(spec, m, g, options)
                                           : brute_force_max_trapezoid_error(spec.sample_size(), m, g, options);
    const double closed_form = spec.randomized() ? certify_worst_case(spec).worst_case_variance
                                                 : trapezoid_worst_case(spec.sample_size()).error;
    double x0 = 0.0;
    json result = {
        {"command", "brute-force"},
        {"estimator", to_json(spec)},
        {"objective", spec.randomized() ? "variance" : "trapezoid_error"},
        {"m", m},
        {"g", g},
        {"grid_size", staircase_grid_size(m, g)},
        {"candidates", found.candidates},
        {"search", found.exhaustive ? "exhaustive" : "coordinate_ascent (heuristic)"},
        {"maximum", found.maximum},
        {"witness", to_json(found.witness)},
        {"witness_unit_step_x0", as_unit_step(found.witness, x0) ? json(x0) : json(nullptr)},
        {"closed_form", closed_form},
        {"within_closed_form", found.maximum <= closed_form + kCertificateTolerance},
    };

    Outcome outcome;
    outcome.payload = dump(result);
    outcome.config = {{"estimator", to_json(spec)}, {"m", m}, {"g", g}, {"cap", cap}, {"heuristic", heuristic}};
    outcome.argv = {"brute-force", "--estimator", to_json(spec).dump(), "--m", std::to_string(m),
                    "--g",         std::to_string(g), "--cap", std::to_string(cap)};
    if (heuristic) outcome.argv.push_back("--heuristic");
    return outcome;
}

// ---------------------------------------------------------------------------
// lower-bound

Outcome lower_bound(const std::string& estimator_arg, double p, std::uint64_t replications, std::uint64_t seed,
                    unsigned jobs) {
    const EstimatorSpec spec = estimator_from_json(json_argument(estimator_arg));
    if (replications < 1) throw InvariantError("replications must be >= 1");
    const std::size_t n = spec.sample_size();
    const double bound = lower_bound_lp(n, p);
    const AdversarialPair pair = adversarial_pair(n, sampler_for(spec), replications, seed);

    const LpError e1 = empirical_lp_error(spec, pair.f1, p, replications, seed, jobs);
    const LpError e2 = empirical_lp_error(spec, pair.f2, p, replications, seed, jobs);
    const LpError worst = e1.value >= e2.value ? e1 : e2;

    double ones1 = 0.0;
    double ones2 = 0.0;
    for (double a : std::get<Staircase>(pair.f1.representation()).alphas) ones1 += a;
    for (double a : std::get<Staircase>(pair.f2.representation()).alphas) ones2 += a;
    const double gap = (ones1 - ones2) / static_cast<double>(2 * n);

    json result = {
        {"command", "lower-bound"},
        {"estimator", to_json(spec)},
        {"n", n},
        {"p", p},
        {"replications", replications},
        {"seed", seed},
        {"cell", pair.cell},
        {"interval", {pair.interval_lower, pair.interval_upper}},
        {"miss_probability", pair.miss_probability},
        {"miss_standard_error", pair.miss_standard_error},
        {"cell_miss_probabilities", pair.cell_miss_probabilities},
        {"f1", to_json(pair.f1)},
        {"f2", to_json(pair.f2)},
        {"integral_gap", gap},
        {"lp_error_f1", {{"value", e1.value}, {"standard_error", e1.standard_error}}},
        {"lp_error_f2", {{"value", e2.value}, {"standard_error", e2.standard_error}}},
        {"max_lp_error", worst.value},
        {"max_lp_standard_error", worst.standard_error},
        {"bound", bound},
        {"pass", worst.value >= bound - 4.0 * worst.standard_error},
    };

    Outcome outcome;
    outcome.payload = dump(result);
    outcome.config = {{"estimator", to_json(spec)}, {"p", p}, {"replications", replications}, {"seed", seed}};
    outcome.argv = {"lower-bound", "--estimator",   to_json(spec).dump(), "--p", exact_double(p),
                    "--replications", std::to_string(replications), "--seed", std::to_string(seed)};
    return outcome;
}

// ---------------------------------------------------------------------------

void emit(const Outcome& outcome, const std::string& out_path, const std::string& manifest_path, unsigned jobs,
          double wall_time, std::ostream& out) {
    if (out_path.empty()) {
        out << outcome.payload;
    } else {
        write_file(out_path, outcome.payload);
    }
    std::string manifest = manifest_path;
    if (manifest.empty() && !out_path.empty()) manifest = out_path + ".manifest.json";
    if (manifest.empty()) return;

    json m = {
        {"tool", kToolName},
        {"version", kToolVersion},
        {"command", outcome.argv.front()},
        {"argv", outcome.argv},
        {"config", outcome.config},
        {"seed", outcome.config.contains("seed") ? outcome.config["seed"] : json(0)},
        {"jobs", jobs},
        {"outputs", out_path.empty() ? json::array() : json::array({out_path})},
        {"wall_time_seconds", wall_time},
    };
    write_file(manifest, dump(m));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Unbiased Monte Carlo integration of bounded monotone functions", kToolName};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kToolVersion);

    unsigned jobs = default_jobs();
    std::string manifest_path;
    app.add_option("--jobs", jobs, "Worker threads (default: $MONOQUAD_JOBS or 1)")->check(CLI::PositiveNumber);
    app.add_option("--manifest", manifest_path, "Write the run manifest here (default: <out>.manifest.json)");

    std::string out_path;
    std::string estimator_arg;
    std::string format = "table";

    auto* wc = app.add_subcommand("worst-case", "Closed-form worst case with a verified witness");
    wc->add_option("--estimator", estimator_arg, "Estimator spec JSON (or @file)")->required();
    wc->add_option("--format", format)->check(CLI::IsMember({"table", "json"}));
    wc->add_option("--out", out_path);

    std::size_t n_max = 10;
    auto* rt = app.add_subcommand("ratios", "Worst-case bounds and ratios as CSV");
    rt->add_option("--n-max", n_max)->check(CLI::PositiveNumber);
    rt->add_option("--out", out_path);

    SimulateArgs sim;
    auto* sm = app.add_subcommand("simulate", "Replicate an estimator and report empirical statistics");
    sm->add_option("config", sim.config_path, "Experiment config JSON file");
    sm->add_option("--estimator", sim.estimator, "Estimator spec JSON (or @file)");
    sm->add_option("--function", sim.function, "Function spec JSON (or @file)");
    sm->add_option("--replications", sim.replications);
    sm->add_option("--seed", sim.seed);
    sm->add_option("--p", sim.p, "Error exponent");
    sm->add_option("--format", sim.format)->check(CLI::IsMember({"json", "csv"}));
    sm->add_option("--out", out_path);

    std::size_t m = 4;
    std::size_t g = 4;
    std::uint64_t cap = kDefaultCandidateCap;
    bool heuristic = false;
    auto* bf = app.add_subcommand("brute-force", "Maximize over staircases on an (m, g) grid");
    bf->add_option("--estimator", estimator_arg, "Estimator spec JSON (or @file)")->required();
    bf->add_option("--m", m, "Number of pieces")->check(CLI::PositiveNumber);
    bf->add_option("--g", g, "Level grid resolution")->check(CLI::PositiveNumber);
    bf->add_option("--cap", cap, "Maximum number of enumerated candidates");
    bf->add_flag("--heuristic", heuristic, "Fall back to coordinate ascent above the cap");
    bf->add_option("--out", out_path);

    double p = 2.0;
    std::uint64_t replications = 100'000;
    std::uint64_t seed = 0;
    auto* lb = app.add_subcommand("lower-bound", "Adversarial pair against an estimator's sampler");
    lb->add_option("--estimator", estimator_arg, "Estimator spec JSON (or @file)")->required();
    lb->add_option("--p", p, "Error exponent");
    lb->add_option("--replications", replications);
    lb->add_option("--seed", seed);
    lb->add_option("--out", out_path);

    std::string replay_path;
    auto* rp = app.add_subcommand("replay", "Re-run a manifest");
    rp->add_option("manifest", replay_path)->required();
    rp->add_option("--out", out_path, "Override the recorded output path");

    std::vector<const char*> argv{kToolName};
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kParseError;
    }

    try {
        if (rp->parsed()) {
            const json manifest = parse_json(read_file(replay_path));
            if (!manifest.contains("argv") || !manifest["argv"].is_array()) {
                throw ParseError("manifest has no argv");
            }
            auto replay_args = manifest["argv"].get<std::vector<std::string>>();
            std::string target = out_path;
            if (target.empty() && !manifest["outputs"].empty()) target = manifest["outputs"][0].get<std::string>();
            if (!target.empty()) {
                replay_args.push_back("--out");
                replay_args.push_back(target);
            }
            return run(replay_args, out, err);
        }

        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        if (wc->parsed()) {
            outcome = worst_case(estimator_arg, format);
        } else if (rt->parsed()) {
            outcome = ratios(n_max);
        } else if (sm->parsed()) {
            outcome = simulate(sim, jobs);
        } else if (bf->parsed()) {
            outcome = brute_force(estimator_arg, m, g, cap, heuristic);
        } else {
            outcome = lower_bound(estimator_arg, p, replications, seed, jobs);
        }
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        emit(outcome, out_path, manifest_path, jobs, elapsed.count(), out);
        if (outcome.status == kInvariantViolation) err << "error: closed form not confirmed by the oracle\n";
        return outcome.status;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kParseError;
    } catch (const BudgetExceeded& e) {
        err << "resource cap: " << e.what() << "\n";
        return kResourceCap;
    } catch (const InvariantError& e) {
        err << "invariant violation: " << e.what() << "\n";
        return kInvariantViolation;
    } catch (const DomainError& e) {
        err << "invariant violation: " << e.what() << "\n";
        return kInvariantViolation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

}  // namespace monoquad::cli
