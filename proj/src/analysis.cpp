#include "monoquad/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/rational.hpp>

#include "monoquad/errors.hpp"

namespace monoquad {
namespace {

using Rational = boost::rational<std::int64_t>;

void require_n(std::size_t n) {
    if (n < 1) throw InvariantError("sample size n must be >= 1");
}

double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

BoundReport exact_bound_report(std::size_t n) {
    const auto nn = static_cast<std::int64_t>(n);
    const Rational var_lb(1, 32 * nn * nn);
    const Rational mc(1, 4 * nn);
    const Rational cv(1, 12 * nn);
    const Rational lhs(1, 4 * nn * nn);
    const Rational best = std::min(cv, lhs);
    const Rational trap(1, 4 * (nn + 1) * (nn + 1));

    BoundReport r{};
    r.n = n;
    r.p = 2.0;
    r.lp_lower_bound = lower_bound_lp(n, 2.0);
    r.variance_lower_bound = to_double(var_lb);
    r.mc_worst_case = to_double(mc);
    r.cv_worst_case = to_double(cv);
    r.lhs_worst_case = to_double(lhs);
    r.best_unbiased = to_double(best);
    r.ratio_unbiased = to_double(best / var_lb);
    r.trapezoid_squared_error = to_double(trap);
    r.ratio_trapezoid = to_double(best / trap);
    return r;
}

BoundReport float_bound_report(std::size_t n) {
    const double nd = static_cast<double>(n);
    BoundReport r{};
    r.n = n;
    r.p = 2.0;
    r.lp_lower_bound = lower_bound_lp(n, 2.0);
    r.variance_lower_bound = variance_lower_bound(n);
    r.mc_worst_case = worst_case_var_mc(n);
    r.cv_worst_case = worst_case_var_cv(n);
    r.lhs_worst_case = 1.0 / (4.0 * nd * nd);
    r.best_unbiased = std::min(r.cv_worst_case, r.lhs_worst_case);
    r.ratio_unbiased = r.best_unbiased / r.variance_lower_bound;
    r.trapezoid_squared_error = trapezoid_worst_case(n).squared_error;
    r.ratio_trapezoid = r.best_unbiased / r.trapezoid_squared_error;
    return r;
}

}  // namespace

double worst_case_var_mc(std::size_t n) {
    require_n(n);
    return 1.0 / (4.0 * static_cast<double>(n));
}

double worst_case_var_cv(std::size_t n) {
    require_n(n);
    return 1.0 / (12.0 * static_cast<double>(n));
}

VarianceCertificate worst_case_var_stratified(const StrataSpec& strata) {
    std::size_t best = 0;
    double best_ratio = -1.0;
    for (std::size_t k = 0; k < strata.size(); ++k) {
        const double w = strata.weight(k);
        const double ratio = w * w / static_cast<double>(strata.count(k));
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = k;
        }
    }
    const double midpoint = 0.5 * (strata.lower(best) + strata.upper(best));
    return {EstimatorSpec::stratified(strata), 0.25 * best_ratio, MonotoneFunction::unit_step(midpoint)};
}

double worst_case_var_stratified_restricted(const StrataSpec& strata, std::span<const double> deltas) {
    if (deltas.size() != strata.size()) throw InvariantError("need one increment per stratum");
    double mass = 0.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < strata.size(); ++k) {
        if (!(deltas[k] >= 0.0)) throw InvariantError("stratum increments must be non-negative");
        mass += deltas[k];
        const double w = strata.weight(k);
        sum += w * w * deltas[k] * deltas[k] / static_cast<double>(strata.count(k));
    }
    if (mass > 1.0 + 1e-12) throw InvariantError("stratum increments must sum to at most 1");
    return 0.25 * sum;
}

VarianceCertificate certify_worst_case(const EstimatorSpec& spec) {
    return std::visit(
        [&spec](const auto& m) -> VarianceCertificate {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SimpleMC>) {
                return {spec, worst_case_var_mc(m.n), MonotoneFunction::unit_step(0.5)};
            } else if constexpr (std::is_same_v<T, ControlVariate>) {
                return {spec, worst_case_var_cv(m.n), MonotoneFunction::unit_step(0.5)};
            } else if constexpr (std::is_same_v<T, Stratified>) {
                return worst_case_var_stratified(m.strata);
            } else {
                throw InvariantError("deterministic estimator has zero variance; use exact error instead");
            }
        },
        spec.method());
}

double lower_bound_lp(std::size_t n, double p) {
    require_n(n);
    if (!(p >= 1.0)) throw InvariantError("error exponent p must be >= 1");
    return std::pow(0.5, 2.0 + 1.0 / p) / static_cast<double>(n);
}

double variance_lower_bound(std::size_t n) {
    require_n(n);
    const double nd = static_cast<double>(n);
    return 1.0 / (32.0 * nd * nd);
}

StrataSpec optimal_strata(std::size_t n) {
    require_n(n);
    std::vector<double> boundaries(n + 1);
    for (std::size_t k = 0; k <= n; ++k) boundaries[k] = static_cast<double>(k) / static_cast<double>(n);
    return StrataSpec(std::move(boundaries), std::vector<std::size_t>(n, 1));
}

TrapezoidWorstCase trapezoid_worst_case(std::size_t n) {
    require_n(n);
    const double h = 1.0 / static_cast<double>(n + 1);
    return {0.5 * h, 0.25 * h * h};
}

PointSampler sampler_for(const EstimatorSpec& spec) {
    return [spec](RngStream& rng) { return sample_points(spec, rng); };
}

AdversarialPair adversarial_pair(std::size_t n, const PointSampler& sampler, std::uint64_t replications,
                                 std::uint64_t seed) {
    require_n(n);
    if (replications < 1) throw InvariantError("replications must be >= 1");
    const std::size_t cells = 2 * n;
    std::vector<std::uint64_t> misses(cells, 0);
    std::vector<char> hit(cells);
    for (std::uint64_t r = 0; r < replications; ++r) {
        RngStream rng(seed, r);
        std::fill(hit.begin(), hit.end(), 0);
        for (double x : sampler(rng)) hit[staircase_cell(x, cells) - 1] = 1;
        for (std::size_t j = 0; j < cells; ++j) misses[j] += hit[j] ? 0 : 1;
    }

    std::vector<double> probabilities(cells);
    std::size_t chosen = 0;
    for (std::size_t j = 0; j < cells; ++j) {
        probabilities[j] = static_cast<double>(misses[j]) / static_cast<double>(replications);
        if (misses[j] > misses[chosen]) chosen = j;
    }

    std::vector<double> f1(cells, 0.0);
    std::vector<double> f2(cells, 0.0);
    for (std::size_t j = 0; j < cells; ++j) {
        f1[j] = j >= chosen ? 1.0 : 0.0;
        f2[j] = j > chosen ? 1.0 : 0.0;
    }
    const double p = probabilities[chosen];
    return AdversarialPair{
        .n = n,
        .cell = chosen + 1,
        .interval_lower = static_cast<double>(chosen) / static_cast<double>(cells),
        .interval_upper = static_cast<double>(chosen + 1) / static_cast<double>(cells),
        .f1 = MonotoneFunction::staircase(std::move(f1)),
        .f2 = MonotoneFunction::staircase(std::move(f2)),
        .miss_probability = p,
        .miss_standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(replications)),
        .cell_miss_probabilities = std::move(probabilities),
        .replications = replications,
    };
}

BoundReport bound_report(std::size_t n) {
    require_n(n);
    return n <= kExactRatioLimit ? exact_bound_report(n) : float_bound_report(n);
}

std::vector<BoundReport> ratio_table(std::size_t n_max) {
    require_n(n_max);
    std::vector<BoundReport> rows;
    rows.reserve(n_max);
    for (std::size_t n = 1; n <= n_max; ++n) rows.push_back(bound_report(n));
    return rows;
}

}  // namespace monoquad
