#include "monoquad/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "monoquad/errors.hpp"

namespace monoquad {
namespace {

constexpr std::size_t kPairwiseBlock = 8;

// Candidates within this relative distance of the incumbent count as ties,
// so the first maximizer in enumeration order wins over rounding noise.
constexpr double kTieTolerance = 1e-13;

bool improves(double candidate, double incumbent) noexcept {
    return candidate > incumbent + kTieTolerance * std::max(1.0, std::abs(incumbent));
}

MonotoneFunction staircase_from_levels(const std::vector<std::size_t>& levels, std::size_t g) {
    std::vector<double> alphas(levels.size());
    const double scale = static_cast<double>(g);
    for (std::size_t k = 0; k < levels.size(); ++k) alphas[k] = static_cast<double>(levels[k]) / scale;
    return MonotoneFunction::staircase(std::move(alphas));
}

// Advances to the next non-decreasing tuple in lexicographic order.
bool next_tuple(std::vector<std::size_t>& levels, std::size_t g) noexcept {
    std::size_t i = levels.size();
    while (i > 0 && levels[i - 1] == g) --i;
    if (i == 0) return false;
    const std::size_t v = levels[i - 1] + 1;
    std::fill(levels.begin() + static_cast<std::ptrdiff_t>(i - 1), levels.end(), v);
    return true;
}

class LevelObjective {
public:
    LevelObjective(std::size_t g, const std::function<double(const MonotoneFunction&)>& objective)
        : g_(g), objective_(objective) {}

    double operator()(const std::vector<std::size_t>& levels) {
        ++evaluations;
        return objective_(staircase_from_levels(levels, g_));
    }

    std::uint64_t evaluations = 0;

private:
    std::size_t g_;
    const std::function<double(const MonotoneFunction&)>& objective_;
};

// Block moves: a maximal run of equal levels is shifted as a whole, or one of
// its end cells is split off, anywhere between the neighbouring levels. The
// objectives used here are convex along each such move, so the ascent ends
// in a local maximum among these moves.
double ascend(std::vector<std::size_t>& levels, double value, std::size_t g, LevelObjective& objective) {
    const std::size_t m = levels.size();
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t i = 0; i < m && !improved;) {
            std::size_t j = i;
            while (j + 1 < m && levels[j + 1] == levels[i]) ++j;
            const std::size_t level = levels[i];
            const std::size_t lo = i > 0 ? levels[i - 1] : 0;
            const std::size_t hi = j + 1 < m ? levels[j + 1] : g;

            std::vector<std::size_t> best_levels;
            double best_value = value;
            auto consider = [&](std::vector<std::size_t> trial) {
                const double v = objective(trial);
                if (improves(v, best_value)) {
                    best_value = v;
                    best_levels = std::move(trial);
                }
            };
            for (std::size_t v = lo; v <= hi; ++v) {
                if (v == level) continue;
                auto whole = levels;
                std::fill(whole.begin() + static_cast<std::ptrdiff_t>(i),
                          whole.begin() + static_cast<std::ptrdiff_t>(j + 1), v);
                consider(std::move(whole));
                if (j > i && v < level) {
                    auto left = levels;
                    left[i] = v;
                    consider(std::move(left));
                }
                if (j > i && v > level) {
                    auto right = levels;
                    right[j] = v;
                    consider(std::move(right));
                }
            }
            if (!best_levels.empty()) {
                levels = std::move(best_levels);
                value = best_value;
                improved = true;
            }
            i = j + 1;
        }
    }
    return value;
}

SearchResult coordinate_ascent(std::size_t m, std::size_t g,
                               const std::function<double(const MonotoneFunction&)>& objective,
                               const SearchOptions& options) {
    LevelObjective eval(g, objective);
    std::vector<std::vector<std::size_t>> starts;
    for (std::size_t jump = 0; jump <= m; ++jump) {
        std::vector<std::size_t> step(m, 0);
        std::fill(step.begin() + static_cast<std::ptrdiff_t>(jump), step.end(), g);
        starts.push_back(std::move(step));
    }
    for (std::size_t s = 0; s < options.heuristic_random_starts; ++s) {
        RngStream rng(options.heuristic_seed, s);
        std::vector<std::size_t> levels(m);
        for (auto& v : levels) v = static_cast<std::size_t>(rng() % (g + 1));
        std::sort(levels.begin(), levels.end());
        starts.push_back(std::move(levels));
    }

    std::vector<std::size_t> best_levels;
    double best = -std::numeric_limits<double>::infinity();
    for (auto& start : starts) {
        const double value = ascend(start, eval(start), g, eval);
        if (best_levels.empty() || improves(value, best)) {
            best = value;
            best_levels = start;
        }
    }
    return {best, staircase_from_levels(best_levels, g), eval.evaluations, false};
}

double moment_variance(const MonotoneFunction& f, double a, double b) {
    return moments_on_interval(f, a, b).variance();
}

}  // namespace

double exact_estimator_variance(const EstimatorSpec& spec, const MonotoneFunction& f) {
    return std::visit(
        [&f](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SimpleMC>) {
                return moment_variance(f, 0.0, 1.0) / static_cast<double>(m.n);
            } else if constexpr (std::is_same_v<T, ControlVariate>) {
                return variance_of_residual(f) / static_cast<double>(m.n);
            } else if constexpr (std::is_same_v<T, Stratified>) {
                double total = 0.0;
                for (std::size_t k = 0; k < m.strata.size(); ++k) {
                    const double w = m.strata.weight(k);
                    total += w * w / static_cast<double>(m.strata.count(k)) *
                             moment_variance(f, m.strata.lower(k), m.strata.upper(k));
                }
                return total;
            } else {
                throw InvariantError("deterministic estimator has zero variance; use exact error instead");
            }
        },
        spec.method());
}

std::uint64_t staircase_grid_size(std::size_t m, std::size_t g) noexcept {
    const std::size_t k = std::min(m, g);
    std::uint64_t result = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        // result * (m + g - k + i) is divisible by i; cancel before multiplying.
        const std::uint64_t d = std::gcd<std::uint64_t>(result, i);
        const std::uint64_t factor = (m + g - k + i) / (i / d);
        if (__builtin_mul_overflow(result / d, factor, &result)) return std::numeric_limits<std::uint64_t>::max();
    }
    return result;
}

SearchResult maximize_over_staircases(std::size_t m, std::size_t g,
                                      const std::function<double(const MonotoneFunction&)>& objective,
                                      const SearchOptions& options) {
    if (m < 1 || g < 1) throw InvariantError("staircase search needs m >= 1 and g >= 1");
    const std::uint64_t count = staircase_grid_size(m, g);
    if (count > options.candidate_cap) {
        if (!options.allow_heuristic) throw BudgetExceeded(count, options.candidate_cap);
        return coordinate_ascent(m, g, objective, options);
    }

    LevelObjective eval(g, objective);
    std::vector<std::size_t> levels(m, 0);
    std::vector<std::size_t> best_levels = levels;
    double best = eval(levels);
    while (next_tuple(levels, g)) {
        const double value = eval(levels);
        if (improves(value, best)) {
            best = value;
            best_levels = levels;
        }
    }
    return {best, staircase_from_levels(best_levels, g), eval.evaluations, true};
}

SearchResult brute_force_max_variance(const EstimatorSpec& spec, std::size_t m, std::size_t g,
                                      const SearchOptions& options) {
    if (!spec.randomized()) {
        throw InvariantError("deterministic estimator has zero variance; use exact error instead");
    }
    return maximize_over_staircases(
        m, g, [&spec](const MonotoneFunction& f) { return exact_estimator_variance(spec, f); }, options);
}

SearchResult brute_force_max_trapezoid_error(std::size_t n, std::size_t m, std::size_t g,
                                             const SearchOptions& options) {
    if (n < 1) throw InvariantError("sample size n must be >= 1");
    return maximize_over_staircases(
        m, g, [n](const MonotoneFunction& f) { return std::abs(exact_integral(f) - trapezoid(f, n)); }, options);
}

EstimatorFn estimator_fn(const EstimatorSpec& spec) {
    return [spec](const MonotoneFunction& f, RngStream& rng) { return estimate(spec, f, rng); };
}

std::vector<double> replicate(const EstimatorFn& estimator, const MonotoneFunction& f, std::uint64_t replications,
                              std::uint64_t seed, unsigned jobs) {
    std::vector<double> out(replications);
    auto work = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t r = begin; r < end; ++r) {
            RngStream rng(seed, r);
            out[r] = estimator(f, rng);
        }
    };
    const std::uint64_t workers = std::clamp<std::uint64_t>(jobs, 1, std::max<std::uint64_t>(replications, 1));
    if (workers == 1) {
        work(0, replications);
        return out;
    }
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        const std::uint64_t chunk = (replications + workers - 1) / workers;
        for (std::uint64_t w = 0; w < workers; ++w) {
            const std::uint64_t begin = w * chunk;
            const std::uint64_t end = std::min(replications, begin + chunk);
            if (begin >= end) break;
            threads.emplace_back(work, begin, end);
        }
    }
    return out;
}

double pairwise_sum(std::span<const double> values) noexcept {
    if (values.size() <= kPairwiseBlock) {
        double sum = 0.0;
        for (double v : values) sum += v;
        return sum;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SampleSummary summarize(std::span<const double> values) {
    if (values.empty()) throw InvariantError("cannot summarize an empty sample");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double count = static_cast<double>(values.size());
    if (*lo == *hi) return {*lo, 0.0, 0.0};

    const double mean = pairwise_sum(values) / count;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
    const double variance = values.size() > 1 ? pairwise_sum(sq) / (count - 1.0) : 0.0;
    return {mean, variance, std::sqrt(variance / count)};
}

LpError lp_error(std::span<const double> estimates, double target, double p) {
    if (!(p >= 1.0)) throw InvariantError("error exponent p must be >= 1");
    std::vector<double> powered(estimates.size());
    for (std::size_t i = 0; i < estimates.size(); ++i) powered[i] = std::pow(std::abs(target - estimates[i]), p);
    const SampleSummary s = summarize(powered);
    if (s.mean <= 0.0) return {0.0, 0.0};
    const double value = std::pow(s.mean, 1.0 / p);
    // d/dM M^(1/p) = M^(1/p - 1) / p
    return {value, s.standard_error * value / (p * s.mean)};
}

void validate(const ExperimentConfig& config) {
    if (config.replications < 1) throw InvariantError("replications must be >= 1");
    if (!(config.p >= 1.0)) throw InvariantError("error exponent p must be >= 1");
}

Report run_experiment(const ExperimentConfig& config, unsigned jobs) {
    validate(config);
    const auto start = std::chrono::steady_clock::now();

    const auto estimates =
        replicate(estimator_fn(config.estimator), config.function, config.replications, config.seed, jobs);
    const SampleSummary summary = summarize(estimates);
    const double integral = exact_integral(config.function);
    const LpError lp = lp_error(estimates, integral, config.p);

    std::optional<double> exact_variance;
    if (config.estimator.randomized()) {
        exact_variance = exact_estimator_variance(config.estimator, config.function);
    } else {
        exact_variance = 0.0;
    }

    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return Report{
        .empirical_mean = summary.mean,
        .empirical_variance = summary.variance,
        .empirical_lp_error = lp.value,
        .lp_standard_error = lp.standard_error,
        .exact_integral = integral,
        .exact_variance = exact_variance,
        .standard_error = summary.standard_error,
        .replications = config.replications,
        .p = config.p,
        .wall_time_seconds = elapsed.count(),
    };
}

UnbiasednessCheck verify_unbiasedness(const EstimatorFn& estimator, const MonotoneFunction& f,
                                      std::uint64_t replications, std::uint64_t seed, unsigned jobs) {
    if (replications < 1) throw InvariantError("replications must be >= 1");
    const auto estimates = replicate(estimator, f, replications, seed, jobs);
    const SampleSummary s = summarize(estimates);
    const double integral = exact_integral(f);
    const double diff = s.mean - integral;
    double z = 0.0;
    bool pass = false;
    if (s.standard_error > 0.0) {
        z = diff / s.standard_error;
        pass = std::abs(z) <= 4.0;
    } else {
        // Zero spread: the estimator is deterministic on this f.
        pass = std::abs(diff) <= 1e-12;
        z = pass ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    return {pass, z, s.mean, integral, s.standard_error};
}

UnbiasednessCheck verify_unbiasedness(const EstimatorSpec& spec, const MonotoneFunction& f,
                                      std::uint64_t replications, std::uint64_t seed, unsigned jobs) {
    return verify_unbiasedness(estimator_fn(spec), f, replications, seed, jobs);
}

LpError empirical_lp_error(const EstimatorSpec& spec, const MonotoneFunction& f, double p,
                           std::uint64_t replications, std::uint64_t seed, unsigned jobs) {
    if (replications < 1) throw InvariantError("replications must be >= 1");
    const auto estimates = replicate(estimator_fn(spec), f, replications, seed, jobs);
    return lp_error(estimates, exact_integral(f), p);
}

}  // namespace monoquad
