#pragma once

/**
 * @file oracle.hpp
 * @brief Independent checks of the closed forms: exact estimator variances
 *        from first principles, exhaustive search over discretized
 *        staircases, and replication statistics.
 */

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "monoquad/estimators.hpp"
#include "monoquad/function_model.hpp"
#include "monoquad/rng.hpp"

namespace monoquad {

/// Var of the estimate, assembled from interval moments. Throws
/// InvariantError for the trapezoid rule.
double exact_estimator_variance(const EstimatorSpec& spec, const MonotoneFunction& f);

inline constexpr std::uint64_t kDefaultCandidateCap = 10'000'000;

struct SearchOptions {
    std::uint64_t candidate_cap = kDefaultCandidateCap;
    /// Switch to coordinate ascent instead of throwing BudgetExceeded.
    bool allow_heuristic = false;
    std::uint64_t heuristic_seed = 0;
    std::size_t heuristic_random_starts = 32;
};

struct SearchResult {
    double maximum;
    MonotoneFunction witness;
    std::uint64_t candidates;  // objective evaluations
    bool exhaustive;           // false: coordinate-ascent heuristic
};

/// Number of non-decreasing tuples of length m over {0, ..., g}, i.e.
/// C(g + m, m); saturates at UINT64_MAX.
std::uint64_t staircase_grid_size(std::size_t m, std::size_t g) noexcept;

/// Maximizes objective over staircases with m pieces and levels in
/// {0, 1/g, ..., 1}. Exhaustive search visits tuples in lexicographic order
/// and keeps the first maximizer.
SearchResult maximize_over_staircases(std::size_t m, std::size_t g,
                                      const std::function<double(const MonotoneFunction&)>& objective,
                                      const SearchOptions& options = {});

SearchResult brute_force_max_variance(const EstimatorSpec& spec, std::size_t m, std::size_t g,
                                      const SearchOptions& options = {});

/// max |S(f) - trapezoid(f, n)| over the (m, g) staircase grid.
SearchResult brute_force_max_trapezoid_error(std::size_t n, std::size_t m, std::size_t g,
                                             const SearchOptions& options = {});

/// One replication: estimate from a fresh stream.
using EstimatorFn = std::function<double(const MonotoneFunction&, RngStream&)>;

EstimatorFn estimator_fn(const EstimatorSpec& spec);

/// Estimates for replications 0..R-1 (replication r uses stream r). The
/// result does not depend on the number of worker threads.
std::vector<double> replicate(const EstimatorFn& estimator, const MonotoneFunction& f, std::uint64_t replications,
                              std::uint64_t seed, unsigned jobs = 1);

/// Order-fixed pairwise sum.
double pairwise_sum(std::span<const double> values) noexcept;

struct SampleSummary {
    double mean;
    double variance;  // unbiased (R - 1) denominator; 0 when R = 1
    double standard_error;
};

SampleSummary summarize(std::span<const double> values);

/// (mean |target - e|^p)^(1/p) with a delta-method standard error.
struct LpError {
    double value;
    double standard_error;
};

LpError lp_error(std::span<const double> estimates, double target, double p);

struct ExperimentConfig {
    EstimatorSpec estimator;
    MonotoneFunction function;
    std::uint64_t replications = 1;
    std::uint64_t seed = 0;
    double p = 2.0;
};

void validate(const ExperimentConfig& config);

struct Report {
    double empirical_mean;
    double empirical_variance;
    double empirical_lp_error;
    double lp_standard_error;
    double exact_integral;
    std::optional<double> exact_variance;
    double standard_error;
    std::uint64_t replications;
    double p;
    double wall_time_seconds;
};

Report run_experiment(const ExperimentConfig& config, unsigned jobs = 1);

struct UnbiasednessCheck {
    bool pass;
    double z_score;
    double empirical_mean;
    double exact_integral;
    double standard_error;
};

/// Pass iff |mean - S(f)| <= 4 standard errors.
UnbiasednessCheck verify_unbiasedness(const EstimatorFn& estimator, const MonotoneFunction& f,
                                      std::uint64_t replications, std::uint64_t seed, unsigned jobs = 1);
UnbiasednessCheck verify_unbiasedness(const EstimatorSpec& spec, const MonotoneFunction& f,
                                      std::uint64_t replications, std::uint64_t seed, unsigned jobs = 1);

LpError empirical_lp_error(const EstimatorSpec& spec, const MonotoneFunction& f, double p,
                           std::uint64_t replications, std::uint64_t seed, unsigned jobs = 1);

}  // namespace monoquad
