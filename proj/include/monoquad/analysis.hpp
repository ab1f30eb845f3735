#pragma once

/**
 * @file analysis.hpp
 * @brief Closed-form worst cases over the class F of non-decreasing
 *        [0,1]-valued functions, minimax lower bounds and the adversarial
 *        construction behind them.
 *
 * Worst-case variances (n = sample size):
 *
 *   simple MC        1/(4n)                    witness: unit step at 1/2
 *   control variate  1/(12n)                   witness: any unit step
 *   stratified       (1/4) max_k w_k^2 / n_k   witness: unit step at the
 *                                              middle of an argmax stratum
 *   trapezoid        squared error 1/(4(n+1)^2)
 *
 * and every nonsequential method has Lp error >= (1/2)^(2+1/p) / n, hence
 * every unbiased one has worst-case variance >= 1/(32 n^2).
 */

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "monoquad/estimators.hpp"
#include "monoquad/function_model.hpp"
#include "monoquad/rng.hpp"

namespace monoquad {

/// A closed-form worst case together with a function attaining it.
struct VarianceCertificate {
    EstimatorSpec spec;
    double worst_case_variance;
    MonotoneFunction witness;
};

double worst_case_var_mc(std::size_t n);
double worst_case_var_cv(std::size_t n);

/// Ties in w_k^2 / n_k resolve to the smallest k.
VarianceCertificate worst_case_var_stratified(const StrataSpec& strata);

/// Maximum over functions whose increments across the strata are the given
/// deltas: (1/4) sum_k w_k^2 delta_k^2 / n_k. Requires delta_k >= 0 and
/// sum delta_k <= 1.
double worst_case_var_stratified_restricted(const StrataSpec& strata, std::span<const double> deltas);

/// Worst-case certificate for any randomized spec. Throws InvariantError for
/// the trapezoid rule, which has no variance.
VarianceCertificate certify_worst_case(const EstimatorSpec& spec);

/// (1/2)^(2 + 1/p) / n.
double lower_bound_lp(std::size_t n, double p);

/// 1 / (32 n^2).
double variance_lower_bound(std::size_t n);

/// K = n equal strata with one point each (1-D Latin hypercube).
StrataSpec optimal_strata(std::size_t n);

struct TrapezoidWorstCase {
    double error;
    double squared_error;
};

TrapezoidWorstCase trapezoid_worst_case(std::size_t n);

/// Draws the evaluation points of one replication.
using PointSampler = std::function<std::vector<double>(RngStream&)>;

PointSampler sampler_for(const EstimatorSpec& spec);

struct AdversarialPair {
    std::size_t n;
    /// 1-based index of the chosen cell among the 2n cells ((j-1)/2n, j/2n].
    std::size_t cell;
    double interval_lower;
    double interval_upper;
    /// f1 = 1 on I and to its right; f2 = 1 only to the right of I.
    MonotoneFunction f1;
    MonotoneFunction f2;
    /// Empirical probability that no point falls in I.
    double miss_probability;
    double miss_standard_error;
    std::vector<double> cell_miss_probabilities;
    std::uint64_t replications;
};

/// Splits [0, 1] into 2n cells, estimates each cell's miss probability over
/// R replications (replication r uses stream r) and builds the pair around
/// the most-missed cell (ties to the smallest index).
AdversarialPair adversarial_pair(std::size_t n, const PointSampler& sampler, std::uint64_t replications,
                                 std::uint64_t seed);

struct BoundReport {
    std::size_t n;
    double p = 2.0;
    double lp_lower_bound;         // (1/2)^(2+1/p) / n at p = 2
    double variance_lower_bound;   // 1 / (32 n^2)
    double mc_worst_case;          // 1 / (4n)
    double cv_worst_case;          // 1 / (12n)
    double lhs_worst_case;         // 1 / (4 n^2)
    double best_unbiased;          // min(cv, lhs)
    double ratio_unbiased;         // best_unbiased / variance_lower_bound
    double trapezoid_squared_error;  // 1 / (4 (n+1)^2)
    double ratio_trapezoid;        // best_unbiased / trapezoid_squared_error
};

/// Exact rational arithmetic for n <= kExactRatioLimit, doubles above.
inline constexpr std::size_t kExactRatioLimit = 1'000'000;

BoundReport bound_report(std::size_t n);
std::vector<BoundReport> ratio_table(std::size_t n_max);

}  // namespace monoquad
