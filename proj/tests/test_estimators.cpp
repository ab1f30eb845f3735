#include <gtest/gtest.h>

#include <cmath>

#include "monoquad/analysis.hpp"
#include "monoquad/errors.hpp"
#include "monoquad/estimators.hpp"
#include "monoquad/oracle.hpp"
#include "test_support.hpp"

using namespace monoquad;

namespace {

std::vector<EstimatorSpec> randomized_specs() {
    return {
        EstimatorSpec::simple_mc(8),
        EstimatorSpec::control_variate(8),
        EstimatorSpec::stratified(optimal_strata(8)),
        EstimatorSpec::stratified(StrataSpec({0.0, 0.3, 1.0}, {2, 3})),
    };
}

}  // namespace

TEST(StrataSpec, ValidatesBoundariesAndAllocation) {
    EXPECT_NO_THROW(StrataSpec({0.0, 0.5, 1.0}, {1, 3}));
    EXPECT_THROW(StrataSpec({0.0, 0.5, 0.5, 1.0}, {1, 1, 1}), InvariantError);
    EXPECT_THROW(StrataSpec({0.0, 0.6, 0.4, 1.0}, {1, 1, 1}), InvariantError);
    EXPECT_THROW(StrataSpec({0.1, 0.5, 1.0}, {1, 1}), InvariantError);
    EXPECT_THROW(StrataSpec({0.0, 0.5, 0.9}, {1, 1}), InvariantError);
    EXPECT_THROW(StrataSpec({0.0, 0.5, 1.0}, {1, 0}), InvariantError);
    EXPECT_THROW(StrataSpec({0.0, 0.5, 1.0}, {1}), InvariantError);
    EXPECT_THROW(StrataSpec({0.0}, {}), InvariantError);

    const StrataSpec s({0.0, 0.25, 1.0}, {2, 5});
    EXPECT_EQ(s.budget(), 7u);
    EXPECT_DOUBLE_EQ(s.weight(0), 0.25);
    EXPECT_DOUBLE_EQ(s.weight(1), 0.75);
}

TEST(EstimatorSpec, RejectsZeroSampleSize) {
    EXPECT_THROW(EstimatorSpec::simple_mc(0), InvariantError);
    EXPECT_THROW(EstimatorSpec::control_variate(0), InvariantError);
    EXPECT_THROW(EstimatorSpec::trapezoid(0), InvariantError);
    EXPECT_EQ(EstimatorSpec::stratified(StrataSpec({0.0, 0.5, 1.0}, {1, 3})).sample_size(), 4u);
}

TEST(SimpleMC, ConstantOneIsExact) {
    const auto one = MonotoneFunction::constant(1.0, 3);
    for (std::uint64_t seed : {0u, 1u, 99u}) {
        RngStream rng(seed, 0);
        EXPECT_EQ(simple_mc(one, 17, rng), 1.0);
    }
}

TEST(SimpleMC, LargeSampleWithinCltBand) {
    constexpr std::size_t n = 1'000'000;
    RngStream a(123, 0);
    EXPECT_NEAR(simple_mc(MonotoneFunction::unit_step(0.5), n, a), 0.5, 4.0 / (2.0 * std::sqrt(double(n))));
    RngStream b(123, 1);
    EXPECT_NEAR(simple_mc(MonotoneFunction::preset(PresetId::identity), n, b), 0.5,
                4.0 * std::sqrt(1.0 / (12.0 * n)));
}

TEST(ControlVariate, IdentityHasZeroVariance) {
    const auto id = MonotoneFunction::preset(PresetId::identity);
    for (std::size_t n : {1u, 2u, 10u, 1000u}) {
        RngStream rng(n, 3);
        EXPECT_EQ(control_variate(id, n, rng), 0.5);
    }
}

TEST(ControlVariate, LargeSampleWithinCltBand) {
    constexpr std::size_t n = 1'000'000;
    RngStream rng(77, 0);
    EXPECT_NEAR(control_variate(MonotoneFunction::unit_step(0.5), n, rng), 0.5, 4.0 * std::sqrt(1.0 / (12.0 * n)));
}

TEST(ControlVariate, DiffersFromSimpleMCByMeanOfUniforms) {
    const auto f = MonotoneFunction::unit_step(0.5);
    constexpr std::size_t n = 1000;
    RngStream a(5, 9);
    RngStream b(5, 9);
    RngStream c(5, 9);
    const double mc = simple_mc(f, n, a);
    const double cv = control_variate(f, n, b);
    double mean_u = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean_u += c.uniform();
    mean_u /= n;
    EXPECT_NEAR(mc - cv, mean_u - 0.5, 1e-12);
}

TEST(Stratified, ConstantIsReproduced) {
    for (std::size_t n : {1u, 3u, 7u, 64u}) {
        const auto strata = optimal_strata(n);
        for (double c : {0.0, 0.5, 1.0}) {
            RngStream rng(n, 0);
            EXPECT_EQ(stratified(MonotoneFunction::constant(c), strata, rng), c);
        }
        RngStream rng(n, 1);
        EXPECT_NEAR(stratified(MonotoneFunction::constant(0.3), strata, rng), 0.3, 1e-15);
    }
}

TEST(Stratified, JumpAtStratumBoundaryHasZeroVariance) {
    const StrataSpec strata({0.0, 0.5, 1.0}, {1, 1});
    const auto f = MonotoneFunction::unit_step(0.5);
    for (std::uint64_t r = 0; r < 10'000; ++r) {
        RngStream rng(31, r);
        ASSERT_EQ(stratified(f, strata, rng), 0.5);
    }
}

TEST(Stratified, LatinHypercubeVarianceAtMidStratumJump) {
    const auto spec = EstimatorSpec::stratified(optimal_strata(4));
    const auto estimates = replicate(estimator_fn(spec), MonotoneFunction::unit_step(0.375), 1'000'000, 2, 1);
    const auto s = summarize(estimates);
    EXPECT_NEAR(s.variance, 1.0 / 64.0, 0.01 / 64.0);
}

TEST(Stratified, SingleStratumReproducesSimpleMC) {
    const StrataSpec one({0.0, 1.0}, {9});
    for (const auto& f : monoquad::testing::fixture_functions()) {
        for (std::uint64_t r = 0; r < 50; ++r) {
            RngStream a(4, r);
            RngStream b(4, r);
            ASSERT_EQ(stratified(f, one, a), simple_mc(f, 9, b)) << f.describe();
        }
    }
}

TEST(Trapezoid, Examples) {
    EXPECT_DOUBLE_EQ(trapezoid(MonotoneFunction::preset(PresetId::identity), 3), 0.5);
    EXPECT_DOUBLE_EQ(trapezoid(MonotoneFunction::constant(0.5), 4), 0.5);
    for (double eps : {1e-2, 1e-4, 1e-8}) {
        const auto f = MonotoneFunction::unit_step(0.5 + eps);
        EXPECT_DOUBLE_EQ(trapezoid(f, 1), 0.25);
        EXPECT_NEAR(exact_integral(f) - trapezoid(f, 1), 0.25 - eps, 1e-15);
    }
}

TEST(Estimators, DeterministicGivenStream) {
    for (const auto& spec : randomized_specs()) {
        for (const auto& f : monoquad::testing::fixture_functions()) {
            RngStream a(17, 3);
            RngStream b(17, 3);
            ASSERT_EQ(estimate(spec, f, a), estimate(spec, f, b));
        }
    }
}

TEST(Estimators, EstimatesStayInRange) {
    std::vector<EstimatorSpec> specs = randomized_specs();
    specs.push_back(EstimatorSpec::simple_mc(1));
    specs.push_back(EstimatorSpec::control_variate(1));
    for (const auto& spec : specs) {
        const bool cv = spec.kind() == EstimatorKind::control_variate;
        for (const auto& f : monoquad::testing::fixture_functions()) {
            for (std::uint64_t r = 0; r < 2000; ++r) {
                RngStream rng(8, r);
                const double e = estimate(spec, f, rng);
                ASSERT_GE(e, cv ? -0.5 : 0.0);
                ASSERT_LE(e, cv ? 1.5 : 1.0);
            }
        }
    }
    for (const auto& f : monoquad::testing::fixture_functions()) {
        const double t = trapezoid(f, 5);
        EXPECT_GE(t, 0.0);
        EXPECT_LE(t, 1.0);
    }
}

TEST(Estimators, SamplePointsMatchEstimateDraws) {
    const auto f = MonotoneFunction::preset(PresetId::sqrt);
    for (const auto& spec : randomized_specs()) {
        RngStream a(3, 14);
        RngStream b(3, 14);
        const auto points = sample_points(spec, a);
        const double e = estimate(spec, f, b);
        ASSERT_EQ(points.size(), spec.sample_size());
        EXPECT_EQ(a.position(), b.position());

        double recomputed = 0.0;
        if (const auto* st = std::get_if<Stratified>(&spec.method())) {
            std::size_t idx = 0;
            for (std::size_t k = 0; k < st->strata.size(); ++k) {
                double sum = 0.0;
                for (std::size_t i = 0; i < st->strata.count(k); ++i) {
                    const double x = points[idx++];
                    EXPECT_GE(x, st->strata.lower(k));
                    EXPECT_LE(x, st->strata.upper(k));
                    sum += f(x);
                }
                recomputed += st->strata.weight(k) * (sum / st->strata.count(k));
            }
        } else {
            const bool cv = spec.kind() == EstimatorKind::control_variate;
            for (double x : points) recomputed += f(x) - (cv ? x : 0.0);
            recomputed = recomputed / points.size() + (cv ? 0.5 : 0.0);
        }
        EXPECT_EQ(recomputed, e) << spec.describe();
    }

    RngStream rng(0, 0);
    const auto nodes = sample_points(EstimatorSpec::trapezoid(3), rng);
    EXPECT_EQ(nodes, (std::vector<double>{0.25, 0.5, 0.75}));
}
