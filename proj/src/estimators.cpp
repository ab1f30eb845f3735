#include "monoquad/estimators.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "monoquad/errors.hpp"

namespace monoquad {
namespace {

void require_sample_size(std::size_t n) {
    if (n < 1) throw InvariantError("sample size n must be >= 1");
}

}  // namespace

StrataSpec::StrataSpec(std::vector<double> boundaries, std::vector<std::size_t> allocation)
    : boundaries_(std::move(boundaries)), allocation_(std::move(allocation)) {
    if (boundaries_.size() < 2) throw InvariantError("strata need at least two boundaries");
    if (allocation_.size() + 1 != boundaries_.size()) {
        throw InvariantError("strata need one allocation entry per stratum (K boundaries + 1)");
    }
    if (boundaries_.front() != 0.0 || boundaries_.back() != 1.0) {
        throw InvariantError("strata boundaries must start at 0 and end at 1");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < allocation_.size(); ++k) {
        if (!(boundaries_[k] < boundaries_[k + 1])) {
            std::ostringstream msg;
            msg << "strata boundaries must be strictly increasing (x_" << k << " = " << boundaries_[k]
                << ", x_" << k + 1 << " = " << boundaries_[k + 1] << ")";
            throw InvariantError(msg.str());
        }
        // n_k = 0 leaves a stratum of positive width unsampled.
        if (allocation_[k] < 1) throw InvariantError("every stratum needs n_k >= 1");
        total += weight(k);
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvariantError("strata weights must sum to 1");
}

std::size_t StrataSpec::budget() const noexcept {
    return std::accumulate(allocation_.begin(), allocation_.end(), std::size_t{0});
}

std::string_view to_string(EstimatorKind kind) noexcept {
    switch (kind) {
    case EstimatorKind::simple_mc:
        return "simple_mc";
    case EstimatorKind::control_variate:
        return "control_variate";
    case EstimatorKind::stratified:
        return "stratified";
    case EstimatorKind::trapezoid:
        return "trapezoid";
    }
    return "unknown";
}

EstimatorSpec EstimatorSpec::simple_mc(std::size_t n) {
    require_sample_size(n);
    return EstimatorSpec(SimpleMC{n});
}

EstimatorSpec EstimatorSpec::control_variate(std::size_t n) {
    require_sample_size(n);
    return EstimatorSpec(ControlVariate{n});
}

EstimatorSpec EstimatorSpec::stratified(StrataSpec strata) {
    return EstimatorSpec(Stratified{std::move(strata)});
}

EstimatorSpec EstimatorSpec::trapezoid(std::size_t n) {
    require_sample_size(n);
    return EstimatorSpec(Trapezoid{n});
}

std::size_t EstimatorSpec::sample_size() const noexcept {
    return std::visit(
        [](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Stratified>) {
                return m.strata.budget();
            } else {
                return m.n;
            }
        },
        method_);
}

std::string EstimatorSpec::describe() const {
    std::ostringstream out;
    out << to_string(kind());
    if (const auto* st = std::get_if<Stratified>(&method_)) {
        out << "(K=" << st->strata.size() << ", n=" << st->strata.budget() << ")";
    } else {
        out << "(n=" << sample_size() << ")";
    }
    return out.str();
}

double simple_mc(const MonotoneFunction& f, std::size_t n, RngStream& rng) {
    require_sample_size(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += f.eval_unchecked(rng.uniform());
    return sum / static_cast<double>(n);
}

double control_variate(const MonotoneFunction& f, std::size_t n, RngStream& rng) {
    require_sample_size(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform();
        sum += f.eval_unchecked(x) - x;
    }
    return sum / static_cast<double>(n) + 0.5;
}

double stratified(const MonotoneFunction& f, const StrataSpec& strata, RngStream& rng) {
    double total = 0.0;
    for (std::size_t k = 0; k < strata.size(); ++k) {
        const double lo = strata.lower(k);
        const double w = strata.weight(k);
        const std::size_t nk = strata.count(k);
        double sum = 0.0;
        for (std::size_t i = 0; i < nk; ++i) sum += f.eval_unchecked(lo + w * rng.uniform());
        total += w * (sum / static_cast<double>(nk));
    }
    return total;
}

double trapezoid(const MonotoneFunction& f, std::size_t n) {
    require_sample_size(n);
    const double denom = static_cast<double>(n + 1);
    double sum = 0.0;
    for (std::size_t i = 1; i <= n; ++i) sum += f.eval_unchecked(static_cast<double>(i) / denom);
    return (sum + 0.5) / denom;
}

double estimate(const EstimatorSpec& spec, const MonotoneFunction& f, RngStream& rng) {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SimpleMC>) {
                return simple_mc(f, m.n, rng);
            } else if constexpr (std::is_same_v<T, ControlVariate>) {
                return control_variate(f, m.n, rng);
            } else if constexpr (std::is_same_v<T, Stratified>) {
                return stratified(f, m.strata, rng);
            } else {
                return trapezoid(f, m.n);
            }
        },
        spec.method());
}

std::vector<double> sample_points(const EstimatorSpec& spec, RngStream& rng) {
    std::vector<double> points;
    points.reserve(spec.sample_size());
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Stratified>) {
                for (std::size_t k = 0; k < m.strata.size(); ++k) {
                    for (std::size_t i = 0; i < m.strata.count(k); ++i) {
                        points.push_back(m.strata.lower(k) + m.strata.weight(k) * rng.uniform());
                    }
                }
            } else if constexpr (std::is_same_v<T, Trapezoid>) {
                const double denom = static_cast<double>(m.n + 1);
                for (std::size_t i = 1; i <= m.n; ++i) points.push_back(static_cast<double>(i) / denom);
            } else {
                for (std::size_t i = 0; i < m.n; ++i) points.push_back(rng.uniform());
            }
        },
        spec.method());
    return points;
}

}  // namespace monoquad
