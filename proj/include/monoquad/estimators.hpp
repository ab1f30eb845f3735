#pragma once

#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

#include "monoquad/function_model.hpp"
#include "monoquad/rng.hpp"

namespace monoquad {

/// Strata I_k = [x_{k-1}, x_k] with per-stratum sample counts n_k >= 1.
class StrataSpec {
public:
    StrataSpec(std::vector<double> boundaries, std::vector<std::size_t> allocation);

    std::size_t size() const noexcept { return allocation_.size(); }
    const std::vector<double>& boundaries() const noexcept { return boundaries_; }
    const std::vector<std::size_t>& allocation() const noexcept { return allocation_; }

    // 0-based stratum index.
    double lower(std::size_t k) const noexcept { return boundaries_[k]; }
    double upper(std::size_t k) const noexcept { return boundaries_[k + 1]; }
    double weight(std::size_t k) const noexcept { return boundaries_[k + 1] - boundaries_[k]; }
    std::size_t count(std::size_t k) const noexcept { return allocation_[k]; }

    /// Total budget n = sum of n_k.
    std::size_t budget() const noexcept;

    friend bool operator==(const StrataSpec&, const StrataSpec&) = default;

private:
    std::vector<double> boundaries_;
    std::vector<std::size_t> allocation_;
};

struct SimpleMC {
    std::size_t n;
};
struct ControlVariate {
    std::size_t n;
};
struct Stratified {
    StrataSpec strata;
};
struct Trapezoid {
    std::size_t n;
};

enum class EstimatorKind { simple_mc, control_variate, stratified, trapezoid };

std::string_view to_string(EstimatorKind kind) noexcept;

/// One concrete nonsequential method: a point distribution plus the map
/// from (points, values) to an estimate.
class EstimatorSpec {
public:
    using Variant = std::variant<SimpleMC, ControlVariate, Stratified, Trapezoid>;

    static EstimatorSpec simple_mc(std::size_t n);
    static EstimatorSpec control_variate(std::size_t n);
    static EstimatorSpec stratified(StrataSpec strata);
    static EstimatorSpec trapezoid(std::size_t n);

    const Variant& method() const noexcept { return method_; }
    EstimatorKind kind() const noexcept { return static_cast<EstimatorKind>(method_.index()); }
    std::size_t sample_size() const noexcept;
    bool randomized() const noexcept { return kind() != EstimatorKind::trapezoid; }

    std::string describe() const;

private:
    explicit EstimatorSpec(Variant v) : method_(std::move(v)) {}

    Variant method_;
};

/// (1/n) sum f(X_i), X_i iid uniform.
double simple_mc(const MonotoneFunction& f, std::size_t n, RngStream& rng);

/// (1/n) sum (f(X_i) - X_i) + 1/2. Not clamped to [0, 1].
double control_variate(const MonotoneFunction& f, std::size_t n, RngStream& rng);

/// sum_k w_k (1/n_k) sum_i f(X_{k,i}), X_{k,i} = x_{k-1} + w_k U. Strata are
/// sampled in order, one uniform per point.
double stratified(const MonotoneFunction& f, const StrataSpec& strata, RngStream& rng);

/// Trapezoid-type rule: nodes i/(n+1), assumed f(0) = 0 and f(1) = 1.
double trapezoid(const MonotoneFunction& f, std::size_t n);

double estimate(const EstimatorSpec& spec, const MonotoneFunction& f, RngStream& rng);

/// The evaluation points the estimator would use with this stream, drawn
/// in the same order as estimate().
std::vector<double> sample_points(const EstimatorSpec& spec, RngStream& rng);

}  // namespace monoquad
