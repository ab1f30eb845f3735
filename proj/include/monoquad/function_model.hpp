#pragma once

/**
 * @file function_model.hpp
 * @brief Non-decreasing functions [0,1] -> [0,1] with exact moments.
 *
 * Three representations are supported:
 *
 *   UnitStep   f = 1 on [x0, 1], 0 on [0, x0)
 *   Staircase  f = alpha_k on ((k-1)/m, k/m], with f(0) = alpha_1
 *   Preset     smooth test functions (identity, square, sqrt, logistic)
 *
 * Step and staircase functions have closed-form integrals and moments.
 * Presets go through adaptive Gauss-Kronrod quadrature; every integrand
 * needed here (f, f^2, x f) is monotone on [0,1], which the tests exploit
 * to bracket the quadrature with exact lower/upper Riemann sums.
 */

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace monoquad {

/// Absolute tolerance for preset quadrature.
inline constexpr double kQuadratureTolerance = 1e-10;

struct UnitStep {
    double x0;
};

struct Staircase {
    std::vector<double> alphas;

    std::size_t pieces() const noexcept { return alphas.size(); }
};

enum class PresetId { identity, square, sqrt, logistic };

struct AnalyticPreset {
    PresetId id;
    // Only used by the logistic preset, which is rescaled so that f(0) = 0
    // and f(1) = 1.
    double steepness = 10.0;
    double center = 0.5;
};

std::string_view to_string(PresetId id) noexcept;
PresetId preset_from_string(std::string_view name);  // throws ParseError

/// Mean and mean-of-square of f(U) for U uniform on an interval.
struct Moments {
    double mean;
    double mean_square;

    double variance() const noexcept;
};

class MonotoneFunction {
public:
    using Variant = std::variant<UnitStep, Staircase, AnalyticPreset>;

    // The factories validate the range and monotonicity invariants and
    // throw InvariantError on violation.
    static MonotoneFunction unit_step(double x0);
    static MonotoneFunction staircase(std::vector<double> alphas);
    static MonotoneFunction constant(double value, std::size_t pieces = 1);
    static MonotoneFunction preset(PresetId id, double steepness = 10.0, double center = 0.5);
    static MonotoneFunction from(Variant v);

    const Variant& representation() const noexcept { return repr_; }

    bool is_unit_step() const noexcept { return std::holds_alternative<UnitStep>(repr_); }
    bool is_staircase() const noexcept { return std::holds_alternative<Staircase>(repr_); }
    bool is_preset() const noexcept { return std::holds_alternative<AnalyticPreset>(repr_); }

    /// Piecewise-exact (no quadrature) moments available.
    bool has_exact_moments() const noexcept { return !is_preset(); }

    /// f(x); throws DomainError outside [0, 1].
    double operator()(double x) const;

    /// Same as operator() without the domain check.
    double eval_unchecked(double x) const noexcept;

    std::string describe() const;

private:
    explicit MonotoneFunction(Variant v) : repr_(std::move(v)) {}

    Variant repr_;
};

inline double eval(const MonotoneFunction& f, double x) { return f(x); }

/// S(f), the integral over [0, 1].
double exact_integral(const MonotoneFunction& f);

/// Integral of f over [a, b], 0 <= a <= b <= 1.
double integral_on_interval(const MonotoneFunction& f, double a, double b);

/// Moments of f(U), U ~ Uniform[a, b]. Throws DomainError unless 0 <= a < b <= 1.
Moments moments_on_interval(const MonotoneFunction& f, double a, double b);

/// Cell averages of f on m equal cells (the averaging projection onto F_m).
MonotoneFunction project_staircase(const MonotoneFunction& f, std::size_t m);

/// Var(f(X) - X) for X ~ Uniform[0, 1].
double variance_of_residual(const MonotoneFunction& f);

/// 1-based cell index k with x in ((k-1)/m, k/m]; x = 0 maps to cell 1.
std::size_t staircase_cell(double x, std::size_t m) noexcept;

/// If f is a 0/1 staircase or a unit step, the equivalent jump location.
bool as_unit_step(const MonotoneFunction& f, double& x0) noexcept;

}  // namespace monoquad
