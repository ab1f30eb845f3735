#include "monoquad/function_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "monoquad/errors.hpp"

namespace monoquad {
namespace {

constexpr std::size_t kPresetCheckPoints = 1001;

double logistic(double t) noexcept { return 1.0 / (1.0 + std::exp(-t)); }

double eval_preset(const AnalyticPreset& p, double x) noexcept {
    switch (p.id) {
    case PresetId::identity:
        return x;
    case PresetId::square:
        return x * x;
    case PresetId::sqrt:
        return std::sqrt(x);
    case PresetId::logistic: {
        const double lo = logistic(-p.steepness * p.center);
        const double hi = logistic(p.steepness * (1.0 - p.center));
        const double v = (logistic(p.steepness * (x - p.center)) - lo) / (hi - lo);
        return std::clamp(v, 0.0, 1.0);
    }
    }
    return 0.0;
}

template <class F>
double quadrature(F&& g, double a, double b) {
    if (b <= a) return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 31>::integrate(g, a, b, 20, 1e-13);
}

double cell_lower(std::size_t k, std::size_t m) noexcept {
    return static_cast<double>(k - 1) / static_cast<double>(m);
}

double cell_upper(std::size_t k, std::size_t m) noexcept {
    return static_cast<double>(k) / static_cast<double>(m);
}

double overlap(double a, double b, double lo, double hi) noexcept {
    return std::max(0.0, std::min(b, hi) - std::max(a, lo));
}

void check_unit_value(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream msg;
        msg << what << " must lie in [0, 1], got " << v;
        throw InvariantError(msg.str());
    }
}

void check_interval(double a, double b) {
    if (!(a >= 0.0 && b <= 1.0 && a < b)) {
        std::ostringstream msg;
        msg << "degenerate or out-of-range interval [" << a << ", " << b << "]";
        throw DomainError(msg.str());
    }
}

// Integral of f^power (power 1 or 2) over [a, b].
double power_integral(const MonotoneFunction& f, double a, double b, int power) {
    return std::visit(
        [&](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, UnitStep>) {
                return overlap(a, b, r.x0, 1.0);
            } else if constexpr (std::is_same_v<T, Staircase>) {
                const std::size_t m = r.pieces();
                double sum = 0.0;
                for (std::size_t k = 1; k <= m; ++k) {
                    const double len = overlap(a, b, cell_lower(k, m), cell_upper(k, m));
                    if (len == 0.0) continue;
                    const double alpha = r.alphas[k - 1];
                    sum += (power == 1 ? alpha : alpha * alpha) * len;
                }
                return sum;
            } else {
                return quadrature(
                    [&](double x) {
                        const double v = eval_preset(r, x);
                        return power == 1 ? v : v * v;
                    },
                    a, b);
            }
        },
        f.representation());
}

}  // namespace

std::string_view to_string(PresetId id) noexcept {
    switch (id) {
    case PresetId::identity:
        return "identity";
    case PresetId::square:
        return "square";
    case PresetId::sqrt:
        return "sqrt";
    case PresetId::logistic:
        return "logistic";
    }
    return "unknown";
}

PresetId preset_from_string(std::string_view name) {
    if (name == "identity") return PresetId::identity;
    if (name == "square") return PresetId::square;
    if (name == "sqrt") return PresetId::sqrt;
    if (name == "logistic") return PresetId::logistic;
    throw ParseError("unknown preset id '" + std::string(name) + "'");
}

double Moments::variance() const noexcept {
    // Rounding can push m2 - mean^2 a few ulps below zero for 0/1 functions.
    return std::max(0.0, mean_square - mean * mean);
}

MonotoneFunction MonotoneFunction::unit_step(double x0) {
    check_unit_value(x0, "unit step jump location");
    return MonotoneFunction(UnitStep{x0});
}

MonotoneFunction MonotoneFunction::staircase(std::vector<double> alphas) {
    if (alphas.empty()) throw InvariantError("staircase needs at least one piece");
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        check_unit_value(alphas[k], "staircase level");
        if (k > 0 && alphas[k] < alphas[k - 1]) {
            std::ostringstream msg;
            msg << "staircase levels must be non-decreasing (alpha_" << k << " = " << alphas[k - 1]
                << " > alpha_" << k + 1 << " = " << alphas[k] << ")";
            throw InvariantError(msg.str());
        }
    }
    return MonotoneFunction(Staircase{std::move(alphas)});
}

MonotoneFunction MonotoneFunction::constant(double value, std::size_t pieces) {
    return staircase(std::vector<double>(std::max<std::size_t>(pieces, 1), value));
}

MonotoneFunction MonotoneFunction::preset(PresetId id, double steepness, double center) {
    if (id == PresetId::logistic && !(steepness > 0.0 && std::isfinite(steepness) && std::isfinite(center))) {
        throw InvariantError("logistic preset needs a finite positive steepness and finite center");
    }
    const AnalyticPreset p{id, steepness, center};
    double prev = 0.0;
    for (std::size_t i = 0; i < kPresetCheckPoints; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(kPresetCheckPoints - 1);
        const double v = eval_preset(p, x);
        check_unit_value(v, "preset value");
        if (i > 0 && v < prev) throw InvariantError("preset is not non-decreasing on the check grid");
        prev = v;
    }
    return MonotoneFunction(p);
}

MonotoneFunction MonotoneFunction::from(Variant v) {
    return std::visit(
        [](auto&& r) -> MonotoneFunction {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, UnitStep>) {
                return unit_step(r.x0);
            } else if constexpr (std::is_same_v<T, Staircase>) {
                return staircase(std::move(r.alphas));
            } else {
                return preset(r.id, r.steepness, r.center);
            }
        },
        std::move(v));
}

double MonotoneFunction::operator()(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) {
        std::ostringstream msg;
        msg << "evaluation point " << x << " outside [0, 1]";
        throw DomainError(msg.str());
    }
    return eval_unchecked(x);
}

double MonotoneFunction::eval_unchecked(double x) const noexcept {
    return std::visit(
        [x](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, UnitStep>) {
                return x >= r.x0 ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, Staircase>) {
                return r.alphas[staircase_cell(x, r.pieces()) - 1];
            } else {
                return eval_preset(r, x);
            }
        },
        repr_);
}

std::string MonotoneFunction::describe() const {
    std::ostringstream out;
    out.precision(12);
    std::visit(
        [&out](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, UnitStep>) {
                out << "unit_step(x0=" << r.x0 << ")";
            } else if constexpr (std::is_same_v<T, Staircase>) {
                out << "staircase[";
                for (std::size_t k = 0; k < r.alphas.size(); ++k) out << (k ? ", " : "") << r.alphas[k];
                out << "]";
            } else {
                out << "preset(" << to_string(r.id);
                if (r.id == PresetId::logistic) out << ", steepness=" << r.steepness << ", center=" << r.center;
                out << ")";
            }
        },
        repr_);
    return out.str();
}

std::size_t staircase_cell(double x, std::size_t m) noexcept {
    if (m <= 1 || x <= 0.0) return 1;
    const double scaled = std::ceil(x * static_cast<double>(m));
    std::size_t k = scaled < 1.0 ? 1 : std::min(m, static_cast<std::size_t>(scaled));
    // x * m rounds; settle against the boundaries as the doubles j / m.
    while (k > 1 && x <= cell_lower(k, m)) --k;
    while (k < m && x > cell_upper(k, m)) ++k;
    return k;
}

bool as_unit_step(const MonotoneFunction& f, double& x0) noexcept {
    if (const auto* step = std::get_if<UnitStep>(&f.representation())) {
        x0 = step->x0;
        return true;
    }
    if (const auto* st = std::get_if<Staircase>(&f.representation())) {
        std::size_t zeros = 0;
        for (double a : st->alphas) {
            if (a == 0.0) {
                ++zeros;
            } else if (a != 1.0) {
                return false;
            }
        }
        x0 = static_cast<double>(zeros) / static_cast<double>(st->pieces());
        return true;
    }
    return false;
}

double exact_integral(const MonotoneFunction& f) {
    return std::visit(
        [&f](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, UnitStep>) {
                return 1.0 - r.x0;
            } else if constexpr (std::is_same_v<T, Staircase>) {
                double sum = 0.0;
                for (double a : r.alphas) sum += a;
                return sum / static_cast<double>(r.pieces());
            } else {
                return power_integral(f, 0.0, 1.0, 1);
            }
        },
        f.representation());
}

double integral_on_interval(const MonotoneFunction& f, double a, double b) {
    if (!(a >= 0.0 && b <= 1.0 && a <= b)) {
        std::ostringstream msg;
        msg << "interval [" << a << ", " << b << "] not inside [0, 1]";
        throw DomainError(msg.str());
    }
    return power_integral(f, a, b, 1);
}

Moments moments_on_interval(const MonotoneFunction& f, double a, double b) {
    check_interval(a, b);
    const double len = b - a;
    if (f.is_unit_step()) {
        const double mean = power_integral(f, a, b, 1) / len;
        return {mean, mean};
    }
    return {power_integral(f, a, b, 1) / len, power_integral(f, a, b, 2) / len};
}

MonotoneFunction project_staircase(const MonotoneFunction& f, std::size_t m) {
    if (m < 1) throw InvariantError("projection needs m >= 1");
    std::vector<double> alphas(m);
    double running = 0.0;
    for (std::size_t k = 1; k <= m; ++k) {
        const double avg = moments_on_interval(f, cell_lower(k, m), cell_upper(k, m)).mean;
        // Cell averages of a monotone f are monotone; this only absorbs rounding.
        running = std::clamp(std::max(running, avg), 0.0, 1.0);
        alphas[k - 1] = running;
    }
    return MonotoneFunction::staircase(std::move(alphas));
}

double variance_of_residual(const MonotoneFunction& f) {
    return std::visit(
        [&f](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, UnitStep>) {
                // f(X) - X = -X on [0, x0), 1 - X on [x0, 1].
                const double x0 = r.x0;
                const double mean = 0.5 - x0;
                const double second = (x0 * x0 * x0 + (1.0 - x0) * (1.0 - x0) * (1.0 - x0)) / 3.0;
                return std::max(0.0, second - mean * mean);
            } else if constexpr (std::is_same_v<T, Staircase>) {
                const std::size_t m = r.pieces();
                double level_sum = 0.0;
                double second = 0.0;
                for (std::size_t k = 1; k <= m; ++k) {
                    const double alpha = r.alphas[k - 1];
                    const double lo = alpha - cell_lower(k, m);
                    const double hi = alpha - cell_upper(k, m);
                    level_sum += alpha;
                    second += (lo * lo * lo - hi * hi * hi) / 3.0;
                }
                const double mean = level_sum / static_cast<double>(m) - 0.5;
                return std::max(0.0, second - mean * mean);
            } else {
                const double ef = power_integral(f, 0.0, 1.0, 1);
                const double ef2 = power_integral(f, 0.0, 1.0, 2);
                const double exf = quadrature([&r](double x) { return x * eval_preset(r, x); }, 0.0, 1.0);
                const double mean = ef - 0.5;
                return std::max(0.0, ef2 - 2.0 * exf + 1.0 / 3.0 - mean * mean);
            }
        },
        f.representation());
}

}  // namespace monoquad
