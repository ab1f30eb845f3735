#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace monoquad {

// Malformed input: bad JSON, unknown kinds, missing or mistyped fields.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A well-formed value that violates a documented invariant (n = 0,
// non-monotone staircase, strata out of order, ...).
class InvariantError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Evaluation outside [0, 1] or on a degenerate interval.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Exhaustive search would visit more candidates than allowed.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(std::uint64_t candidates, std::uint64_t cap)
        : std::runtime_error("enumeration needs " + std::to_string(candidates) +
                             " candidates, cap is " + std::to_string(cap)),
          candidates_(candidates),
          cap_(cap) {}

    std::uint64_t candidates() const noexcept { return candidates_; }
    std::uint64_t cap() const noexcept { return cap_; }

private:
    std::uint64_t candidates_;
    std::uint64_t cap_;
};

}  // namespace monoquad
