#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mimoarq {

/// Lookup of a named entity (code, protocol) that does not exist.
class NotFound : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A request whose enumeration cost exceeds the configured budget.
class WorkBudgetExceeded : public std::runtime_error {
public:
    WorkBudgetExceeded(std::uint64_t required, std::uint64_t budget)
        : std::runtime_error("work budget exceeded: " + std::to_string(required) +
                             " elementary terms required, budget is " + std::to_string(budget)),
          required_(required), budget_(budget) {}

    std::uint64_t required() const { return required_; }
    std::uint64_t budget() const { return budget_; }

private:
    std::uint64_t required_;
    std::uint64_t budget_;
};

/// Raised when a numerical construction violates an invariant it should
/// hold by construction (e.g. a covariance that is not PSD).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace mimoarq
