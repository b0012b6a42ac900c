#pragma once

#include <stdexcept>
#include <string>

namespace chaingrade {

// A problem document failed syntax, schema, or semantic validation.
class SpecError : public std::runtime_error {
public:
    explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

// The requested maximal-chain enumeration exceeds the configured budget.
class BudgetExceededError : public std::runtime_error {
public:
    explicit BudgetExceededError(const std::string& what) : std::runtime_error(what) {}
};

// A constrained problem has an empty feasible domain.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative solver hit its iteration cap before reaching tolerance.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chaingrade
