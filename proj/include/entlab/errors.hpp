#pragma once

#include <stdexcept>
#include <string>

namespace entlab {

// Precondition or invariant of an operation was violated by the caller.
struct ContractViolation : std::invalid_argument {
    explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

// A matrix did not have the sparsity pattern a specialized routine requires.
// Callers can catch this and fall back to the general-purpose path.
struct PatternViolation : ContractViolation {
    explicit PatternViolation(const std::string& what) : ContractViolation(what) {}
};

// A computation produced results outside its numerical guarantees.
struct NumericalFailure : std::runtime_error {
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

// The Fock-space truncation was too small for the requested evolution.
struct CutoffInsufficient : NumericalFailure {
    explicit CutoffInsufficient(const std::string& what) : NumericalFailure(what) {}
};

// Bad scenario configuration (unknown key, missing value, parse error).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace entlab
