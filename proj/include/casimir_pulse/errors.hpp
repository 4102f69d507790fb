#pragma once

#include <stdexcept>
#include <string>

namespace casimir_pulse {

// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Evaluation requested on the support of the switched-off potential (x = 0 on the IN region).
class OnPotentialSupportError : public DomainError {
public:
    using DomainError::DomainError;
};

// An iterative method exhausted its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace casimir_pulse
