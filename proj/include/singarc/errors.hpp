#pragma once

#include <stdexcept>
#include <string>

namespace singarc {

// Input outside the region where a formula is real-valued or defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Thrust-dependent Gauss rate requested on a (numerically) circular orbit.
class DegenerateEccentricity : public DomainError {
public:
    using DomainError::DomainError;
};

// Switching function undefined: p_v = 0 and p_m = 0 at the same time.
class IndeterminateSwitching : public DomainError {
public:
    using DomainError::DomainError;
};

// Root enumeration produced a count outside the proven [6, 10] range.
class CountViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Integration stopped because a state guard (mass, collision radius) tripped.
class PropagationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace singarc
