#pragma once

#include <stdexcept>
#include <string>

namespace affcredit {

/// Malformed input: wrong dimensions, out-of-range scalars, bad documents.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Dimension or shape inconsistency in model data (distinct from an admissibility failure).
class StructuralError : public InputError {
public:
    using InputError::InputError;
};

/// A numerical procedure failed to deliver a result at the requested accuracy.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Riccati solution left every bounded set before the requested horizon.
class MomentExplosion : public NumericalError {
public:
    MomentExplosion(const std::string& what, double explosion_time)
        : NumericalError(what), explosion_time_(explosion_time) {}

    /// Last time reached by the integrator; an upper estimate of the explosion time is not available.
    double explosion_time() const noexcept { return explosion_time_; }

private:
    double explosion_time_;
};

}  // namespace affcredit
