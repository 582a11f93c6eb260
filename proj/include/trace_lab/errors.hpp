#pragma once

#include <stdexcept>
#include <string>

namespace trace_lab {

/// A precondition on an operation's inputs was violated.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Evaluation requested at a pole of a closed form.
class PoleError : public ParameterError {
public:
    explicit PoleError(const std::string& what) : ParameterError(what) {}
};

/// The requested evaluation mode has no evaluator for this law.
class CapabilityError : public std::logic_error {
public:
    explicit CapabilityError(const std::string& what) : std::logic_error(what) {}
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ParameterError(what);
}

} // namespace trace_lab
