#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hrsim {

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad engine usage or malformed scenario input detected before the run.
struct ConfigError : SimError {
    using SimError::SimError;
};

/// Scenario failed semantic validation; carries every violated constraint.
struct ValidationError : SimError {
    std::vector<std::string> violations;

    explicit ValidationError(std::vector<std::string> v)
        : SimError(join(v)), violations(std::move(v)) {}

  private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "scenario validation failed:";
        for (const auto& x : v) { s += "\n  - "; s += x; }
        return s;
    }
};

/// A frame byte sequence too short to hold the structure it claims.
struct MalformedFrameError : SimError {
    using SimError::SimError;
};

/// Bytes whose EtherType is not the reserved relay-tag value.
struct NotAYTagError : SimError {
    using SimError::SimError;
};

/// Attempt to add a relay tag to an already tagged frame. Tags do not nest.
struct NestedTagError : SimError {
    using SimError::SimError;
};

/// Frame references an MLD unknown to the rewriting node.
struct NoAssociationError : SimError {
    using SimError::SimError;
};

/// A runtime invariant tripped mid-run. Aborts the simulation.
struct InvariantViolation : SimError {
    using SimError::SimError;
};

} // namespace hrsim
