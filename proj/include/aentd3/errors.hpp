#pragma once

#include <stdexcept>

namespace aentd3 {

// Error categories. The CLI maps each category to a distinct exit code
// (see tools/main.cpp); library code throws, it never exits.

// Invalid or inconsistent configuration values.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dimension or layout mismatch between values that must agree.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Operation not available in the current mode (e.g. partner-action
// estimation on a centralized agent).
struct ModeError : std::logic_error {
    using std::logic_error::logic_error;
};

// Operation applied to an object in the wrong state (stepping a finished
// episode, sampling an empty buffer).
struct StateError : std::logic_error {
    using std::logic_error::logic_error;
};

// Malformed or incompatible checkpoint data.
struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem failure (unreadable input, unwritable output).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace aentd3
