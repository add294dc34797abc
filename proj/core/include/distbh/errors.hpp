#pragma once

#include <stdexcept>

namespace distbh {

/// Caller-supplied value outside its domain (p-value not in [0,1], bad alpha, ...).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Invalid estimator or experiment configuration.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Star-protocol contract violation (duplicate node id, missing report, ...).
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed wire frame; the message names the offending field.
struct CodecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Cross-object inconsistency (e.g. a rejection index outside its batch).
struct ConsistencyError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace distbh
