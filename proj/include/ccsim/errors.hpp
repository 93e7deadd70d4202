#pragma once

#include <stdexcept>
#include <string>

namespace ccsim {

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PastEventError : SimError {
    using SimError::SimError;
};
struct ConfigError : SimError {
    using SimError::SimError;
};
struct NoLossObservedError : SimError {
    using SimError::SimError;
};
struct NoMeasurementError : SimError {
    using SimError::SimError;
};
struct EmptyRingError : SimError {
    using SimError::SimError;
};
struct ReplayMissError : SimError {
    using SimError::SimError;
};
struct ScriptExhaustedError : SimError {
    using SimError::SimError;
};
struct LiveError : SimError {
    using SimError::SimError;
};
struct IoError : SimError {
    using SimError::SimError;
};
struct DegenerateInputError : SimError {
    using SimError::SimError;
};
struct UnknownParameterError : SimError {
    using SimError::SimError;
};

}  // namespace ccsim
