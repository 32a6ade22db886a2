#pragma once

#include <stdexcept>
#include <string>

namespace ksr {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VocabularyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SamplingExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ksr
