#include "humo/core/error.hpp"

namespace humo {

CorruptRecordError::CorruptRecordError(std::size_t record, const std::string& what)
    : Error("corrupt record " + std::to_string(record) + ": " + what), record_(record) {}

HashMismatchError::HashMismatchError(const std::string& what, const std::string& expected,
                                     const std::string& actual)
    : Error("hash mismatch for " + what + ": expected " + expected + ", found " + actual) {}

MissingArtifactError::MissingArtifactError(const std::string& path)
    : Error("missing artifact: " + path) {}

DivergenceError::DivergenceError(std::size_t step)
    : Error("training diverged (non-finite loss) at step " + std::to_string(step)), step_(step) {}

}  // namespace humo
