#pragma once

#include <stdexcept>
#include <string>

namespace lining {

/// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad configuration: out-of-range parameter, impossible grid, unknown option.
struct ConfigError : Error {
    using Error::Error;
};

/// Malformed or inconsistent input data (readings files, unknown sensor ids).
struct DataError : Error {
    using Error::Error;
};

/// Matrix/vector dimension mismatch.
struct ShapeError : Error {
    using Error::Error;
};

/// Mathematical precondition violated (negative head, point off the ring).
struct DomainError : Error {
    using Error::Error;
};

/// Index outside the grid.
struct IndexError : Error {
    using Error::Error;
};

/// Optimization failure (divergence, all candidates failed).
struct TrainingError : Error {
    using Error::Error;
};

/// Filesystem failure on output paths.
struct IoError : Error {
    using Error::Error;
};

} // namespace lining
