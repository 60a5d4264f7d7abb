#ifndef SPDTEST_ERRORS_HPP
#define SPDTEST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spdtest {

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- linear algebra / validation ---

struct DimensionMismatchError : Error {
    explicit DimensionMismatchError(const std::string& msg) : Error(msg) {}
};

struct NotSymmetricError : Error {
    explicit NotSymmetricError(const std::string& msg) : Error(msg) {}
};

struct NotPositiveDefiniteError : Error {
    explicit NotPositiveDefiniteError(const std::string& msg) : Error(msg) {}
};

struct NotPsdError : Error {
    explicit NotPsdError(const std::string& msg) : Error(msg) {}
};

struct NotFiniteError : Error {
    explicit NotFiniteError(const std::string& msg) : Error(msg) {}
};

/// Numerical breakdown inside a factorization (matrix not PD in floating point).
struct PivotFailureError : Error {
    explicit PivotFailureError(const std::string& msg) : Error(msg) {}
};

// --- sampling / statistics ---

struct EmptySampleError : Error {
    explicit EmptySampleError(const std::string& msg) : Error(msg) {}
};

struct InvalidShapeError : Error {
    explicit InvalidShapeError(const std::string& msg) : Error(msg) {}
};

struct EmptyListError : Error {
    explicit EmptyListError(const std::string& msg) : Error(msg) {}
};

struct InvalidAlphaError : Error {
    explicit InvalidAlphaError(const std::string& msg) : Error(msg) {}
};

struct InvalidRepsError : Error {
    explicit InvalidRepsError(const std::string& msg) : Error(msg) {}
};

// --- ingest ---

struct NonPositiveValueError : Error {
    explicit NonPositiveValueError(const std::string& msg) : Error(msg) {}
};

struct TooShortError : Error {
    explicit TooShortError(const std::string& msg) : Error(msg) {}
};

struct GroupTooSmallError : Error {
    explicit GroupTooSmallError(const std::string& msg) : Error(msg) {}
};

struct EmptySideError : Error {
    explicit EmptySideError(const std::string& msg) : Error(msg) {}
};

struct CsvFormatError : Error {
    explicit CsvFormatError(const std::string& msg) : Error(msg) {}
};

// --- configuration ---

/// Configuration problem; `path` points at the offending field, e.g.
/// "$.scenarios[2].shape".
struct ConfigError : Error {
    ConfigError(std::string path_, const std::string& msg)
        : Error(path_ + ": " + msg), path(std::move(path_)) {}
    std::string path;
};

}  // namespace spdtest

#endif  // SPDTEST_ERRORS_HPP
