#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace rankforge {

/// Base error for everything the toolkit raises on purpose. `kind()` is a
/// stable machine-readable name ("MalformedLine", "PoolTooSmall", ...) used
/// by tests and by the CLI's exit-code mapping.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Violated precondition: bad config, malformed input file, pool too small.
/// The CLI exits with code 2 for these, 1 for plain Error.
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace rankforge
