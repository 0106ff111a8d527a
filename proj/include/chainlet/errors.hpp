#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chainlet {

/// Bad input data: malformed records, duplicate ids, unknown labels.
/// Carries optional source context (file and 1-based line).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}

    DataError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
          source_(source),
          line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_ = 0;
};

/// Host graph exceeds the brute-force oracle's node budget.
class SizeLimitError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// An internal consistency check failed. Always a bug, never bad input.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace chainlet
