#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace multirank {

// Malformed input text (edge lists, configuration strings, ranking files).
// line() is 1-based; 0 means "no specific line".
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Vector/matrix size mismatch.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Invalid configuration, preset, or atom referencing a missing layer.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input on which an iteration or measure has no defined value
// (e.g. an all-tied ranking, or a power iteration hitting the zero vector).
class DegenerateInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace multirank
