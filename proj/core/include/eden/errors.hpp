#pragma once

#include <stdexcept>
#include <string>

namespace eden {

// Error classes map 1:1 onto CLI exit codes (see tools/).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Violated internal invariant: a bug, not a user error.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

struct ParseError : IoError {
    ParseError(const std::string& file, long line, const std::string& what)
        : IoError(file + ":" + std::to_string(line) + ": " + what), line_number(line) {}
    long line_number;
};

}  // namespace eden
