#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace signallab {

/// Input that cannot be parsed or violates a file-format contract.
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
    parse_error(std::size_t line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

/// Series that cannot be brought onto a common week range.
class alignment_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Statistic undefined for the given data: zero variance, rank-deficient
/// design, too few usable observations.
class degenerate_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace signallab
