#pragma once

#include <stdexcept>
#include <string>

namespace hompr {

/// Raised when an input violates an operation's preconditions
/// (bad grid sizes, mismatched grids, malformed files, invalid config).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input error tied to a named configuration field, e.g. "source.fwhm_nm".
class FieldError : public InputError {
public:
    FieldError(std::string field, const std::string& reason)
        : InputError(field + ": " + reason), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InputError(message);
}

} // namespace detail
} // namespace hompr
