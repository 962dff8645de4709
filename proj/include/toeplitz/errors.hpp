#pragma once

#include <stdexcept>
#include <string>

namespace toeplitz {

// Malformed prime-set spec string; `token()` is the offending piece.
class SpecParseError : public std::invalid_argument {
public:
    SpecParseError(const std::string& what, std::string token)
        : std::invalid_argument(what + ": '" + token + "'"), token_(std::move(token)) {}

    const std::string& token() const noexcept { return token_; }

private:
    std::string token_;
};

// A caller-supplied resource does not satisfy an operation's precondition
// (e.g. a prime table that is too small for the requested segment).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Ranges handed to an aggregation overlap, leave gaps or mix bases.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace toeplitz
