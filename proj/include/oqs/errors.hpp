// Error taxonomy shared by all modules.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oqs {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad caller input: dimension mismatches, negative rates, non-Hermitian H, ...
struct InvalidArgument : Error {
    using Error::Error;
};

// Request exceeds what this build can do (dense-eigensolver limits etc.).
struct CapabilityError : Error {
    using Error::Error;
};

// Numerics went wrong: validation failure, non-convergence, fit failure.
struct NumericError : Error {
    using Error::Error;
};

// Measurement outcome with probability below the zero threshold.
struct ImpossibleOutcome : Error {
    using Error::Error;
};

// Lexical/syntax/semantic failure in the operator-expression parser.
struct ParseError : Error {
    std::size_t offset;  // byte offset into the source text
    ParseError(const std::string& msg, std::size_t at)
        : Error(msg + " (at byte " + std::to_string(at) + ")"), offset(at) {}
};

}  // namespace oqs
