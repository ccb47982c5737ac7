// errors.hpp
#pragma once

#include <stdexcept>
#include <string>

namespace fattails {

// Base class for everything this library throws.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A referenced input file does not exist or cannot be opened.
struct MissingFileError : Error {
    using Error::Error;
};

// A CSV file's header or a row does not match the declared schema.
// Carries 1-based row number (0 = header) and the offending column name.
struct SchemaError : Error {
    SchemaError(const std::string& msg, std::size_t row_, std::string column_)
        : Error(msg), row(row_), column(std::move(column_)) {}
    std::size_t row;
    std::string column;
};

// A price row parsed cleanly but the close is zero or negative.
struct NonPositivePriceError : Error {
    NonPositivePriceError(const std::string& msg, std::size_t row_) : Error(msg), row(row_) {}
    std::size_t row;
};

// A market-cap row parsed cleanly but the cap is zero or negative.
struct NonPositiveCapError : Error {
    NonPositiveCapError(const std::string& msg, std::size_t row_) : Error(msg), row(row_) {}
    std::size_t row;
};

// Series too short for the requested operation.
struct TooShortError : Error {
    using Error::Error;
};

// All observations identical; scale-dependent statistics are undefined.
struct ZeroVarianceError : Error {
    using Error::Error;
};

// An operation received an empty container.
struct EmptyInputError : Error {
    using Error::Error;
};

// A period slice contains no observations.
struct EmptySliceError : Error {
    using Error::Error;
};

// A tail-side operation found no observations on the requested side.
struct EmptySideError : Error {
    using Error::Error;
};

// Too few stocks to form capitalization groups.
struct InsufficientUniverseError : Error {
    using Error::Error;
};

// Distribution or model parameters outside their legal domain.
struct InvalidParamsError : Error {
    using Error::Error;
};

// A numerical routine failed to reach its tolerance.
struct ConvergenceError : Error {
    using Error::Error;
};

// Every candidate model in a selection set failed to produce a fit.
struct AllFitsFailedError : Error {
    using Error::Error;
};

// Config file problems: unknown keys, malformed values.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace fattails
