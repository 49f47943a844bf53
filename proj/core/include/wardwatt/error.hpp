#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace wardwatt {

// Base for every failure raised by the library that is not a plain
// precondition violation (those use std::invalid_argument).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// CSV ingestion failure. `row()` is the 1-based line number in the file
// (the header is line 1) when the failure is tied to a specific line.
class IngestError : public Error {
public:
    explicit IngestError(const std::string& what, std::optional<std::size_t> row = std::nullopt)
        : Error(row ? "row " + std::to_string(*row) + ": " + what : what), row_(row) {}

    std::optional<std::size_t> row() const noexcept { return row_; }

private:
    std::optional<std::size_t> row_;
};

// Numerical routine could not produce a valid result (infeasible search,
// singular system, divergence).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace wardwatt
