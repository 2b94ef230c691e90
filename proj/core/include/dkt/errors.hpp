#pragma once

#include <stdexcept>
#include <string>

namespace dkt {

// Base for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad user input at the API/CLI boundary (exit code 2).
class UsageError : public Error {
public:
    using Error::Error;
};

// Malformed or inconsistent data: files, schemas, datasets (exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

// Numerical breakdowns: degenerate inputs, solver failure (exit code 4).
class NumericalError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public DataError {
public:
    using DataError::DataError;
};

class SchemaError : public DataError {
public:
    using DataError::DataError;
};

class DegenerateInputError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SolverFailureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EmptyBlockError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace dkt
