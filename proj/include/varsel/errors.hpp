#pragma once

#include <stdexcept>
#include <string>

namespace varsel {

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Configuration problems (CLI exit code 1).
class ConfigError : public Error {
public:
    using Error::Error;
};

class CapExceeded : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Problems with input data or files (CLI exit code 2).
class DataError : public Error {
public:
    using Error::Error;
};

class ParseError : public DataError {
public:
    using DataError::DataError;
};

class MissingTarget : public DataError {
public:
    using DataError::DataError;
};

class NonFiniteValue : public DataError {
public:
    using DataError::DataError;
};

class BadSplit : public DataError {
public:
    using DataError::DataError;
};

class IoError : public DataError {
public:
    using DataError::DataError;
};

// Genome and numerical failures.
class EmptyChromosome : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// The damped normal matrix could not be factored even at the damping cap.
class SolveFailure : public Error {
public:
    using Error::Error;
};

class TooFewSurvivors : public Error {
public:
    using Error::Error;
};

/// Every chromosome in the search space has already been buried.
class ExhaustedNovelty : public Error {
public:
    using Error::Error;
};

}  // namespace varsel
