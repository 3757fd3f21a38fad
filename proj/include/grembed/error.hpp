#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace grembed {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input record; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// A record lacks a field the format requires.
class MissingFieldError : public ParseError {
public:
    MissingFieldError(const std::string& file, std::size_t line, const std::string& field)
        : ParseError(file, line, "missing required field '" + field + "'"), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// A precondition or config constraint is violated.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A count the metric divides by is zero.
class ZeroCountError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// A filter or construction step produced nothing usable.
class EmptyResultError : public Error {
public:
    using Error::Error;
};

// Iterative numeric routine hit its iteration cap.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Graph breaks into several components where one was required.
class DisconnectedGraphError : public Error {
public:
    using Error::Error;
};

// Katz series does not converge for the requested decay.
class DivergentSeriesError : public Error {
public:
    using Error::Error;
};

// A linear solve failed (e.g. the system is not positive definite).
class SolverError : public Error {
public:
    using Error::Error;
};

// Embedding produced an all-zero or non-finite row.
class DegenerateEmbeddingError : public Error {
public:
    using Error::Error;
};

// Query user has no embedding row.
class ColdUserError : public Error {
public:
    using Error::Error;
};

// Training loss became non-finite.
class DivergenceError : public Error {
public:
    using Error::Error;
};

// A stage input file is absent.
class MissingArtifactError : public Error {
public:
    explicit MissingArtifactError(const std::string& path)
        : Error("missing artifact: " + path), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace grembed
