#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rlattract {

/// Status codes shared by the C++ core, the C API and the CLI exit codes.
enum class Status : int {
    Ok = 0,
    NotCertified = 1,
    InputError = 2,
    AccuracyError = 3,
    ConvergenceError = 4,
    InvariantViolation = 5,
    IoError = 6,
    InternalError = 7,
};

class Error : public std::runtime_error {
public:
    Error(Status status, const std::string& what) : std::runtime_error(what), status_(status) {}
    [[nodiscard]] Status status() const noexcept { return status_; }

private:
    Status status_;
};

/// Argument outside the mathematical domain (poles, nonpositive steps, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(Status::InputError, what) {}
};

/// Requested accuracy could not be reached; carries the achieved estimate.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double achieved)
        : Error(Status::AccuracyError, what), achieved_(achieved) {}
    [[nodiscard]] double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::size_t node, double defect)
        : Error(Status::ConvergenceError, what), node_(node), defect_(defect) {}
    [[nodiscard]] std::size_t node() const noexcept { return node_; }
    [[nodiscard]] double defect() const noexcept { return defect_; }

private:
    std::size_t node_;
    double defect_;
};

class InvariantViolation : public Error {
public:
    explicit InvariantViolation(const std::string& what) : Error(Status::InvariantViolation, what) {}
};

/// Malformed input: configuration, expression source, flags.
class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(Status::InputError, what) {}
};

/// Syntax error in an expression or JSON document, located by byte offset.
class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t offset, std::vector<std::string> expected = {})
        : InputError(what), offset_(offset), expected_(std::move(expected)) {}
    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
    [[nodiscard]] const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

/// Evaluation fault in a coefficient expression (log of nonpositive, 1/0, ...).
class EvalError : public InputError {
public:
    using InputError::InputError;
};

}  // namespace rlattract
