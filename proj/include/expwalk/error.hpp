#pragma once

#include <stdexcept>
#include <string>

namespace expwalk {

/// Broad failure class, used by the runner to pick an exit status.
enum class ErrorKind { Validation, Numerical };

/// Base error: carries the module and operation that raised it.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, std::string op, const std::string& what)
        : std::runtime_error(module + "::" + op + ": " + what),
          kind_(kind), module_(std::move(module)), op_(std::move(op)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }
    const std::string& op() const noexcept { return op_; }

private:
    ErrorKind kind_;
    std::string module_;
    std::string op_;
};

/// Precondition or input-validation failure.
class DomainError : public Error {
public:
    DomainError(std::string module, std::string op, const std::string& what)
        : Error(ErrorKind::Validation, std::move(module), std::move(op), what) {}
};

/// A size cap (enumeration, word count, dimension) would be exceeded.
class CapError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Ill-conditioned input (near-singular basis, enumeration blowup).
class ConditioningError : public Error {
public:
    ConditioningError(std::string module, std::string op, const std::string& what)
        : Error(ErrorKind::Numerical, std::move(module), std::move(op), what) {}
};

/// An iterative procedure did not converge; `partial` describes the last iterate.
class ConvergenceError : public Error {
public:
    ConvergenceError(std::string module, std::string op, const std::string& what,
                     std::string partial = {})
        : Error(ErrorKind::Numerical, std::move(module), std::move(op), what),
          partial_(std::move(partial)) {}

    const std::string& partial() const noexcept { return partial_; }

private:
    std::string partial_;
};

}  // namespace expwalk
