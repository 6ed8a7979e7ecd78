#pragma once

#include <stdexcept>
#include <string>

namespace adol {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical routine failed (non-finite values, step underflow, factorization failure).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Iterative routine exhausted its budget. Carries the best estimate reached.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double best_re, double best_im, double error_bound)
        : NumericalError(what), best_re_(best_re), best_im_(best_im), error_bound_(error_bound) {}

    double best_re() const noexcept { return best_re_; }
    double best_im() const noexcept { return best_im_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double best_re_;
    double best_im_;
    double error_bound_;
};

/// Configuration or input validation failure.
class ValidationError : public Error {
public:
    using Error::Error;
};

#define ADOL_REQUIRE(cond, ExcType, msg) \
    do {                                 \
        if (!(cond)) throw ExcType(msg); \
    } while (0)

}  // namespace adol
