#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pslice {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Cancellation consumed every significant digit of a result.
///
/// `level()` is the absolute precision at which the result is known to be
/// zero, i.e. the true value lies in p^level * Z_p.
class PrecisionExhausted : public Error {
public:
    explicit PrecisionExhausted(long level)
        : Error("precision exhausted: result is zero modulo p^" + std::to_string(level)),
          level_(level) {}
    long level() const noexcept { return level_; }

private:
    long level_;
};

class DivisionByZero : public Error {
public:
    DivisionByZero() : Error("division by zero") {}
};

class ZeroVector : public Error {
public:
    ZeroVector() : Error("operation requires a nonzero vector") {}
};

class RankDeficient : public Error {
public:
    RankDeficient() : Error("matrix is rank deficient at working precision") {}
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t position)
        : Error("syntax error at position " + std::to_string(position) + ": " + what),
          position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class UnknownVariable : public Error {
public:
    explicit UnknownVariable(const std::string& name)
        : Error("unknown variable '" + name + "'"), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class NegativeValuationCoefficient : public Error {
public:
    NegativeValuationCoefficient() : Error("coefficient has negative valuation") {}
};

class NotHomogeneous : public Error {
public:
    NotHomogeneous() : Error("polynomial system is not homogeneous") {}
};

class SingularPoint : public Error {
public:
    SingularPoint() : Error("Jacobian is rank deficient at the point") {}
};

class NotOnVariety : public Error {
public:
    NotOnVariety() : Error("point does not lie on the variety") {}
};

/// Root finding could not separate a cluster of roots within the depth cap.
class DegenerateRoot : public Error {
public:
    DegenerateRoot() : Error("degenerate root: cluster not separated within depth cap") {}
};

/// A slice whose intersection with the variety could not be resolved.
class DegenerateSlice : public Error {
public:
    DegenerateSlice() : Error("degenerate slice") {}
};

/// A slice produced fbar larger than the rejection constant M.
class BoundViolation : public Error {
public:
    BoundViolation(double fbar, double bound)
        : Error("rejection bound violated: fbar = " + std::to_string(fbar) +
                " exceeds M = " + std::to_string(bound)),
          fbar_(fbar), bound_(bound) {}
    double fbar() const noexcept { return fbar_; }
    double bound() const noexcept { return bound_; }

private:
    double fbar_;
    double bound_;
};

}  // namespace pslice
