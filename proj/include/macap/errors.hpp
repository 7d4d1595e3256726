#pragma once

#include <stdexcept>
#include <string>

namespace macap {

// Input fails a structural invariant (probability vector, stochasticity, shape).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// File or document could not be parsed; message carries the location.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested computation exceeds a configured work ceiling.
class RefusalError : public std::runtime_error {
public:
    RefusalError(const std::string& msg, double estimate)
        : std::runtime_error(msg), estimate_(estimate) {}
    double estimate() const { return estimate_; }

private:
    double estimate_ = 0.0;
};

// Iterative solver hit its iteration cap before certifying the target gap.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& msg, double best_gap)
        : std::runtime_error(msg), best_gap_(best_gap) {}
    double best_gap() const { return best_gap_; }

private:
    double best_gap_ = 0.0;
};

// Black-box objective returned a non-finite value; message carries the point.
class EvaluationError : public std::runtime_error {
public:
    explicit EvaluationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace macap
