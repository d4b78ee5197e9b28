#pragma once

#include <stdexcept>
#include <string>

namespace pfdr {

// Root of every error thrown by the library. Callers that only need to
// report failures can catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

// Target lies outside the range of the function being inverted.
class RangeError : public Error {
public:
    using Error::Error;
};

class BracketError : public Error {
public:
    using Error::Error;
};

class NonConvergenceError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

class UnsupportedFamilyError : public Error {
public:
    using Error::Error;
};

// rho_n never reached Q on [1, n_max]. rho_at_n_max lets callers tell
// "raise n_max" apart from a curve that plateaus below Q.
class NotAttainableError : public Error {
public:
    NotAttainableError(const std::string& what, double rho_at_n_max, long n_max)
        : Error(what), rho_at_n_max_(rho_at_n_max), n_max_(n_max) {}

    double rho_at_n_max() const noexcept { return rho_at_n_max_; }
    long n_max() const noexcept { return n_max_; }

private:
    double rho_at_n_max_;
    long n_max_;
};

class InsufficientHitsError : public Error {
public:
    InsufficientHitsError(const std::string& what, long numerator_hits, long denominator_hits)
        : Error(what), numerator_hits_(numerator_hits), denominator_hits_(denominator_hits) {}

    long numerator_hits() const noexcept { return numerator_hits_; }
    long denominator_hits() const noexcept { return denominator_hits_; }

private:
    long numerator_hits_;
    long denominator_hits_;
};

class DegenerateScenarioError : public Error {
public:
    DegenerateScenarioError(const std::string& what, double rejection_probability)
        : Error(what), rejection_probability_(rejection_probability) {}

    double rejection_probability() const noexcept { return rejection_probability_; }

private:
    double rejection_probability_;
};

class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace pfdr
