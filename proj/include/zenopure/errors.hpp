#ifndef ZENOPURE_ERRORS_HPP
#define ZENOPURE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace zenopure {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A requested matrix would exceed the desk-scale dimension limit.
class DimensionLimitExceeded : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NotHermitian : public Error {
public:
    using Error::Error;
};

/// Iterative eigensolver hit its cap. For power iteration this usually means
/// there is no magnitude gap below the dominant eigenvalue.
class NoConvergence : public Error {
public:
    using Error::Error;
};

/// The confirmation probability fell below threshold: the branch never occurs.
class ExtinctBranch : public Error {
public:
    ExtinctBranch(const std::string& what, double probability)
        : Error(what), probability_(probability) {}
    double probability() const noexcept { return probability_; }

private:
    double probability_;
};

/// delta*tau is an integer multiple of pi: A vanishes and |e^C| = 1.
class DegenerateInterval : public Error {
public:
    using Error::Error;
};

class CutoffTooSmall : public Error {
public:
    using Error::Error;
};

class ZeroFrequency : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace zenopure

#endif  // ZENOPURE_ERRORS_HPP
