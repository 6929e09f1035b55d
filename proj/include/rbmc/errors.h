#pragma once

#include <stdexcept>
#include <string>

namespace rbmc {

/// Base class of everything the checker throws on purpose.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Malformed or invalid model input (syntax, unknown reference, violated invariant).
class ModelError : public Error {
   public:
    using Error::Error;
};

/// Non-finite or out-of-range values showed up during an iteration.
class NumericalError : public Error {
   public:
    using Error::Error;
};

/// A query combination the checker does not support (e.g. an automatic bound with the unfolding oracle).
class UnsupportedError : public Error {
   public:
    using Error::Error;
};

/// A configured cap (schedulers, branches, unfolded states, overflow guard) was exceeded.
class ResourceLimitError : public Error {
   public:
    using Error::Error;
};

/// An iteration hit its sweep or bound-step cap before the convergence criterion fired.
class ConvergenceError : public Error {
   public:
    using Error::Error;
};

}  // namespace rbmc
