#pragma once

#include <stdexcept>
#include <string>

namespace eofcast {

/// Base class for every error this library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// -- ingestion ---------------------------------------------------------------

class MalformedRow : public Error {
public:
    using Error::Error;
};

class MissingCell : public Error {
public:
    using Error::Error;
};

class DuplicateCell : public Error {
public:
    using Error::Error;
};

class NonFiniteValue : public Error {
public:
    using Error::Error;
};

/// Negative value for a variable that cannot physically be negative.
class NegativeValue : public Error {
public:
    using Error::Error;
};

class EmptySelection : public Error {
public:
    using Error::Error;
};

// -- linear algebra ----------------------------------------------------------

class SvdFailure : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

// -- distances and clustering ------------------------------------------------

class EmptySeries : public Error {
public:
    using Error::Error;
};

class BandTooNarrow : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

// -- coherence ---------------------------------------------------------------

class ZeroVariance : public Error {
public:
    using Error::Error;
};

// -- forecasting -------------------------------------------------------------

class SeriesTooShort : public Error {
public:
    using Error::Error;
};

class NonFiniteLoss : public Error {
public:
    using Error::Error;
};

// -- evaluation --------------------------------------------------------------

class ZeroNaiveError : public Error {
public:
    using Error::Error;
};

// -- pipeline ----------------------------------------------------------------

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace eofcast
