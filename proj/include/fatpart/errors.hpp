#pragma once

#include <stdexcept>
#include <string>

namespace fatpart {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A document (JSON/CSV) does not follow the expected schema.
class MalformedDocument : public Error {
public:
    using Error::Error;
};

/// The input describes a tree with no nodes / no positive-weight leaves.
class EmptyTree : public Error {
public:
    using Error::Error;
};

/// A leaf weight is zero or negative.
class NonPositiveWeight : public Error {
public:
    using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
public:
    using Error::Error;
};

/// A cut would produce a piece below the representable area floor.
class DegenerateCut : public Error {
public:
    using Error::Error;
};

/// An operation was called with arguments violating its contract.
class PreconditionViolated : public Error {
public:
    using Error::Error;
};

/// A distance matrix fails the strong triangle inequality.
class NotUltrametric : public Error {
public:
    using Error::Error;
};

/// Two embedded points coincide, so contraction is unbounded.
class DuplicatePoints : public Error {
public:
    using Error::Error;
};

/// The requested embedding dimension is below the supported minimum.
class DimensionTooSmall : public Error {
public:
    using Error::Error;
};

/// An internal invariant failed; indicates a bug, not a user error.
class InternalError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
    if (!cond) throw PreconditionViolated(what);
}

inline void internal_check(bool cond, const std::string& what) {
    if (!cond) throw InternalError(what);
}

} // namespace detail

} // namespace fatpart
