#pragma once

#include <stdexcept>
#include <string>

namespace pinch {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto its exit-code contract.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A user coincides with an antenna (zero free-space distance).
class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

// A decoder rank below the decoded rank was requested.
class RankOrder : public Error {
public:
    using Error::Error;
};

// A finite-difference step collapsed to zero in floating point.
class NumericalStep : public Error {
public:
    using Error::Error;
};

// Placement or power constraints cannot be satisfied.
class Infeasible : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class DegenerateObjective : public Error {
public:
    using Error::Error;
};

// Some user has an exactly zero channel gain.
class DegenerateChannel : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class DataTooSmall : public Error {
public:
    using Error::Error;
};

class EmptyData : public Error {
public:
    using Error::Error;
};

// Malformed or out-of-range configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A persisted artifact failed magic, version, shape or checksum checks.
class CorruptArtifact : public Error {
public:
    using Error::Error;
};

} // namespace pinch
