#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mirrorfix {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Precondition violated in a way the caller could have checked.
class DomainError : public Error {
public:
    using Error::Error;
};

// geometry
class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

// rf design
class SingularDenominator : public Error {
public:
    using Error::Error;
};
class NonPositiveInput : public Error {
public:
    using Error::Error;
};
class RankDeficient : public Error {
public:
    using Error::Error;
};
class ZeroSlope : public Error {
public:
    using Error::Error;
};
class AboveCutoff : public Error {
public:
    using Error::Error;
};
class NoNegativeResistanceRegion : public Error {
public:
    using Error::Error;
};
class InductiveEquivalent : public Error {
public:
    using Error::Error;
};

// measurements
class CarrierUnlocked : public Error {
public:
    using Error::Error;
};
class OutOfBand : public Error {
public:
    using Error::Error;
};
class SchemaMismatch : public Error {
public:
    using Error::Error;
};
class MalformedRow : public Error {
public:
    MalformedRow(std::size_t line_no, const std::string& what)
        : Error("line " + std::to_string(line_no) + ": " + what), line_no_(line_no) {}
    std::size_t line_no() const { return line_no_; }

private:
    std::size_t line_no_;
};

// tag detection
class InsufficientSpan : public Error {
public:
    using Error::Error;
};
class EmptyInput : public Error {
public:
    using Error::Error;
};

// solvers
class NoPairs : public Error {
public:
    using Error::Error;
};
class Underdetermined : public Error {
public:
    using Error::Error;
};
class SingularNormalMatrix : public Error {
public:
    using Error::Error;
};
class NonConvergence : public Error {
public:
    using Error::Error;
};
class ZeroBaseVector : public Error {
public:
    using Error::Error;
};
class NotConverged : public Error {
public:
    using Error::Error;
};

// simulator / cli
class InvalidScenario : public Error {
public:
    using Error::Error;
};
class JoinMismatch : public Error {
public:
    using Error::Error;
};

} // namespace mirrorfix
