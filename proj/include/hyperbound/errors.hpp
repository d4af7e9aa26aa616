#pragma once

#include <stdexcept>
#include <string>

namespace hyperbound {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the region where the requested evaluation is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A series could not be summed to the requested accuracy.
class NonConvergence : public Error {
public:
    using Error::Error;
};

/// A gamma function or Pochhammer symbol hit a pole.
class PoleError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NonPositiveParameter : public Error {
public:
    using Error::Error;
};

/// Parameter vectors have the wrong lengths for the requested operation.
class ShapeError : public Error {
public:
    using Error::Error;
};

class DegenerateParameters : public Error {
public:
    using Error::Error;
};

/// The Mellin-Barnes integral does not converge absolutely on the chosen line.
class ContourDivergence : public Error {
public:
    using Error::Error;
};

/// The parameters violate the structural requirements of an integral representation.
class SpecViolation : public Error {
public:
    using Error::Error;
};

class ConvergenceConditionViolated : public SpecViolation {
public:
    using SpecViolation::SpecViolation;
};

/// Quadrature failed to settle within the permitted number of levels.
class NoConvergence : public Error {
public:
    using Error::Error;
};

/// The hypotheses of a statement fail and the caller asked for a certified result.
class HypothesisFailed : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace hyperbound
