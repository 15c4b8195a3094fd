#pragma once

#include <stdexcept>
#include <string>

namespace singreg {

// Base of everything the library throws. The CLI maps the subclasses onto
// its exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the domain of a formula (x <= 0, n <= 2, lambda <= 0 ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// n = 4: the two-term construction collapses because A = 0.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

// Factor-approximant training found no admissible real solution.
class ConstructionError : public Error {
public:
    using Error::Error;
};

// Integrator or quadrature failure.
class NumericError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

// Malformed input text (registry files, serialized approximants, tables).
class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace singreg
