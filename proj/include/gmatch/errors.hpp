#pragma once

#include <stdexcept>
#include <string>

namespace gmatch {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A caller violated a function precondition (size mismatch, bad range, ...).
class ContractError : public Error {
public:
    explicit ContractError(const std::string& what) : Error(what) {}
};

// A distribution / block-model / pair spec failed validation.
class SpecError : public Error {
public:
    explicit SpecError(const std::string& what) : Error(what) {}
};

// Density is undefined because the (sub)graph has fewer than 2 vertices.
class UndefinedDensityError : public Error {
public:
    explicit UndefinedDensityError(const std::string& what) : Error(what) {}
};

// Alignment-strength denominator d1(1-d2)+(1-d1)d2 vanished: both graphs
// empty or both complete on the relevant vertex set.
class DegenerateStrengthError : public Error {
public:
    DegenerateStrengthError(double density1, double density2)
        : Error("degenerate alignment-strength denominator (densities " +
                std::to_string(density1) + ", " + std::to_string(density2) + ")"),
          density1(density1),
          density2(density2) {}

    double density1;
    double density2;
};

// Bernoulli parameter mean is 0 or 1, so heterogeneity correlation is undefined.
class DegenerateMeanError : public Error {
public:
    explicit DegenerateMeanError(const std::string& what) : Error(what) {}
};

// Instance is too large for the exact matcher; use the SGM matcher instead.
class SizeLimitError : public Error {
public:
    explicit SizeLimitError(const std::string& what) : Error(what) {}
};

// A file could not be parsed; carries the 1-based offending line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, long long line)
        : Error(what + " (line " + std::to_string(line) + ")"), line(line) {}

    long long line;
};

}  // namespace gmatch
