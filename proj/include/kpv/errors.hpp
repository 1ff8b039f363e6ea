#pragma once

#include <stdexcept>
#include <string>

namespace kpv {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Spectral x = 0 column of a field that must be x-mean-free is too large.
struct NonZeroXMean : Error {
    using Error::Error;
};

struct BlowUp : Error {
    double t;
    double sup_norm;
    BlowUp(double t_, double sup, double ceiling)
        : Error("blow-up at t=" + std::to_string(t_) + ": sup|u|=" + std::to_string(sup) +
                " exceeds ceiling " + std::to_string(ceiling)),
          t(t_), sup_norm(sup) {}
};

struct ConstructionFailed : Error {
    using Error::Error;
};

struct InsufficientSamples : Error {
    using Error::Error;
};

struct DegenerateDenominator : Error {
    using Error::Error;
};

// Parameter bundle violates one of the admissibility constraints.
// `constraint` is a stable short identifier such as "window_exponents".
struct ValidationError : Error {
    std::string constraint;
    ValidationError(std::string constraint_, const std::string& msg)
        : Error(msg + " [" + constraint_ + "]"), constraint(std::move(constraint_)) {}
};

struct ParseError : Error {
    int line;
    ParseError(int line_, const std::string& msg)
        : Error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

struct BadMagic : Error {
    using Error::Error;
};
struct TruncatedFile : Error {
    using Error::Error;
};
struct GridMismatch : Error {
    using Error::Error;
};
struct MissingCsv : Error {
    using Error::Error;
};

}  // namespace kpv
