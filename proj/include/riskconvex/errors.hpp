#pragma once

#include <stdexcept>
#include <string>

namespace riskconvex {

// Error taxonomy shared across the library. Every failure mode callers are
// expected to handle gets its own type; anything else is a plain logic_error.

struct NumericalFailure : std::runtime_error {
    explicit NumericalFailure(const std::string& msg) : std::runtime_error("NumericalFailure: " + msg) {}
};

struct NotPolytope : std::runtime_error {
    explicit NotPolytope(const std::string& msg) : std::runtime_error("NotPolytope: " + msg) {}
};

struct DegenerateCone : std::runtime_error {
    explicit DegenerateCone(const std::string& msg) : std::runtime_error("DegenerateCone: " + msg) {}
};

struct NoPositiveRay : std::runtime_error {
    explicit NoPositiveRay(const std::string& msg) : std::runtime_error("NoPositiveRay: " + msg) {}
};

struct NoDensity : std::runtime_error {
    explicit NoDensity(const std::string& msg) : std::runtime_error("NoDensity: " + msg) {}
};

struct Unsupported : std::runtime_error {
    explicit Unsupported(const std::string& msg) : std::runtime_error("Unsupported: " + msg) {}
};

struct InvalidDistortion : std::runtime_error {
    explicit InvalidDistortion(const std::string& msg) : std::runtime_error("InvalidDistortion: " + msg) {}
};

struct CrossCheckFailure : std::runtime_error {
    explicit CrossCheckFailure(const std::string& msg) : std::runtime_error("CrossCheckFailure: " + msg) {}
};

struct TooFewAdmissiblePairs : std::runtime_error {
    explicit TooFewAdmissiblePairs(const std::string& msg) : std::runtime_error("TooFewAdmissiblePairs: " + msg) {}
};

struct DimensionTooHigh : std::runtime_error {
    explicit DimensionTooHigh(const std::string& msg) : std::runtime_error("DimensionTooHigh: " + msg) {}
};

struct OutOfRegion : std::runtime_error {
    explicit OutOfRegion(const std::string& msg) : std::runtime_error("OutOfRegion: " + msg) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace riskconvex
