#pragma once

#include <stdexcept>
#include <string>

namespace diland {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input: wrong matrix shape, asymmetric distances, bad ids.
class StructuralError : public Error {
public:
    explicit StructuralError(const std::string& msg) : Error(msg) {}
};

/// Base simplex has (numerically) zero content; barycentric weights undefined.
class DegenerateSimplex : public Error {
public:
    explicit DegenerateSimplex(const std::string& msg) : Error(msg) {}
};

/// Distances violate metric consistency beyond tolerance.
class InfeasibleDistances : public Error {
public:
    explicit InfeasibleDistances(const std::string& msg, int sensor = -1)
        : Error(msg), sensor_id(sensor) {}
    int sensor_id;  // offending sensor when raised during system assembly, else -1
};

/// No valid triangulation set found for a sensor within the retry budget.
class TriangulationFailed : public Error {
public:
    TriangulationFailed(const std::string& msg, int sensor)
        : Error(msg), sensor_id(sensor) {}
    int sensor_id;
};

/// Linear solve for the fixed point failed (spectral radius >= 1).
class SingularSystem : public Error {
public:
    explicit SingularSystem(const std::string& msg) : Error(msg) {}
};

/// Running-average update fed with a non-sequential iteration index.
class OutOfOrderSample : public Error {
public:
    explicit OutOfOrderSample(const std::string& msg) : Error(msg) {}
};

/// A required pair has no samples yet.
class MissingPair : public Error {
public:
    explicit MissingPair(const std::string& msg) : Error(msg) {}
};

/// Bias-correction factor was zero or negative.
class NonpositiveCorrection : public Error {
public:
    explicit NonpositiveCorrection(const std::string& msg) : Error(msg) {}
};

/// delta <= 0.5 configured together with link failures or communication noise.
class WeightNotSquareSummable : public Error {
public:
    explicit WeightNotSquareSummable(const std::string& msg) : Error(msg) {}
};

/// Normalized MSE denominator is (numerically) zero.
class ZeroInitialError : public Error {
public:
    explicit ZeroInitialError(const std::string& msg) : Error(msg) {}
};

}  // namespace diland
