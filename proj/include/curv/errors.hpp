#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace curv {

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedConversion : std::runtime_error {
    explicit UnsupportedConversion(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateTriangle : std::runtime_error {
    explicit DegenerateTriangle(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateGeodesic : std::runtime_error {
    explicit DegenerateGeodesic(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedKind : std::runtime_error {
    explicit UnsupportedKind(const std::string& what) : std::runtime_error(what) {}
};

struct PointNotOnGeodesic : std::runtime_error {
    explicit PointNotOnGeodesic(const std::string& what) : std::runtime_error(what) {}
};

struct MeshFailure : std::runtime_error {
    explicit MeshFailure(const std::string& what) : std::runtime_error(what) {}
};

struct AssemblyError : std::runtime_error {
    explicit AssemblyError(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergence : std::runtime_error {
    int max_iterations = 0;
    std::vector<double> partial_values;
    std::vector<double> partial_residuals;
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
    NoConvergence(const std::string& what, int iters, std::vector<double> vals,
                  std::vector<double> res)
        : std::runtime_error(what),
          max_iterations(iters),
          partial_values(std::move(vals)),
          partial_residuals(std::move(res)) {}
};

struct ZeroVector : std::runtime_error {
    explicit ZeroVector(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientPairs : std::runtime_error {
    explicit InsufficientPairs(const std::string& what) : std::runtime_error(what) {}
};

struct ShapeMismatch : std::runtime_error {
    explicit ShapeMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct RadiiOutsideTriangle : std::runtime_error {
    explicit RadiiOutsideTriangle(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct StepFailure : std::runtime_error {
    double t;
    StepFailure(double t_, const std::string& what) : std::runtime_error(what), t(t_) {}
};

} // namespace curv
