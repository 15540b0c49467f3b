#pragma once

#include <stdexcept>
#include <string>

namespace bglm {

struct SingularMatrix : std::runtime_error {
    explicit SingularMatrix(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoSignChange : std::runtime_error {
    explicit NoSignChange(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidTriple : std::runtime_error {
    explicit InvalidTriple(const std::string& msg) : std::runtime_error(msg) {}
};

struct DuplicateNodes : std::runtime_error {
    explicit DuplicateNodes(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularAtQ : std::runtime_error {
    explicit SingularAtQ(const std::string& msg) : std::runtime_error(msg) {}
};

struct Divergence : std::runtime_error {
    explicit Divergence(const std::string& msg) : std::runtime_error(msg) {}
};

struct IterationFailure : std::runtime_error {
    explicit IterationFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct StepsizeUnderflow : std::runtime_error {
    explicit StepsizeUnderflow(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnknownProblem : std::runtime_error {
    explicit UnknownProblem(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoReference : std::runtime_error {
    explicit NoReference(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace bglm
