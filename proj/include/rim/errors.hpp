#pragma once

#include <stdexcept>
#include <string>

namespace rim {

// Bad user input: model/config parameters that violate a precondition.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A solve that could not complete (contraction not certified, non-convergence,
// window exhaustion discovered mid-solve).
class SolveError : public std::runtime_error {
public:
    explicit SolveError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem trouble while reading configs or writing results.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rim
