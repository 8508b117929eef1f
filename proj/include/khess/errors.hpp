#pragma once

#include <stdexcept>
#include <string>

namespace khess {

/// Thrown when an iterative or direct solve cannot meet its tolerance.
/// Carries the residual that was actually achieved.
class SolveError : public std::runtime_error {
public:
    SolveError(const std::string& what, double achieved_residual)
        : std::runtime_error(what), achieved_residual_(achieved_residual) {}

    double achieved_residual() const noexcept { return achieved_residual_; }

private:
    double achieved_residual_;
};

}  // namespace khess
