#pragma once

#include <optional>
#include <string>

#include "khess/grid.hpp"

namespace khess {

/// Dirichlet data for S_k(D^2 u) = f on the unit cube: dimension, order,
/// right-hand side, boundary values, and the exact solution when known.
struct Problem {
    int n = 3;
    int k = 2;
    ScalarField f;
    ScalarField g;
    std::optional<ScalarField> exact;
    std::string label;
};

/// Catalog lookup. Labels: test1..test5 and quadratic(k,n),
/// e.g. "quadratic(2,3)".
Problem make_problem(const std::string& label);

/// max over all nodes of |u - r_h(exact)|. Requires an exact solution.
double max_error(const MeshFunction& u, const Problem& problem);

/// Closed forms for the Test 2 solution ln(2+r^2), kept for the
/// sign-structure diagnostics: Laplacian and Hessian determinant.
double test2_laplacian_exact(const Point& x);
double test2_det_exact(const Point& x);

}  // namespace khess
