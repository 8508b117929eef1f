#pragma once

#include <vector>

#include "khess/sym_mat.hpp"

namespace khess {

/// Exact ratio, reduced to lowest terms.
struct Rational {
    long long num;
    long long den;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Order of a k-Hessian operator: 1 <= k <= n <= 3.
struct HessianOrder {
    int k;
    int n;
    HessianOrder(int k_, int n_);
};

/// The Maclaurin constant binom(n,k)/n^k as an exact rational.
Rational c_const(int k, int n);

/// Sum of all k-by-k principal minors of A. Trace for k=1, determinant
/// for k=n. Hard-coded closed forms for n <= 3.
double s_k(const SymMat& A, int k);

/// Matrix of partial derivatives dS_k/da_ij with all n^2 entries treated
/// as independent variables (the cofactor matrix when k=n). Satisfies the
/// Euler identity {S_k^ij(A)}:A = k S_k(A).
SymMat s_k_gradient(const SymMat& A, int k);

/// Eigenvalues in ascending order, by closed forms: quadratic formula for
/// n=2, trigonometric solution of the characteristic cubic for n=3.
std::vector<double> eigenvalues_sym(const SymMat& A);

/// True iff S_j(A) > 0 for every j = 1..k.
bool is_k_admissible(const SymMat& A, int k);

}  // namespace khess
