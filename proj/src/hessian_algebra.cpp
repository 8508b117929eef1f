#include "khess/hessian_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace khess {

HessianOrder::HessianOrder(int k_, int n_) : k(k_), n(n_) {
    if (k < 1 || n < k || n > 3) throw std::invalid_argument("invalid order");
}

Rational c_const(int k, int n) {
    if (k < 1 || n < k || n > 16) throw std::invalid_argument("invalid order");
    long long binom = 1;
    for (int i = 1; i <= k; ++i) binom = binom * (n - k + i) / i;
    long long pow_nk = 1;
    for (int i = 0; i < k; ++i) pow_nk *= n;
    const long long g = std::gcd(binom, pow_nk);
    return Rational{binom / g, pow_nk / g};
}

namespace {

void check_order(const SymMat& A, int k) {
    if (k < 1 || k > A.order()) throw std::invalid_argument("invalid order");
}

double det3(const SymMat& A) {
    return A(0, 0) * (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)) -
           A(0, 1) * (A(1, 0) * A(2, 2) - A(1, 2) * A(2, 0)) +
           A(0, 2) * (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0));
}

}  // namespace

double s_k(const SymMat& A, int k) {
    check_order(A, k);
    const int n = A.order();
    if (k == 1) return A.trace();
    if (k == 2) {
        if (n == 2) return A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
        return A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0) +
               A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0) +
               A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
    }
    return det3(A);
}

SymMat s_k_gradient(const SymMat& A, int k) {
    check_order(A, k);
    const int n = A.order();
    if (k == 1) return SymMat::identity(n);
    SymMat G(n);
    if (k == 2) {
        // d/da_ii = sum of the other diagonal entries, d/da_ij = -a_ji
        const double tr = A.trace();
        for (int i = 0; i < n; ++i) G.set(i, i, tr - A(i, i));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) G.set(i, j, -A(j, i));
        return G;
    }
    // k = n = 3: cofactor matrix
    G.set(0, 0, A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1));
    G.set(0, 1, A(1, 2) * A(2, 0) - A(1, 0) * A(2, 2));
    G.set(0, 2, A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0));
    G.set(1, 1, A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0));
    G.set(1, 2, A(0, 1) * A(2, 0) - A(0, 0) * A(2, 1));
    G.set(2, 2, A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0));
    return G;
}

std::vector<double> eigenvalues_sym(const SymMat& A) {
    const int n = A.order();
    if (n == 1) return {A(0, 0)};
    if (n == 2) {
        const double mean = 0.5 * (A(0, 0) + A(1, 1));
        const double half_gap = 0.5 * (A(0, 0) - A(1, 1));
        const double r = std::hypot(half_gap, A(0, 1));
        return {mean - r, mean + r};
    }
    // Trigonometric solution of the characteristic cubic for symmetric 3x3.
    const double q = A.trace() / 3.0;
    const double p1 = A(0, 1) * A(0, 1) + A(0, 2) * A(0, 2) + A(1, 2) * A(1, 2);
    const double p2 = (A(0, 0) - q) * (A(0, 0) - q) + (A(1, 1) - q) * (A(1, 1) - q) +
                      (A(2, 2) - q) * (A(2, 2) - q) + 2.0 * p1;
    if (p2 <= 0.0) return {q, q, q};  // scalar multiple of the identity
    const double p = std::sqrt(p2 / 6.0);
    SymMat B(3);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) B.set(i, j, (A(i, j) - (i == j ? q : 0.0)) / p);
    double r = det3(B) / 2.0;
    r = std::clamp(r, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double two_pi_3 = 2.0 * std::numbers::pi / 3.0;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + two_pi_3);
    const double e2 = 3.0 * q - e1 - e3;
    std::vector<double> ev{e1, e2, e3};
    std::sort(ev.begin(), ev.end());
    return ev;
}

bool is_k_admissible(const SymMat& A, int k) {
    check_order(A, k);
    for (int j = 1; j <= k; ++j)
        if (s_k(A, j) <= 0.0) return false;
    return true;
}

}  // namespace khess
