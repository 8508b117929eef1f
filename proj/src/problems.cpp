#include "khess/problems.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "khess/hessian_algebra.hpp"

namespace khess {

namespace {

double r2(const Point& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }

Problem quadratic_problem(int k, int n) {
    HessianOrder order(k, n);  // validates
    if (n != 2 && n != 3) throw std::invalid_argument("unsupported dimension");
    Problem p;
    p.n = n;
    p.k = k;
    p.label = "quadratic(" + std::to_string(k) + "," + std::to_string(n) + ")";
    auto u = [n](const Point& x) {
        double s = 0.0;
        for (int a = 0; a < n; ++a) s += x[static_cast<size_t>(a)] * x[static_cast<size_t>(a)];
        return s;
    };
    // S_k(2 I) = binom(n,k) 2^k
    long long binom = 1;
    for (int i = 1; i <= k; ++i) binom = binom * (n - k + i) / i;
    const double fval = static_cast<double>(binom << k);
    p.f = [fval](const Point&) { return fval; };
    p.g = u;
    p.exact = u;
    return p;
}

}  // namespace

Problem make_problem(const std::string& label) {
    Problem p;
    p.label = label;
    if (label == "test1") {
        // u = e^{r^2}, strictly convex; S_2(D^2 u) = 4(3+4r^2)e^{2r^2}
        p.n = 3;
        p.k = 2;
        p.exact = [](const Point& x) { return std::exp(r2(x)); };
        p.f = [](const Point& x) {
            const double s = r2(x);
            return 4.0 * (3.0 + 4.0 * s) * std::exp(2.0 * s);
        };
        p.g = *p.exact;
        return p;
    }
    if (label == "test2") {
        // u = ln(2+r^2), 2-convex but not convex
        p.n = 3;
        p.k = 2;
        p.exact = [](const Point& x) { return std::log(2.0 + r2(x)); };
        p.f = [](const Point& x) {
            const double s = r2(x);
            const double a = 2.0 + s;
            return 4.0 * (6.0 - s) / (a * a * a);
        };
        p.g = *p.exact;
        return p;
    }
    if (label == "test3") {
        // u = -sqrt(3-r^2), not in H^2; f is singular only at the corner
        // node (1,1,1), which is boundary and never sampled for f
        p.n = 3;
        p.k = 2;
        p.exact = [](const Point& x) { return -std::sqrt(3.0 - r2(x)); };
        p.f = [](const Point& x) {
            const double s = r2(x);
            const double d = 3.0 - s;
            return (9.0 - s) / (d * d);
        };
        p.g = *p.exact;
        return p;
    }
    if (label == "test4") {
        p.n = 3;
        p.k = 2;
        p.f = [](const Point&) { return 1.0; };
        p.g = [](const Point&) { return 0.0; };
        return p;
    }
    if (label == "test5") {
        // degenerate Monge-Ampere data
        p.n = 3;
        p.k = 3;
        p.f = [](const Point&) { return 0.0; };
        p.g = [](const Point& x) { return std::abs(x[0] - 0.5); };
        return p;
    }
    int k = 0, n = 0;
    if (std::sscanf(label.c_str(), "quadratic(%d,%d)", &k, &n) == 2) return quadratic_problem(k, n);
    throw std::invalid_argument("unknown problem label: " + label);
}

double max_error(const MeshFunction& u, const Problem& problem) {
    if (!problem.exact) throw std::invalid_argument("no exact solution");
    const Grid& g = u.grid();
    double err = 0.0;
    for (int fl = 0; fl < g.node_count(); ++fl)
        err = std::max(err, std::abs(u[fl] - (*problem.exact)(g.node_coords(fl))));
    return err;
}

double test2_laplacian_exact(const Point& x) {
    const double s = r2(x);
    const double a = 2.0 + s;
    return (12.0 + 2.0 * s) / (a * a);
}

double test2_det_exact(const Point& x) {
    const double s = r2(x);
    const double a = 2.0 + s;
    return 8.0 * (2.0 - s) / (a * a * a * a);
}

}  // namespace khess
