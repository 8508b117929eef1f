#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace khess {

/// Dense symmetric matrix of order n <= 3. Only the upper triangle is
/// stored, so symmetry is exact by construction.
class SymMat {
public:
    explicit SymMat(int order) : n_(order) {
        if (order < 1 || order > 3)
            throw std::invalid_argument("SymMat: order must be between 1 and 3");
        a_.fill(0.0);
    }

    static SymMat identity(int order) {
        SymMat m(order);
        for (int i = 0; i < order; ++i) m.set(i, i, 1.0);
        return m;
    }

    int order() const { return n_; }

    double operator()(int i, int j) const { return a_[pack(i, j)]; }
    void set(int i, int j, double v) { a_[pack(i, j)] = v; }
    void add(int i, int j, double v) { a_[pack(i, j)] += v; }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    /// Double contraction A:B = sum_ij a_ij b_ij.
    double contract(const SymMat& b) const {
        assert(b.order() == n_);
        double s = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) s += (*this)(i, j) * b(i, j);
        return s;
    }

    double max_abs() const {
        double m = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j)));
        return m;
    }

private:
    static int pack(int i, int j) {
        assert(i >= 0 && i < 3 && j >= 0 && j < 3);
        if (i > j) std::swap(i, j);
        // (0,0)(0,1)(0,2) -> 0,1,2   (1,1)(1,2) -> 3,4   (2,2) -> 5
        if (i == 0) return j;
        if (i == 1) return j + 2;
        return 5;
    }

    int n_;
    std::array<double, 6> a_;
};

}  // namespace khess
