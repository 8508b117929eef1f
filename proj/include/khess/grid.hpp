#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "khess/sym_mat.hpp"

namespace khess {

/// Point in the closed unit cube. Components beyond the grid dimension are 0.
using Point = std::array<double, 3>;

using ScalarField = std::function<double(const Point&)>;

/// Uniform lattice over [0,1]^n with spacing h = 1/m, n in {2,3}.
///
/// Nodes carry multi-indices in {0..m}^n and are stored row-major with
/// axis 1 fastest; interior nodes listed in that order define the
/// Gauss-Seidel sweep order. A node is boundary iff some index is 0 or m.
class Grid {
public:
    Grid(int dim, int subdivisions);

    int dim() const { return n_; }
    int subdivisions() const { return m_; }
    double spacing() const { return h_; }
    int node_count() const { return node_count_; }
    int interior_count() const { return static_cast<int>(interior_.size()); }
    int nodes_per_axis() const { return m_ + 1; }

    bool is_interior(int flat) const { return interior_ordinal_[flat] >= 0; }
    bool is_boundary(int flat) const { return !is_interior(flat); }

    int flat_index(int i0, int i1, int i2 = 0) const {
        return i0 + stride_[1] * i1 + stride_[2] * i2;
    }
    std::array<int, 3> multi_index(int flat) const;
    Point node_coords(int flat) const;

    /// Flat ids of interior nodes in sweep (row) order.
    const std::vector<int>& interior_nodes() const { return interior_; }
    /// Position of a node in interior_nodes(), or -1 for boundary nodes.
    int interior_ordinal(int flat) const { return interior_ordinal_[flat]; }

    /// Flat-index offset of one step along an axis.
    int stride(int axis) const { return stride_[axis]; }

private:
    int n_;
    int m_;
    double h_;
    int node_count_;
    std::array<int, 3> stride_;
    std::vector<int> interior_;
    std::vector<int> interior_ordinal_;
};

std::shared_ptr<const Grid> build_grid(int dim, int subdivisions);

/// Real values on every node of a grid (the discrete solution space).
class MeshFunction {
public:
    explicit MeshFunction(std::shared_ptr<const Grid> grid, double fill = 0.0)
        : grid_(std::move(grid)), v_(static_cast<size_t>(grid_->node_count()), fill) {}

    const Grid& grid() const { return *grid_; }
    const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }

    double operator[](int flat) const { return v_[static_cast<size_t>(flat)]; }
    double& operator[](int flat) { return v_[static_cast<size_t>(flat)]; }

    std::span<const double> values() const { return v_; }
    std::vector<double>& data() { return v_; }
    const std::vector<double>& data() const { return v_; }

private:
    std::shared_ptr<const Grid> grid_;
    std::vector<double> v_;
};

/// Samples v at every grid node. Throws if a sample is not finite.
MeshFunction restrict_to_grid(const ScalarField& v, std::shared_ptr<const Grid> grid);

/// Central-difference Hessian at an interior node: 3-point second
/// differences on the diagonal, 4-point cross stencils off it.
SymMat discrete_hessian(const MeshFunction& u, int flat);

/// Sum of the axis second differences; equals trace(discrete_hessian) exactly.
double discrete_laplacian(const MeshFunction& u, int flat);

double max_norm(const MeshFunction& u);
double max_diff(const MeshFunction& a, const MeshFunction& b);

}  // namespace khess
