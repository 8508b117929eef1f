#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "khess/errors.hpp"
#include "khess/grid.hpp"
#include "khess/sym_mat.hpp"

namespace khess {

enum class LinearMethod { direct_banded, stationary_sweep, krylov };

struct LinearSolveParams {
    double tolerance = 1e-12;  ///< target residual max-norm
    int max_iterations = 20000;
    LinearMethod method = LinearMethod::krylov;
};

/// Per-node coefficient matrices, indexed by flat node id.
using SymMatField = std::vector<SymMat>;

/// Stencil operator over the interior rows of a grid, stored CSR-style.
/// Column indices are flat node ids, so an application reads boundary
/// values directly from the supplied mesh function.
class LinearOperator {
public:
    struct Entry {
        int col;     ///< flat node id
        double val;  ///< stencil coefficient
    };

    LinearOperator(std::shared_ptr<const Grid> grid, bool symmetric,
                   std::vector<int> row_offsets, std::vector<Entry> entries);

    const Grid& grid() const { return *grid_; }
    const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
    bool symmetric() const { return symmetric_; }
    int rows() const { return grid_->interior_count(); }

    std::span<const Entry> row(int ordinal) const {
        return {entries_.data() + row_offsets_[static_cast<size_t>(ordinal)],
                static_cast<size_t>(row_offsets_[static_cast<size_t>(ordinal) + 1] -
                                    row_offsets_[static_cast<size_t>(ordinal)])};
    }

    /// Stencil coefficient of row `row_flat` at neighbor `col_flat`
    /// (0 when the neighbor is not part of the stencil).
    double coefficient(int row_flat, int col_flat) const;

    /// out[ordinal] = (Op u)(x) for every interior x.
    void apply(const MeshFunction& u, std::vector<double>& out) const;

private:
    std::shared_ptr<const Grid> grid_;
    bool symmetric_;
    std::vector<int> row_offsets_;
    std::vector<Entry> entries_;
};

/// The discrete Laplacian as an assembled operator.
LinearOperator assemble_laplacian(std::shared_ptr<const Grid> grid);

/// v -> div_h(A D_h v) with backward first differences D_h and forward
/// divergence. Reads A at each interior node and at its forward axis
/// neighbors; the field must cover all nodes.
LinearOperator assemble_divergence_form(std::shared_ptr<const Grid> grid, const SymMatField& coeff);

/// v -> A(x) : H_d v(x). Only interior entries of the field are read.
LinearOperator assemble_nondivergence_form(std::shared_ptr<const Grid> grid,
                                           const SymMatField& coeff);

/// Solves Op u = rhs on the interior with u = boundary on the boundary
/// lattice. rhs is read at interior nodes, boundary at boundary nodes.
/// Throws SolveError when the backend cannot reach params.tolerance.
MeshFunction linear_solve(const LinearOperator& op, const MeshFunction& rhs,
                          const MeshFunction& boundary, const LinearSolveParams& params = {});

/// Same, seeding the iteration from warm_start's interior values.
MeshFunction linear_solve(const LinearOperator& op, const MeshFunction& rhs,
                          const MeshFunction& boundary, const LinearSolveParams& params,
                          const MeshFunction& warm_start);

/// Dirichlet Poisson solve: Delta_d u = rhs with u = boundary on the boundary.
MeshFunction solve_poisson(std::shared_ptr<const Grid> grid, const MeshFunction& rhs,
                           const MeshFunction& boundary, const LinearSolveParams& params = {});

}  // namespace khess
