#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "khess/elliptic.hpp"
#include "khess/grid.hpp"
#include "khess/problems.hpp"

namespace khess {

enum class InitialGuessRule { paper, maclaurin };

struct IterationConfig {
    double tolerance = 1e-10;  ///< successive-iterate max-norm target
    int max_outer = 20000;
    LinearSolveParams linear;
    bool clamp_radicand = true;
    InitialGuessRule initial_guess = InitialGuessRule::paper;
    /// Replaces c(k,n) in the fixed-point and Gauss-Seidel updates
    /// (e.g. 1/2 instead of c(2,2)=1/4 for the classic 2-d scheme).
    std::optional<double> c_override;
    /// Tolerance of the inner fixed-point solves of the degenerate
    /// double iteration; defaults to 1e-3 * tolerance.
    std::optional<double> inner_tolerance;
    double divergence_guard = 1e8;
};

enum class Termination { converged, budget_exhausted, diverged };

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history;       ///< max|f - S_k(H_d u^m)| per step
    std::vector<double> diff_history;           ///< max|u^m - u^{m-1}| per step
    std::vector<double> min_laplacian_history;  ///< min_x Delta_d u^m per step
    Termination termination = Termination::converged;
    double final_residual = 0.0;
    double final_diff = 0.0;
    /// Smallest eigenvalue of the frozen coefficient over interior nodes
    /// (linearized_cofactor_solve only).
    std::optional<double> coefficient_min_eigenvalue;
    /// Total inner fixed-point iterations (degenerate_ma_solve only).
    long long inner_iterations = 0;
};

using SolveResult = std::pair<MeshFunction, SolveReport>;

/// max over interior x of |S_k(H_d u(x)) - f(x)|.
double residual(const MeshFunction& u, const Problem& problem);

/// Poisson initial guess: Delta_d u0 = 2 sqrt(f) ("paper") or
/// (f/c(k,n))^{1/k} ("maclaurin"), with u0 = g on the boundary.
MeshFunction initial_guess(const Problem& problem, std::shared_ptr<const Grid> grid,
                           InitialGuessRule rule, const LinearSolveParams& linear = {});

/// Subharmonicity-preserving fixed point: each step solves
/// Delta_d u^{m+1} = ((Delta_d u^m)^k + (f - S_k(H_d u^m))/c(k,n))^{1/k}.
SolveResult fixed_point_solve(const Problem& problem, std::shared_ptr<const Grid> grid,
                              const IterationConfig& config = {});

/// Linearization with the coefficient {S_k^ij(H_d u0)} frozen at u0:
/// div_h(A D_h u^{m+1}) = div_h(A D_h u^m) + f - S_k(H_d u^m).
/// Locally convergent; supply u0 close to the solution.
SolveResult linearized_cofactor_solve(const Problem& problem, std::shared_ptr<const Grid> grid,
                                      const MeshFunction& u0, const IterationConfig& config = {});

/// Newton's method: {S_k^ij(H_d u^m)} : H_d(u^{m+1} - u^m) = f - S_k(H_d u^m).
SolveResult newton_solve(const Problem& problem, std::shared_ptr<const Grid> grid,
                         const IterationConfig& config = {});

/// Nonlinear Gauss-Seidel for k=2: pointwise root update in sweep order
/// with the radicand formed from the most recently computed values.
SolveResult nonlinear_gs_solve(const Problem& problem, std::shared_ptr<const Grid> grid,
                               const IterationConfig& config = {});

/// Partial Gauss-Seidel for k=2: the radicand is frozen at the previous
/// sweep's iterate; only the linear part uses updated values.
SolveResult partial_gs_solve(const Problem& problem, std::shared_ptr<const Grid> grid,
                             const IterationConfig& config = {});

/// Double iteration for the degenerate Monge-Ampere equation (k=3, n=3):
/// S_2(H_d u^{m+1}) = 3((S_2(H_d u^m)/3)^{3/2} + f - det H_d u^m)^{2/3},
/// with both S_2 and det terms zeroed wherever S_2(H_d u^m) <= 0; each
/// outer equation is solved by the k=2 fixed point.
SolveResult degenerate_ma_solve(const Problem& problem, std::shared_ptr<const Grid> grid,
                                const IterationConfig& config = {});

}  // namespace khess
