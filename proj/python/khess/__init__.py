"""Finite-difference solvers for k-Hessian Dirichlet problems on the unit cube."""

from ._core import (
    Grid,
    IterationConfig,
    InitialGuessRule,
    LinearMethod,
    LinearSolveParams,
    MeshFunction,
    MethodTag,
    Problem,
    Rational,
    RunConfig,
    SolveError,
    SolveReport,
    StudyRow,
    SymMat,
    Termination,
    build_grid,
    c_const,
    custom_problem,
    degenerate_ma_solve,
    discrete_hessian,
    discrete_laplacian,
    eigenvalues_sym,
    export_slice,
    fixed_point_solve,
    initial_guess,
    is_k_admissible,
    linearized_cofactor_solve,
    make_problem,
    max_diff,
    max_error,
    max_norm,
    method_name,
    newton_solve,
    nonlinear_gs_solve,
    parse_method,
    parse_study_csv,
    partial_gs_solve,
    read_field_file,
    render_table,
    residual,
    restrict_to_grid,
    run_convergence_study,
    s_k,
    s_k_gradient,
    write_field_file,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
