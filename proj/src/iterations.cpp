#include "khess/iterations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "khess/hessian_algebra.hpp"

namespace khess {

namespace {

// Grid-sampled problem data: f on interior nodes (by ordinal), g on the
// boundary lattice. f is never evaluated at boundary nodes, so data like
// Test 3 with a corner singularity stays finite.
struct DiscreteData {
    std::shared_ptr<const Grid> grid;
    int k = 2;
    std::vector<double> f;    // by interior ordinal
    MeshFunction boundary;    // g on boundary nodes, 0 inside

    DiscreteData(std::shared_ptr<const Grid> g, int order) : grid(std::move(g)), k(order), boundary(grid) {}
};

DiscreteData discretize(const Problem& p, std::shared_ptr<const Grid> grid) {
    if (p.n != grid->dim()) throw std::invalid_argument("problem dimension does not match grid");
    HessianOrder order(p.k, p.n);  // validates
    DiscreteData d(std::move(grid), order.k);
    const Grid& g = *d.grid;
    d.f.resize(static_cast<size_t>(g.interior_count()));
    for (int r = 0; r < g.interior_count(); ++r) {
        const double v = p.f(g.node_coords(g.interior_nodes()[static_cast<size_t>(r)]));
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite sample");
        d.f[static_cast<size_t>(r)] = v;
    }
    for (int fl = 0; fl < g.node_count(); ++fl) {
        if (!g.is_boundary(fl)) continue;
        const double v = p.g(g.node_coords(fl));
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite sample");
        d.boundary[fl] = v;
    }
    return d;
}

double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

double kth_root(double x, int k) {
    if (k == 1) return x;
    if (k == 2) return std::sqrt(x);
    return std::cbrt(x);
}

double residual_interior(const MeshFunction& u, const DiscreteData& d) {
    const Grid& g = u.grid();
    double r = 0.0;
    for (int i = 0; i < g.interior_count(); ++i) {
        const int fl = g.interior_nodes()[static_cast<size_t>(i)];
        r = std::max(r, std::abs(s_k(discrete_hessian(u, fl), d.k) - d.f[static_cast<size_t>(i)]));
    }
    return r;
}

double min_interior_laplacian(const MeshFunction& u) {
    const Grid& g = u.grid();
    double mn = std::numeric_limits<double>::infinity();
    for (int fl : g.interior_nodes()) mn = std::min(mn, discrete_laplacian(u, fl));
    return mn;
}

bool diverged(const MeshFunction& u, double guard) {
    for (double v : u.values())
        if (!std::isfinite(v) || std::abs(v) > guard) return true;
    return false;
}

void record_step(SolveReport& rep, const MeshFunction& u, const DiscreteData& d, double diff) {
    rep.diff_history.push_back(diff);
    rep.residual_history.push_back(residual_interior(u, d));
    rep.min_laplacian_history.push_back(min_interior_laplacian(u));
    rep.iterations = static_cast<int>(rep.diff_history.size());
    rep.final_diff = diff;
    rep.final_residual = rep.residual_history.back();
}

// Records a step that tripped the divergence guard without touching the
// runaway iterate again.
void record_diverged(SolveReport& rep, double diff) {
    rep.diff_history.push_back(diff);
    rep.residual_history.push_back(std::numeric_limits<double>::infinity());
    rep.min_laplacian_history.push_back(-std::numeric_limits<double>::infinity());
    rep.iterations = static_cast<int>(rep.diff_history.size());
    rep.final_diff = diff;
    rep.final_residual = rep.residual_history.back();
    rep.termination = Termination::diverged;
}

double effective_c(const IterationConfig& cfg, int k, int n) {
    if (cfg.c_override) return *cfg.c_override;
    return c_const(k, n).value();
}

void check_config(const IterationConfig& cfg) {
    if (!(cfg.tolerance > 0.0) || cfg.max_outer < 1)
        throw std::invalid_argument("invalid iteration config");
}

MeshFunction initial_guess_data(const DiscreteData& d, InitialGuessRule rule, int k, int n,
                                const LinearSolveParams& linear) {
    const Grid& g = *d.grid;
    MeshFunction rhs(d.grid);
    const double c = c_const(k, n).value();
    for (int i = 0; i < g.interior_count(); ++i) {
        const double fv = d.f[static_cast<size_t>(i)];
        if (fv < 0.0) throw std::invalid_argument("negative right-hand side");
        const double v = (rule == InitialGuessRule::paper) ? 2.0 * std::sqrt(fv)
                                                           : std::pow(fv / c, 1.0 / k);
        rhs[g.interior_nodes()[static_cast<size_t>(i)]] = v;
    }
    return solve_poisson(d.grid, rhs, d.boundary, linear);
}

// One fixed-point solve on already-discretized data, starting from `u`.
// The Laplacian operator is shared by all steps.
SolveReport fixed_point_iterate(MeshFunction& u, const DiscreteData& d,
                                const LinearOperator& lap, const IterationConfig& cfg) {
    const Grid& g = *d.grid;
    const double c = effective_c(cfg, d.k, g.dim());
    SolveReport rep;
    MeshFunction rhs(d.grid);
    for (int m = 0; m < cfg.max_outer; ++m) {
        for (int i = 0; i < g.interior_count(); ++i) {
            const int fl = g.interior_nodes()[static_cast<size_t>(i)];
            const SymMat H = discrete_hessian(u, fl);
            const double lap_u = H.trace();
            double radicand = ipow(lap_u, d.k) + (d.f[static_cast<size_t>(i)] - s_k(H, d.k)) / c;
            if (radicand < 0.0) {
                if (!cfg.clamp_radicand)
                    throw SolveError("radicand negative at node " + std::to_string(fl), radicand);
                radicand = 0.0;
            }
            rhs[fl] = kth_root(radicand, d.k);
        }
        MeshFunction next = linear_solve(lap, rhs, d.boundary, cfg.linear, u);
        const double diff = max_diff(next, u);
        u = std::move(next);
        if (diverged(u, cfg.divergence_guard)) {
            record_diverged(rep, diff);
            return rep;
        }
        record_step(rep, u, d, diff);
        if (diff <= cfg.tolerance) {
            rep.termination = Termination::converged;
            return rep;
        }
    }
    rep.termination = Termination::budget_exhausted;
    return rep;
}

// Extends an interior coefficient field to the whole lattice by clamping
// each index to the nearest interior node (one-sided availability).
SymMatField extend_to_boundary(const Grid& g, const std::vector<SymMat>& interior_field) {
    SymMatField full(static_cast<size_t>(g.node_count()), SymMat(g.dim()));
    for (int fl = 0; fl < g.node_count(); ++fl) {
        auto mi = g.multi_index(fl);
        for (int a = 0; a < g.dim(); ++a)
            mi[static_cast<size_t>(a)] = std::clamp(mi[static_cast<size_t>(a)], 1, g.subdivisions() - 1);
        const int src = g.flat_index(mi[0], mi[1], mi[2]);
        full[static_cast<size_t>(fl)] =
            interior_field[static_cast<size_t>(g.interior_ordinal(src))];
    }
    return full;
}

std::vector<SymMat> gradient_field(const MeshFunction& u, int k) {
    const Grid& g = u.grid();
    std::vector<SymMat> field;
    field.reserve(static_cast<size_t>(g.interior_count()));
    for (int fl : g.interior_nodes()) field.push_back(s_k_gradient(discrete_hessian(u, fl), k));
    return field;
}

}  // namespace

double residual(const MeshFunction& u, const Problem& problem) {
    const DiscreteData d = discretize(problem, u.grid_ptr());
    return residual_interior(u, d);
}

MeshFunction initial_guess(const Problem& problem, std::shared_ptr<const Grid> grid,
                           InitialGuessRule rule, const LinearSolveParams& linear) {
    const DiscreteData d = discretize(problem, std::move(grid));
    return initial_guess_data(d, rule, problem.k, problem.n, linear);
}

SolveResult fixed_point_solve(const Problem& problem, std::shared_ptr<const Grid> grid,
                              const IterationConfig& config) {
    check_config(config);
    const DiscreteData d = discretize(problem, std::move(grid));
    MeshFunction u = initial_guess_data(d, config.initial_guess, d.k, d.grid->dim(), config.linear);
    const LinearOperator lap = assemble_laplacian(d.grid);
    SolveReport rep = fixed_point_iterate(u, d, lap, config);
    return {std::move(u), std::move(rep)};
}

SolveResult linearized_cofactor_solve(const Problem& problem, std::shared_ptr<const Grid> grid,
                                      const MeshFunction& u0, const IterationConfig& config) {
    check_config(config);
    const DiscreteData d = discretize(problem, std::move(grid));
    const Grid& g = *d.grid;
    if (u0.grid().node_count() != g.node_count())
        throw std::invalid_argument("u0 grid does not match solve grid");

    const std::vector<SymMat> interior_coeff = gradient_field(u0, d.k);
    double min_eig = std::numeric_limits<double>::infinity();
    for (const SymMat& a : interior_coeff) min_eig = std::min(min_eig, eigenvalues_sym(a).front());
    const SymMatField coeff = extend_to_boundary(g, interior_coeff);
    const LinearOperator op = assemble_divergence_form(d.grid, coeff);

    SolveReport rep;
    rep.coefficient_min_eigenvalue = min_eig;
    MeshFunction u = u0;
    MeshFunction rhs(d.grid);
    std::vector<double> op_u;
    for (int m = 0; m < config.max_outer; ++m) {
        op.apply(u, op_u);
        for (int i = 0; i < g.interior_count(); ++i) {
            const int fl = g.interior_nodes()[static_cast<size_t>(i)];
            rhs[fl] = op_u[static_cast<size_t>(i)] + d.f[static_cast<size_t>(i)] -
                      s_k(discrete_hessian(u, fl), d.k);
        }
        MeshFunction next = [&] {
            try {
                return linear_solve(op, rhs, d.boundary, config.linear, u);
            } catch (const SolveError& e) {
                if (std::string(e.what()) == "solver breakdown")
                    throw SolveError("frozen coefficient not elliptic", e.achieved_residual());
                throw;
            }
        }();
        const double diff = max_diff(next, u);
        u = std::move(next);
        if (diverged(u, config.divergence_guard)) {
            record_diverged(rep, diff);
            return {std::move(u), std::move(rep)};
        }
        record_step(rep, u, d, diff);
        if (diff <= config.tolerance) {
            rep.termination = Termination::converged;
            return {std::move(u), std::move(rep)};
        }
    }
    rep.termination = Termination::budget_exhausted;
    return {std::move(u), std::move(rep)};
}

SolveResult newton_solve(const Problem& problem, std::shared_ptr<const Grid> grid,
                         const IterationConfig& config) {
    check_config(config);
    const DiscreteData d = discretize(problem, std::move(grid));
    const Grid& g = *d.grid;
    MeshFunction u = initial_guess_data(d, config.initial_guess, d.k, g.dim(), config.linear);
    const MeshFunction zero_boundary(d.grid, 0.0);

    SolveReport rep;
    MeshFunction rhs(d.grid);
    for (int m = 0; m < config.max_outer; ++m) {
        std::vector<SymMat> coeff(static_cast<size_t>(g.node_count()), SymMat(g.dim()));
        for (int i = 0; i < g.interior_count(); ++i) {
            const int fl = g.interior_nodes()[static_cast<size_t>(i)];
            const SymMat H = discrete_hessian(u, fl);
            coeff[static_cast<size_t>(fl)] = s_k_gradient(H, d.k);
            rhs[fl] = d.f[static_cast<size_t>(i)] - s_k(H, d.k);
        }
        const LinearOperator op = assemble_nondivergence_form(d.grid, coeff);
        MeshFunction delta = [&] {
            try {
                return linear_solve(op, rhs, zero_boundary, config.linear);
            } catch (const SolveError& e) {
                if (std::string(e.what()) == "solver breakdown")
                    throw SolveError("Newton linearization not solvable", e.achieved_residual());
                throw;
            }
        }();
        double diff = 0.0;
        for (int fl = 0; fl < g.node_count(); ++fl) {
            u[fl] += delta[fl];
            diff = std::max(diff, std::abs(delta[fl]));
        }
        if (diverged(u, config.divergence_guard)) {
            record_diverged(rep, diff);
            return {std::move(u), std::move(rep)};
        }
        record_step(rep, u, d, diff);
        if (diff <= config.tolerance) {
            rep.termination = Termination::converged;
            return {std::move(u), std::move(rep)};
        }
    }
    rep.termination = Termination::budget_exhausted;
    return {std::move(u), std::move(rep)};
}

namespace {

// Shared sweep loop of the two Gauss-Seidel variants. `frozen_radicand`
// evaluates the radicand at the previous sweep's iterate instead of the
// in-place values.
SolveResult gauss_seidel_common(const Problem& problem, std::shared_ptr<const Grid> grid,
                                const IterationConfig& config, bool frozen_radicand) {
    check_config(config);
    if (problem.k != 2) throw std::invalid_argument("gauss-seidel variants require k = 2");
    const DiscreteData d = discretize(problem, std::move(grid));
    const Grid& g = *d.grid;
    const int n = g.dim();
    const double h2 = g.spacing() * g.spacing();
    const double inv_c = 1.0 / effective_c(config, 2, n);

    MeshFunction u = initial_guess_data(d, config.initial_guess, 2, n, config.linear);

    // f indexed by flat id for O(1) access inside the sweep
    std::vector<double> f_flat(static_cast<size_t>(g.node_count()), 0.0);
    for (int i = 0; i < g.interior_count(); ++i)
        f_flat[static_cast<size_t>(g.interior_nodes()[static_cast<size_t>(i)])] = d.f[static_cast<size_t>(i)];

    SolveReport rep;
    MeshFunction prev = u;
    for (int sweep = 0; sweep < config.max_outer; ++sweep) {
        if (frozen_radicand) prev = u;
        const MeshFunction& rad_src = frozen_radicand ? prev : u;
        double dmax = 0.0;
        for (int fl : g.interior_nodes()) {
            const SymMat H = discrete_hessian(rad_src, fl);
            const double lap_u = H.trace();
            double radicand = lap_u * lap_u + inv_c * (f_flat[static_cast<size_t>(fl)] - s_k(H, 2));
            if (radicand < 0.0) {
                if (!config.clamp_radicand)
                    throw SolveError("radicand negative at node " + std::to_string(fl), radicand);
                radicand = 0.0;
            }
            double neighbor_sum = 0.0;
            for (int a = 0; a < n; ++a)
                neighbor_sum += u[fl + g.stride(a)] + u[fl - g.stride(a)];
            // root with Delta_d u >= 0
            const double updated = (h2 / (2.0 * n)) * (neighbor_sum / h2 - std::sqrt(radicand));
            dmax = std::max(dmax, std::abs(updated - u[fl]));
            u[fl] = updated;
        }
        if (diverged(u, config.divergence_guard)) {
            record_diverged(rep, dmax);
            return {std::move(u), std::move(rep)};
        }
        record_step(rep, u, d, dmax);
        if (dmax <= config.tolerance) {
            rep.termination = Termination::converged;
            return {std::move(u), std::move(rep)};
        }
    }
    rep.termination = Termination::budget_exhausted;
    return {std::move(u), std::move(rep)};
}

}  // namespace

SolveResult nonlinear_gs_solve(const Problem& problem, std::shared_ptr<const Grid> grid,
                               const IterationConfig& config) {
    return gauss_seidel_common(problem, std::move(grid), config, false);
}

SolveResult partial_gs_solve(const Problem& problem, std::shared_ptr<const Grid> grid,
                             const IterationConfig& config) {
    return gauss_seidel_common(problem, std::move(grid), config, true);
}

SolveResult degenerate_ma_solve(const Problem& problem, std::shared_ptr<const Grid> grid,
                                const IterationConfig& config) {
    check_config(config);
    if (problem.k != 3 || problem.n != 3)
        throw std::invalid_argument("degenerate-ma requires k = 3, n = 3");
    const DiscreteData d = discretize(problem, std::move(grid));
    const Grid& g = *d.grid;

    MeshFunction u = initial_guess_data(d, config.initial_guess, 3, 3, config.linear);
    const LinearOperator lap = assemble_laplacian(d.grid);

    IterationConfig inner_cfg = config;
    inner_cfg.tolerance = config.inner_tolerance.value_or(1e-3 * config.tolerance);
    inner_cfg.c_override.reset();

    DiscreteData inner(d.grid, 2);
    inner.boundary = d.boundary;
    inner.f.resize(static_cast<size_t>(g.interior_count()));

    SolveReport rep;
    for (int m = 0; m < config.max_outer; ++m) {
        for (int i = 0; i < g.interior_count(); ++i) {
            const int fl = g.interior_nodes()[static_cast<size_t>(i)];
            const SymMat H = discrete_hessian(u, fl);
            const double s2 = s_k(H, 2);
            double t = d.f[static_cast<size_t>(i)];
            if (s2 > 0.0) t += std::pow(s2 / 3.0, 1.5) - s_k(H, 3);
            if (t < 0.0) t = 0.0;
            inner.f[static_cast<size_t>(i)] = 3.0 * std::cbrt(t * t);
        }
        MeshFunction next = u;
        const SolveReport inner_rep = fixed_point_iterate(next, inner, lap, inner_cfg);
        rep.inner_iterations += inner_rep.iterations;
        if (inner_rep.termination != Termination::converged)
            throw SolveError("degenerate Monge-Ampere outer step " + std::to_string(m + 1) +
                                 ": inner fixed point did not converge",
                             inner_rep.final_residual);
        const double diff = max_diff(next, u);
        u = std::move(next);
        if (diverged(u, config.divergence_guard)) {
            record_diverged(rep, diff);
            return {std::move(u), std::move(rep)};
        }
        record_step(rep, u, d, diff);
        if (diff <= config.tolerance) {
            rep.termination = Termination::converged;
            return {std::move(u), std::move(rep)};
        }
    }
    rep.termination = Termination::budget_exhausted;
    return {std::move(u), std::move(rep)};
}

}  // namespace khess
