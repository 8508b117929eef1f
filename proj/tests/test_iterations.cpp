#include <doctest.h>

#include <cmath>
#include <random>

#include "khess/hessian_algebra.hpp"
#include "khess/iterations.hpp"

using namespace khess;

namespace {

Problem constant_one_problem(int n) {
    Problem p;
    p.n = n;
    p.k = 2;
    p.f = [](const Point&) { return 1.0; };
    p.g = [](const Point&) { return 0.0; };
    p.label = "ones";
    return p;
}

IterationConfig tight(double tol = 1e-10) {
    IterationConfig cfg;
    cfg.tolerance = tol;
    return cfg;
}

}  // namespace

TEST_SUITE("iterations") {

TEST_CASE("residual against two algebraic routes") {
    const Problem q = make_problem("quadratic(2,3)");
    auto g = build_grid(3, 4);
    const MeshFunction uq = restrict_to_grid(*q.exact, g);
    CHECK(residual(uq, q) <= 1e-10);

    const Problem ones = constant_one_problem(2);
    auto g2 = build_grid(2, 4);
    CHECK(residual(MeshFunction(g2, 0.0), ones) == 1.0);

    // S_k via minors must match the elementary symmetric function of the
    // spectrum when measuring the same residual
    const Problem t1 = make_problem("test1");
    auto g3 = build_grid(3, 8);
    const MeshFunction u1 = restrict_to_grid(*t1.exact, g3);
    double via_eigen = 0.0;
    for (int fl : g3->interior_nodes()) {
        const auto ev = eigenvalues_sym(discrete_hessian(u1, fl));
        const double s2 = ev[0] * ev[1] + ev[0] * ev[2] + ev[1] * ev[2];
        via_eigen = std::max(via_eigen, std::abs(s2 - t1.f(g3->node_coords(fl))));
    }
    const double direct = residual(u1, t1);
    CHECK(direct == doctest::Approx(via_eigen).epsilon(1e-8));
    // the restriction residual is the consistency error; it shrinks under refinement
    CHECK(residual(restrict_to_grid(*t1.exact, build_grid(3, 16)), t1) < direct);
}

TEST_CASE("initial guess rules") {
    Problem harmonic;
    harmonic.n = 2;
    harmonic.k = 2;
    harmonic.f = [](const Point&) { return 0.0; };
    harmonic.g = [](const Point& p) { return p[0]; };
    auto g = build_grid(2, 6);
    const MeshFunction u0 = initial_guess(harmonic, g, InitialGuessRule::paper);
    CHECK(max_diff(u0, restrict_to_grid(harmonic.g, g)) <= 1e-10);

    // zero data: the guess is discrete harmonic
    const Problem t5 = make_problem("test5");
    auto g5 = build_grid(3, 8);
    const MeshFunction w0 = initial_guess(t5, g5, InitialGuessRule::paper);
    double min_lap = 1e300;
    for (int fl : g5->interior_nodes()) min_lap = std::min(min_lap, discrete_laplacian(w0, fl));
    CHECK(min_lap >= -1e-10);

    // maclaurin for k=2, n=3 solves Delta u0 = sqrt(3 f)
    const Problem t1 = make_problem("test1");
    auto g1 = build_grid(3, 6);
    const MeshFunction m0 = initial_guess(t1, g1, InitialGuessRule::maclaurin);
    double gap = 0.0, scale = 0.0;
    for (int fl : g1->interior_nodes()) {
        const double want = std::sqrt(3.0 * t1.f(g1->node_coords(fl)));
        gap = std::max(gap, std::abs(discrete_laplacian(m0, fl) - want));
        scale = std::max(scale, want);
    }
    CHECK(gap <= 1e-9 * (1.0 + scale));

    Problem negative = constant_one_problem(2);
    negative.f = [](const Point&) { return -1.0; };
    CHECK_THROWS_WITH_AS(initial_guess(negative, g, InitialGuessRule::paper),
                         "negative right-hand side", std::invalid_argument);
}

TEST_CASE("fixed point solves the k=1 problem in at most two steps") {
    const Problem q1 = make_problem("quadratic(1,3)");
    auto g = build_grid(3, 6);

    IterationConfig mac = tight();
    mac.initial_guess = InitialGuessRule::maclaurin;
    auto [u, rep] = fixed_point_solve(q1, g, mac);
    CHECK(rep.termination == Termination::converged);
    CHECK(rep.iterations <= 2);
    CHECK(max_error(u, q1) <= 1e-8);

    auto [up, repp] = fixed_point_solve(q1, g, tight());  // paper rule
    CHECK(repp.termination == Termination::converged);
    CHECK(repp.iterations <= 2);
    CHECK(max_error(up, q1) <= 1e-8);
}

TEST_CASE("fixed point is exact on quadratic data") {
    for (const char* label : {"quadratic(2,2)", "quadratic(2,3)", "quadratic(3,3)"}) {
        const Problem q = make_problem(label);
        auto g = build_grid(q.n, 6);
        auto [u, rep] = fixed_point_solve(q, g, tight());
        CHECK(rep.termination == Termination::converged);
        CHECK(max_error(u, q) <= 10.0 * 1e-10 + 1e-8);
    }
}

TEST_CASE("fixed point reproduces the m=8 strictly convex benchmark") {
    const Problem t1 = make_problem("test1");
    auto [u, rep] = fixed_point_solve(t1, build_grid(3, 8), tight());
    CHECK(rep.termination == Termination::converged);
    CHECK(max_error(u, t1) == doctest::Approx(7.7836e-3).epsilon(0.02));
    CHECK(rep.diff_history.size() == static_cast<size_t>(rep.iterations));
    CHECK(rep.residual_history.size() == static_cast<size_t>(rep.iterations));
    CHECK(rep.min_laplacian_history.size() == static_cast<size_t>(rep.iterations));
    CHECK(rep.diff_history.back() <= 1e-10);
    CHECK(rep.final_diff == rep.diff_history.back());
}

TEST_CASE("fixed point preserves subharmonicity along the run") {
    const Problem t1 = make_problem("test1");
    auto [u, rep] = fixed_point_solve(t1, build_grid(3, 8), tight());
    for (double mn : rep.min_laplacian_history) CHECK(mn >= -1e-8);

    const Problem t4 = make_problem("test4");
    auto [u4, rep4] = fixed_point_solve(t4, build_grid(3, 8), tight());
    for (double mn : rep4.min_laplacian_history) CHECK(mn >= -1e-8);
}

TEST_CASE("negative radicand: clamp on proceeds, clamp off reports the node") {
    // trilinear boundary data make H_d u0 purely off-diagonal with positive
    // determinant, so the k=3 radicand goes negative at the first step
    Problem p;
    p.n = 3;
    p.k = 3;
    p.f = [](const Point&) { return 0.0; };
    p.g = [](const Point& x) { return x[0] * x[1] * x[2]; };
    p.label = "trilinear";
    auto g = build_grid(3, 4);

    IterationConfig off = tight();
    off.clamp_radicand = false;
    off.max_outer = 5;
    CHECK_THROWS_AS(fixed_point_solve(p, g, off), SolveError);

    IterationConfig on = tight();
    on.max_outer = 5;
    CHECK_NOTHROW(fixed_point_solve(p, g, on));
}

TEST_CASE("budget exhaustion is reported, not thrown") {
    const Problem t1 = make_problem("test1");
    IterationConfig cfg = tight();
    cfg.max_outer = 3;
    auto [u, rep] = fixed_point_solve(t1, build_grid(3, 4), cfg);
    CHECK(rep.termination == Termination::budget_exhausted);
    CHECK(rep.iterations == 3);
    CHECK(rep.diff_history.size() == 3);
}

TEST_CASE("divergence guard trips") {
    const Problem t1 = make_problem("test1");
    IterationConfig cfg = tight();
    cfg.divergence_guard = 1e-3;  // any genuine iterate exceeds this
    auto [u, rep] = fixed_point_solve(t1, build_grid(3, 4), cfg);
    CHECK(rep.termination == Termination::diverged);
    CHECK(rep.iterations == 1);
}

TEST_CASE("every method fixes an exact discrete solution") {
    // maclaurin on quadratic data starts at the discrete solution, so the
    // first successive difference sits at the linear-solver floor
    const double floor = 1e-8;
    const Problem q = make_problem("quadratic(2,3)");
    auto g = build_grid(3, 6);
    IterationConfig cfg = tight(1e-9);
    cfg.initial_guess = InitialGuessRule::maclaurin;

    auto [uf, rf] = fixed_point_solve(q, g, cfg);
    CHECK(rf.iterations == 1);
    CHECK(rf.diff_history.front() <= floor);

    auto [un, rn] = newton_solve(q, g, cfg);
    CHECK(rn.iterations == 1);
    CHECK(rn.diff_history.front() <= floor);

    auto [ug, rg] = nonlinear_gs_solve(q, g, cfg);
    CHECK(rg.iterations == 1);
    CHECK(rg.diff_history.front() <= floor);

    auto [up, rp] = partial_gs_solve(q, g, cfg);
    CHECK(rp.iterations == 1);
    CHECK(rp.diff_history.front() <= floor);

    const MeshFunction u0 = restrict_to_grid(*q.exact, g);
    auto [ub, rb] = linearized_cofactor_solve(q, g, u0, cfg);
    CHECK(rb.iterations == 1);
    CHECK(rb.diff_history.front() <= floor);
    CHECK(max_diff(ub, u0) <= 10.0 * cfg.tolerance);
}

TEST_CASE("newton solves k=1 in one step") {
    const Problem q1 = make_problem("quadratic(1,2)");
    auto g = build_grid(2, 8);
    IterationConfig cfg = tight(1e-9);
    cfg.initial_guess = InitialGuessRule::maclaurin;
    auto [u, rep] = newton_solve(q1, g, cfg);
    CHECK(rep.termination == Termination::converged);
    CHECK(rep.iterations == 1);
    CHECK(max_error(u, q1) <= 1e-8);
}

TEST_CASE("frozen-coefficient iteration on k=1 reduces to the Poisson solve") {
    const Problem q1 = make_problem("quadratic(1,3)");
    auto g = build_grid(3, 5);
    const MeshFunction u0 = initial_guess(q1, g, InitialGuessRule::paper);
    auto [u, rep] = linearized_cofactor_solve(q1, g, u0, tight());
    CHECK(rep.termination == Termination::converged);
    CHECK(rep.iterations <= 2);
    CHECK(max_error(u, q1) <= 1e-8);
    REQUIRE(rep.coefficient_min_eigenvalue.has_value());
    CHECK(*rep.coefficient_min_eigenvalue == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("warm-started frozen-coefficient iteration meets the fixed point") {
    // The frozen map contracts only near the solution (the measured
    // spectral radius from the cold Poisson start exceeds 1 on this
    // problem); a loose fixed-point warm start lands inside the basin.
    const Problem t1 = make_problem("test1");
    auto g = build_grid(3, 8);

    auto [exact_fp, rep_fp] = fixed_point_solve(t1, g, tight());
    REQUIRE(rep_fp.termination == Termination::converged);

    IterationConfig loose = tight(1e-2);
    auto [u0, rep0] = fixed_point_solve(t1, g, loose);
    REQUIRE(rep0.termination == Termination::converged);

    auto [u, rep] = linearized_cofactor_solve(t1, g, u0, tight());
    CHECK(rep.termination == Termination::converged);
    CHECK(max_diff(u, exact_fp) <= 100.0 * 1e-10);
    REQUIRE(rep.coefficient_min_eigenvalue.has_value());
    CHECK(*rep.coefficient_min_eigenvalue > 0.0);
}

TEST_CASE("gauss-seidel fixes the single-unknown problem") {
    const Problem q = make_problem("quadratic(2,2)");
    auto g = build_grid(2, 2);
    auto [u, rep] = nonlinear_gs_solve(q, g, tight());
    CHECK(rep.termination == Termination::converged);
    CHECK(u[g->flat_index(1, 1)] == doctest::Approx(0.5).epsilon(1e-9));

    auto [up, repp] = partial_gs_solve(q, g, tight());
    CHECK(std::abs(up[g->flat_index(1, 1)] - u[g->flat_index(1, 1)]) <= 10.0 * 1e-10);
}

TEST_CASE("partial gauss-seidel settles linear data immediately") {
    Problem lin;
    lin.n = 3;
    lin.k = 2;
    lin.f = [](const Point&) { return 0.0; };
    lin.g = [](const Point& p) { return p[0]; };
    auto g = build_grid(3, 6);
    auto [u, rep] = partial_gs_solve(lin, g, tight());
    CHECK(rep.termination == Termination::converged);
    CHECK(rep.iterations == 1);
    CHECK(max_diff(u, restrict_to_grid(lin.g, g)) <= 10.0 * 1e-10);
}

TEST_CASE("gauss-seidel variants demand k = 2") {
    const Problem t5 = make_problem("test5");
    auto g = build_grid(3, 4);
    CHECK_THROWS_WITH_AS(nonlinear_gs_solve(t5, g, tight()), "gauss-seidel variants require k = 2",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(partial_gs_solve(t5, g, tight()), "gauss-seidel variants require k = 2",
                         std::invalid_argument);
}

TEST_CASE("methods agree pairwise on a shared benchmark") {
    const Problem t2 = make_problem("test2");
    auto g = build_grid(3, 8);
    const IterationConfig cfg = tight();

    std::vector<MeshFunction> sols;
    sols.push_back(fixed_point_solve(t2, g, cfg).first);
    sols.push_back(newton_solve(t2, g, cfg).first);
    sols.push_back(nonlinear_gs_solve(t2, g, cfg).first);
    sols.push_back(partial_gs_solve(t2, g, cfg).first);
    sols.push_back(
        linearized_cofactor_solve(t2, g, initial_guess(t2, g, cfg.initial_guess), cfg).first);
    for (size_t a = 0; a < sols.size(); ++a)
        for (size_t b = a + 1; b < sols.size(); ++b)
            CHECK(max_diff(sols[a], sols[b]) <= 100.0 * cfg.tolerance);
}

TEST_CASE("partial gauss-seidel meets the fixed point on the convex benchmark") {
    const Problem t1 = make_problem("test1");
    auto g = build_grid(3, 8);
    const IterationConfig cfg = tight();
    const MeshFunction fp = fixed_point_solve(t1, g, cfg).first;
    auto [pg, rep] = partial_gs_solve(t1, g, cfg);
    CHECK(rep.termination == Termination::converged);
    CHECK(max_diff(fp, pg) <= 100.0 * cfg.tolerance);
}

TEST_CASE("radicand is pointwise independent of the center value") {
    std::mt19937 rng(83);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::uniform_real_distribution<double> eps_dist(-10.0, 10.0);
    int checked = 0;
    for (int n : {2, 3}) {
        auto g = build_grid(n, n == 2 ? 8 : 5);
        const double inv_c = 1.0 / c_const(2, n).value();
        for (int trial = 0; trial < 50; ++trial) {
            MeshFunction u(g);
            for (int fl = 0; fl < g->node_count(); ++fl) u[fl] = dist(rng);
            const int pick = g->interior_nodes()[static_cast<size_t>(
                std::uniform_int_distribution<int>(0, g->interior_count() - 1)(rng))];
            const double fval = dist(rng) + 2.0;
            auto radicand = [&](const MeshFunction& w) {
                const SymMat H = discrete_hessian(w, pick);
                const double lap = H.trace();
                return lap * lap + inv_c * (fval - s_k(H, 2));
            };
            const double before = radicand(u);
            u[pick] += eps_dist(rng);
            const double after = radicand(u);
            CHECK(std::abs(after - before) <= 1e-9 * (1.0 + std::abs(before)));
            ++checked;
        }
    }
    CHECK(checked == 100);
}

TEST_CASE("degenerate double iteration") {
    // harmonic data is an immediate fixed point
    Problem lin;
    lin.n = 3;
    lin.k = 3;
    lin.f = [](const Point&) { return 0.0; };
    lin.g = [](const Point& p) { return p[0]; };
    auto g = build_grid(3, 4);
    auto [u, rep] = degenerate_ma_solve(lin, g, tight(1e-9));
    CHECK(rep.termination == Termination::converged);
    CHECK(rep.iterations <= 2);
    CHECK(max_diff(u, restrict_to_grid(lin.g, g)) <= 1e-8);

    const Problem q = make_problem("quadratic(3,3)");
    auto [uq, repq] = degenerate_ma_solve(q, build_grid(3, 6), tight(1e-9));
    CHECK(repq.termination == Termination::converged);
    CHECK(max_error(uq, q) <= 1e-7);
    CHECK(repq.inner_iterations >= repq.iterations);

    const Problem t1 = make_problem("test1");  // k = 2 is rejected
    CHECK_THROWS_WITH_AS(degenerate_ma_solve(t1, g, tight()), "degenerate-ma requires k = 3, n = 3",
                         std::invalid_argument);
}

TEST_CASE("the 2-d constant override still reaches the same discrete solution") {
    const Problem q = make_problem("quadratic(2,2)");
    auto g = build_grid(2, 6);
    IterationConfig cfg = tight();
    cfg.c_override = 0.5;  // classic 2-d Monge-Ampere scheme constant
    auto [u, rep] = fixed_point_solve(q, g, cfg);
    CHECK(rep.termination == Termination::converged);
    CHECK(max_error(u, q) <= 1e-8);
}

}  // TEST_SUITE
