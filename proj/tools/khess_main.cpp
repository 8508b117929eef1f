// Command-line driver: single solves, grid-refinement studies, and plane
// slices of stored fields.
//
// Exit codes: 0 success, 2 invalid configuration, 3 solver non-convergence,
// 4 I/O failure.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "khess/field_io.hpp"
#include "khess/study.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

struct CommonFlags {
    std::string problem;
    std::string method = "fixed-point";
    double tol = 1e-10;
    int max_iter = 20000;
    double lin_tol = 1e-12;
    std::string init = "paper";
    std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--problem", flags.problem, "Problem label (test1..test5, quadratic(k,n))")
        ->required();
    cmd->add_option("--method", flags.method,
                    "fixed-point|broyden|newton|gauss-seidel|partial-gs|degenerate-ma");
    cmd->add_option("--tol", flags.tol, "Outer tolerance (successive-iterate max norm)");
    cmd->add_option("--max-iter", flags.max_iter, "Outer iteration budget");
    cmd->add_option("--lin-tol", flags.lin_tol, "Linear solve residual tolerance");
    cmd->add_option("--init", flags.init, "Initial-guess rule: paper|maclaurin");
}

khess::IterationConfig iteration_config(const CommonFlags& flags) {
    khess::IterationConfig cfg;
    cfg.tolerance = flags.tol;
    cfg.max_outer = flags.max_iter;
    cfg.linear.tolerance = flags.lin_tol;
    if (flags.init == "paper")
        cfg.initial_guess = khess::InitialGuessRule::paper;
    else if (flags.init == "maclaurin")
        cfg.initial_guess = khess::InitialGuessRule::maclaurin;
    else
        throw std::invalid_argument("unknown initial-guess rule: " + flags.init);
    return cfg;
}

std::vector<int> parse_m_list(const std::string& spec) {
    std::vector<int> ms;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        ms.push_back(std::stoi(tok));
    }
    if (ms.empty()) throw std::invalid_argument("empty m list");
    return ms;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open " + path);
    out << content;
    if (!out) throw std::ios_base::failure("cannot write " + path);
}

int cmd_solve(const CommonFlags& flags, int m) {
    const khess::Problem problem = khess::make_problem(flags.problem);
    const khess::MethodTag method = khess::parse_method(flags.method);
    const khess::IterationConfig cfg = iteration_config(flags);
    auto grid = khess::build_grid(problem.n, m);

    const auto t0 = std::chrono::steady_clock::now();
    auto [u, rep] = khess::run_single(problem, grid, method, cfg);
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    std::cerr << "solve took " << dt.count() << " s\n";

    std::cout << "problem    " << flags.problem << "\n"
              << "method     " << flags.method << "\n"
              << "m          " << m << "\n"
              << "iterations " << rep.iterations << "\n"
              << "residual   " << rep.final_residual << "\n";
    if (problem.exact) std::cout << "max_error  " << khess::max_error(u, problem) << "\n";
    if (rep.coefficient_min_eigenvalue)
        std::cout << "coeff_min_eig " << *rep.coefficient_min_eigenvalue << "\n";

    if (rep.termination != khess::Termination::converged) {
        std::cerr << "solver did not converge ("
                  << (rep.termination == khess::Termination::diverged ? "diverged"
                                                                      : "budget exhausted")
                  << ")\n";
        return kExitSolver;
    }
    if (!flags.out.empty()) {
        std::ofstream out(flags.out);
        if (!out) {
            std::cerr << "cannot open " << flags.out << "\n";
            return kExitIo;
        }
        khess::write_field(out, u);
        if (!out) {
            std::cerr << "cannot write " << flags.out << "\n";
            return kExitIo;
        }
    }
    return kExitOk;
}

int cmd_convergence(const CommonFlags& flags, const std::string& m_spec) {
    khess::RunConfig run;
    run.problem = flags.problem;
    run.method = khess::parse_method(flags.method);
    run.m_values = parse_m_list(m_spec);
    run.iteration = iteration_config(flags);

    std::vector<khess::StudyRow> rows;
    try {
        rows = khess::run_convergence_study(run);
    } catch (const khess::StudyError& e) {
        std::cerr << "study aborted: " << e.what() << "\n";
        if (!e.partial_rows().empty()) {
            const auto partial = khess::render_table(e.partial_rows());
            std::cout << partial.text;
        }
        return kExitSolver;
    }
    const auto table = khess::render_table(rows);
    std::cout << table.text;
    try {
        write_text_file(flags.out, table.csv);
    } catch (const std::ios_base::failure& e) {
        std::cerr << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

int cmd_export_slice(const std::string& in_path, const std::string& axis, double value,
                     const std::string& out_path) {
    int axis_idx = -1;
    if (axis == "x")
        axis_idx = 0;
    else if (axis == "y")
        axis_idx = 1;
    else if (axis == "z")
        axis_idx = 2;
    else
        throw std::invalid_argument("axis must be x, y or z");

    std::ifstream in(in_path);
    if (!in) {
        std::cerr << "cannot open " << in_path << "\n";
        return kExitIo;
    }
    auto [grid, u] = khess::read_field(in);
    const std::string csv = khess::export_slice(u, axis_idx, value);
    try {
        write_text_file(out_path, csv);
    } catch (const std::ios_base::failure& e) {
        std::cerr << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-difference solvers for k-Hessian Dirichlet problems on the unit cube"};
    app.require_subcommand(1);

    CommonFlags solve_flags;
    int solve_m = 8;
    CLI::App* solve = app.add_subcommand("solve", "Run a single solve");
    add_common(solve, solve_flags);
    solve->add_option("--m", solve_m, "Subdivisions per axis")->required();
    solve->add_option("--out", solve_flags.out, "Write the solution field CSV here");

    CommonFlags conv_flags;
    std::string conv_m;
    CLI::App* conv = app.add_subcommand("convergence", "Run a grid-refinement study");
    add_common(conv, conv_flags);
    conv->add_option("--m", conv_m, "Comma-separated subdivision counts, e.g. 4,8,16")->required();
    conv->add_option("--out", conv_flags.out, "Write the study CSV here")->required();

    std::string slice_in, slice_axis = "z", slice_out;
    double slice_value = 0.5;
    CLI::App* slice = app.add_subcommand("export-slice", "Extract a plane from a stored field");
    slice->add_option("--in", slice_in, "Field CSV produced by solve --out")->required();
    slice->add_option("--axis", slice_axis, "x|y|z");
    slice->add_option("--value", slice_value, "Plane coordinate (must lie on the lattice)");
    slice->add_option("--out", slice_out, "Write the slice CSV here")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_flags, solve_m);
        if (conv->parsed()) return cmd_convergence(conv_flags, conv_m);
        return cmd_export_slice(slice_in, slice_axis, slice_value, slice_out);
    } catch (const khess::StudyError& e) {
        std::cerr << e.what() << "\n";
        return kExitSolver;
    } catch (const khess::SolveError& e) {
        std::cerr << e.what() << " (achieved residual " << e.achieved_residual() << ")\n";
        return kExitSolver;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const std::ios_base::failure& e) {
        std::cerr << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
}
