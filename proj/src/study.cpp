#include "khess/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace khess {

MethodTag parse_method(const std::string& tag) {
    if (tag == "fixed-point") return MethodTag::fixed_point;
    if (tag == "broyden") return MethodTag::broyden;
    if (tag == "newton") return MethodTag::newton;
    if (tag == "gauss-seidel") return MethodTag::gauss_seidel;
    if (tag == "partial-gs") return MethodTag::partial_gs;
    if (tag == "degenerate-ma") return MethodTag::degenerate_ma;
    throw std::invalid_argument("unknown method tag: " + tag);
}

std::string method_name(MethodTag tag) {
    switch (tag) {
        case MethodTag::fixed_point: return "fixed-point";
        case MethodTag::broyden: return "broyden";
        case MethodTag::newton: return "newton";
        case MethodTag::gauss_seidel: return "gauss-seidel";
        case MethodTag::partial_gs: return "partial-gs";
        case MethodTag::degenerate_ma: return "degenerate-ma";
    }
    return "?";
}

SolveResult run_single(const Problem& problem, std::shared_ptr<const Grid> grid, MethodTag method,
                       const IterationConfig& config) {
    switch (method) {
        case MethodTag::fixed_point: return fixed_point_solve(problem, std::move(grid), config);
        case MethodTag::broyden: {
            MeshFunction u0 = initial_guess(problem, grid, config.initial_guess, config.linear);
            return linearized_cofactor_solve(problem, std::move(grid), u0, config);
        }
        case MethodTag::newton: return newton_solve(problem, std::move(grid), config);
        case MethodTag::gauss_seidel: return nonlinear_gs_solve(problem, std::move(grid), config);
        case MethodTag::partial_gs: return partial_gs_solve(problem, std::move(grid), config);
        case MethodTag::degenerate_ma: return degenerate_ma_solve(problem, std::move(grid), config);
    }
    throw std::invalid_argument("unknown method tag");
}

std::vector<StudyRow> run_convergence_study(const RunConfig& config) {
    if (config.m_values.empty()) throw std::invalid_argument("study needs at least one m");
    std::vector<int> ms = config.m_values;
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());

    const Problem problem = make_problem(config.problem);
    std::vector<StudyRow> rows;
    for (int m : ms) {
        auto grid = build_grid(problem.n, m);
        try {
            auto [u, rep] = run_single(problem, grid, config.method, config.iteration);
            if (rep.termination != Termination::converged)
                throw SolveError(method_name(config.method) + " did not converge at m = " +
                                     std::to_string(m),
                                 rep.final_residual);
            StudyRow row;
            row.m = m;
            row.h = grid->spacing();
            row.iterations = rep.iterations;
            row.residual = rep.final_residual;
            if (problem.exact) {
                row.max_error = max_error(u, problem);
                if (!rows.empty() && rows.back().max_error && *rows.back().max_error > 0.0 &&
                    *row.max_error > 0.0)
                    row.rate = std::log2(*rows.back().max_error / *row.max_error);
            }
            rows.push_back(row);
        } catch (const StudyError&) {
            throw;
        } catch (const SolveError& e) {
            throw StudyError(e.what(), e.achieved_residual(), rows);
        }
    }
    return rows;
}

namespace {

std::string fmt5(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.5g", v);
    return buf;
}

}  // namespace

RenderedTable render_table(const std::vector<StudyRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("render_table: no rows");

    const std::vector<std::string> header{"m", "h", "iterations", "residual", "max_error", "rate"};
    std::vector<std::vector<std::string>> cells;
    cells.push_back(header);
    for (const StudyRow& r : rows) {
        cells.push_back({std::to_string(r.m), fmt5(r.h), std::to_string(r.iterations),
                         fmt5(r.residual), r.max_error ? fmt5(*r.max_error) : std::string(),
                         r.rate ? fmt5(*r.rate) : std::string()});
    }

    std::vector<size_t> width(header.size(), 0);
    for (const auto& row : cells)
        for (size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

    std::ostringstream text;
    for (size_t rI = 0; rI < cells.size(); ++rI) {
        for (size_t c = 0; c < cells[rI].size(); ++c) {
            if (c > 0) text << "  ";
            text << cells[rI][c];
            for (size_t pad = cells[rI][c].size(); pad < width[c]; ++pad) text << ' ';
        }
        text << '\n';
    }

    std::ostringstream csv;
    csv << "m,h,iterations,residual,max_error,rate\n";
    for (size_t rI = 1; rI < cells.size(); ++rI) {
        for (size_t c = 0; c < cells[rI].size(); ++c) {
            if (c > 0) csv << ',';
            csv << cells[rI][c];
        }
        csv << '\n';
    }
    return {text.str(), csv.str()};
}

std::vector<StudyRow> parse_study_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != "m,h,iterations,residual,max_error,rate")
        throw std::invalid_argument("not a study CSV");
    std::vector<StudyRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                f.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(ch);
            }
        }
        f.push_back(cur);
        if (f.size() != 6) throw std::invalid_argument("malformed study CSV row");
        StudyRow r;
        r.m = std::stoi(f[0]);
        r.h = std::stod(f[1]);
        r.iterations = std::stoi(f[2]);
        r.residual = std::stod(f[3]);
        if (!f[4].empty()) r.max_error = std::stod(f[4]);
        if (!f[5].empty()) r.rate = std::stod(f[5]);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace khess
