#pragma once

#include <optional>
#include <string>
#include <vector>

#include "khess/iterations.hpp"

namespace khess {

enum class MethodTag { fixed_point, broyden, newton, gauss_seidel, partial_gs, degenerate_ma };

MethodTag parse_method(const std::string& tag);
std::string method_name(MethodTag tag);

struct RunConfig {
    std::string problem;
    MethodTag method = MethodTag::fixed_point;
    std::vector<int> m_values;
    IterationConfig iteration;
};

/// One line of a grid-refinement study.
struct StudyRow {
    int m = 0;
    double h = 0.0;
    int iterations = 0;
    double residual = 0.0;
    std::optional<double> max_error;
    /// log2(error_{i-1}/error_i); empty on the first row.
    std::optional<double> rate;
};

/// Dispatches one solve. For the broyden tag, u0 comes from the
/// configured initial-guess rule.
SolveResult run_single(const Problem& problem, std::shared_ptr<const Grid> grid, MethodTag method,
                       const IterationConfig& config);

/// Thrown when a study row fails; carries the rows finished so far.
class StudyError : public SolveError {
public:
    StudyError(const std::string& what, double achieved, std::vector<StudyRow> partial)
        : SolveError(what, achieved), partial_(std::move(partial)) {}
    const std::vector<StudyRow>& partial_rows() const { return partial_; }

private:
    std::vector<StudyRow> partial_;
};

/// Solves every m independently (each from its own initial guess) and
/// tabulates errors and refinement rates, rows ordered by increasing m.
std::vector<StudyRow> run_convergence_study(const RunConfig& config);

struct RenderedTable {
    std::string text;
    std::string csv;
};

/// Aligned text table and CSV (header m,h,iterations,residual,max_error,rate),
/// floats printed with 5 significant digits.
RenderedTable render_table(const std::vector<StudyRow>& rows);

std::vector<StudyRow> parse_study_csv(const std::string& csv);

}  // namespace khess
