#include "khess/elliptic.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace khess {

namespace {

// Accumulates one stencil row, merging repeated columns.
class RowBuilder {
public:
    void add(int col, double val) {
        for (size_t i = 0; i < count_; ++i) {
            if (cols_[i] == col) {
                vals_[i] += val;
                return;
            }
        }
        assert(count_ < kMax);
        cols_[count_] = col;
        vals_[count_] = val;
        ++count_;
    }

    void flush(std::vector<int>& offsets, std::vector<LinearOperator::Entry>& entries) {
        // sort by column for deterministic layout
        for (size_t i = 1; i < count_; ++i)
            for (size_t j = i; j > 0 && cols_[j - 1] > cols_[j]; --j) {
                std::swap(cols_[j - 1], cols_[j]);
                std::swap(vals_[j - 1], vals_[j]);
            }
        for (size_t i = 0; i < count_; ++i)
            entries.push_back({cols_[i], vals_[i]});
        offsets.push_back(static_cast<int>(entries.size()));
        count_ = 0;
    }

private:
    static constexpr size_t kMax = 32;
    std::array<int, kMax> cols_{};
    std::array<double, kMax> vals_{};
    size_t count_ = 0;
};

void check_coeff_field(const Grid& g, const SymMatField& coeff) {
    if (static_cast<int>(coeff.size()) != g.node_count())
        throw std::invalid_argument("coefficient field incomplete");
    if (!coeff.empty() && coeff.front().order() != g.dim())
        throw std::invalid_argument("coefficient field incomplete");
}

}  // namespace

LinearOperator::LinearOperator(std::shared_ptr<const Grid> grid, bool symmetric,
                               std::vector<int> row_offsets, std::vector<Entry> entries)
    : grid_(std::move(grid)),
      symmetric_(symmetric),
      row_offsets_(std::move(row_offsets)),
      entries_(std::move(entries)) {}

double LinearOperator::coefficient(int row_flat, int col_flat) const {
    const int ord = grid_->interior_ordinal(row_flat);
    if (ord < 0) throw std::invalid_argument("coefficient: row is not an interior node");
    for (const Entry& e : row(ord))
        if (e.col == col_flat) return e.val;
    return 0.0;
}

void LinearOperator::apply(const MeshFunction& u, std::vector<double>& out) const {
    const int nrows = rows();
    out.resize(static_cast<size_t>(nrows));
    const double* v = u.data().data();
    for (int r = 0; r < nrows; ++r) {
        double s = 0.0;
        for (const Entry& e : row(r)) s += e.val * v[e.col];
        out[static_cast<size_t>(r)] = s;
    }
}

LinearOperator assemble_laplacian(std::shared_ptr<const Grid> grid) {
    const Grid& g = *grid;
    const int n = g.dim();
    const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
    std::vector<int> offsets{0};
    std::vector<LinearOperator::Entry> entries;
    entries.reserve(static_cast<size_t>(g.interior_count()) * (2 * n + 1));
    RowBuilder row;
    for (int fl : g.interior_nodes()) {
        row.add(fl, -2.0 * n * inv_h2);
        for (int a = 0; a < n; ++a) {
            row.add(fl + g.stride(a), inv_h2);
            row.add(fl - g.stride(a), inv_h2);
        }
        row.flush(offsets, entries);
    }
    return LinearOperator(std::move(grid), true, std::move(offsets), std::move(entries));
}

LinearOperator assemble_divergence_form(std::shared_ptr<const Grid> grid,
                                        const SymMatField& coeff) {
    const Grid& g = *grid;
    check_coeff_field(g, coeff);
    const int n = g.dim();
    const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
    std::vector<int> offsets{0};
    std::vector<LinearOperator::Entry> entries;
    entries.reserve(static_cast<size_t>(g.interior_count()) * 13);
    RowBuilder row;
    for (int fl : g.interior_nodes()) {
        // sum_i d+_i [ sum_j A_ij(x) d-_j v(x) ]
        for (int i = 0; i < n; ++i) {
            const int fwd = fl + g.stride(i);
            const SymMat& a_fwd = coeff[static_cast<size_t>(fwd)];
            const SymMat& a_ctr = coeff[static_cast<size_t>(fl)];
            for (int j = 0; j < n; ++j) {
                const int sj = g.stride(j);
                const double cf = a_fwd(i, j) * inv_h2;
                const double cc = a_ctr(i, j) * inv_h2;
                row.add(fwd, cf);
                row.add(fwd - sj, -cf);
                row.add(fl, -cc);
                row.add(fl - sj, cc);
            }
        }
        row.flush(offsets, entries);
    }
    return LinearOperator(std::move(grid), false, std::move(offsets), std::move(entries));
}

LinearOperator assemble_nondivergence_form(std::shared_ptr<const Grid> grid,
                                           const SymMatField& coeff) {
    const Grid& g = *grid;
    check_coeff_field(g, coeff);
    const int n = g.dim();
    const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
    std::vector<int> offsets{0};
    std::vector<LinearOperator::Entry> entries;
    entries.reserve(static_cast<size_t>(g.interior_count()) * 19);
    RowBuilder row;
    for (int fl : g.interior_nodes()) {
        const SymMat& a = coeff[static_cast<size_t>(fl)];
        for (int i = 0; i < n; ++i) {
            const int si = g.stride(i);
            const double d = a(i, i) * inv_h2;
            row.add(fl + si, d);
            row.add(fl - si, d);
            row.add(fl, -2.0 * d);
            for (int j = i + 1; j < n; ++j) {
                const int sj = g.stride(j);
                // a_ij and a_ji both weight the same centered cross stencil
                const double w = 2.0 * a(i, j) * inv_h2 / 4.0;
                row.add(fl + si + sj, w);
                row.add(fl - si - sj, w);
                row.add(fl + si - sj, -w);
                row.add(fl - si + sj, -w);
            }
        }
        row.flush(offsets, entries);
    }
    return LinearOperator(std::move(grid), false, std::move(offsets), std::move(entries));
}

namespace {

// Interior-only system with boundary contributions folded into the rhs.
// Columns are interior ordinals.
struct ReducedSystem {
    int n = 0;
    std::vector<int> offsets;
    std::vector<LinearOperator::Entry> entries;
    std::vector<double> diag;
    std::vector<double> b;

    void apply(const std::vector<double>& x, std::vector<double>& out) const {
        out.resize(static_cast<size_t>(n));
        for (int r = 0; r < n; ++r) {
            double s = 0.0;
            for (int e = offsets[static_cast<size_t>(r)]; e < offsets[static_cast<size_t>(r) + 1]; ++e)
                s += entries[static_cast<size_t>(e)].val * x[static_cast<size_t>(entries[static_cast<size_t>(e)].col)];
            out[static_cast<size_t>(r)] = s;
        }
    }

    // r_out = b - A x; returns max-norm of r_out
    double residual(const std::vector<double>& x, std::vector<double>& r_out) const {
        apply(x, r_out);
        double mx = 0.0;
        for (int i = 0; i < n; ++i) {
            r_out[static_cast<size_t>(i)] = b[static_cast<size_t>(i)] - r_out[static_cast<size_t>(i)];
            mx = std::max(mx, std::abs(r_out[static_cast<size_t>(i)]));
        }
        return mx;
    }
};

ReducedSystem build_reduced(const LinearOperator& op, const MeshFunction& rhs,
                            const MeshFunction& boundary) {
    const Grid& g = op.grid();
    ReducedSystem sys;
    sys.n = op.rows();
    sys.offsets.reserve(static_cast<size_t>(sys.n) + 1);
    sys.offsets.push_back(0);
    sys.diag.assign(static_cast<size_t>(sys.n), 0.0);
    sys.b.resize(static_cast<size_t>(sys.n));
    for (int r = 0; r < sys.n; ++r) {
        const int row_flat = g.interior_nodes()[static_cast<size_t>(r)];
        double bv = rhs[row_flat];
        for (const auto& e : op.row(r)) {
            const int ord = g.interior_ordinal(e.col);
            if (ord >= 0) {
                sys.entries.push_back({ord, e.val});
                if (ord == r) sys.diag[static_cast<size_t>(r)] += e.val;
            } else {
                bv -= e.val * boundary[e.col];
            }
        }
        sys.offsets.push_back(static_cast<int>(sys.entries.size()));
        sys.b[static_cast<size_t>(r)] = bv;
    }
    return sys;
}

constexpr double kBreakdownEps = 1e-290;

// Jacobi-preconditioned conjugate gradients. Handles the negative-definite
// orientation of Delta_d by solving the sign-flipped system.
void solve_cg(const ReducedSystem& sys, std::vector<double>& x, double tol, int budget) {
    const int n = sys.n;
    double sign = 1.0;
    for (int i = 0; i < n; ++i) {
        if (sys.diag[static_cast<size_t>(i)] == 0.0)
            throw SolveError("solver breakdown", std::numeric_limits<double>::infinity());
    }
    if (sys.diag[0] < 0.0) sign = -1.0;

    std::vector<double> r(static_cast<size_t>(n)), z(static_cast<size_t>(n)), p, ap;
    int used = 0;
    double achieved = std::numeric_limits<double>::infinity();
    while (used < budget) {
        achieved = sys.residual(x, r);  // true residual
        if (achieved <= tol) return;
        for (double& v : r) v *= sign;
        double rz = 0.0;
        for (int i = 0; i < n; ++i) {
            z[static_cast<size_t>(i)] = r[static_cast<size_t>(i)] / (sign * sys.diag[static_cast<size_t>(i)]);
            rz += r[static_cast<size_t>(i)] * z[static_cast<size_t>(i)];
        }
        p = z;
        // inner sweep against the recursive residual, then re-verify above
        while (used < budget) {
            sys.apply(p, ap);
            if (sign < 0.0)
                for (double& v : ap) v = -v;
            double pap = 0.0;
            for (int i = 0; i < n; ++i) pap += p[static_cast<size_t>(i)] * ap[static_cast<size_t>(i)];
            if (!(pap > 0.0)) throw SolveError("solver breakdown", achieved);
            const double alpha = rz / pap;
            double rmax = 0.0;
            for (int i = 0; i < n; ++i) {
                x[static_cast<size_t>(i)] += alpha * p[static_cast<size_t>(i)];
                r[static_cast<size_t>(i)] -= alpha * ap[static_cast<size_t>(i)];
                rmax = std::max(rmax, std::abs(r[static_cast<size_t>(i)]));
            }
            ++used;
            if (!std::isfinite(rmax)) throw SolveError("solver breakdown", achieved);
            if (rmax <= 0.5 * tol) break;  // claim; outer loop verifies
            double rz_new = 0.0;
            for (int i = 0; i < n; ++i) {
                z[static_cast<size_t>(i)] = r[static_cast<size_t>(i)] / (sign * sys.diag[static_cast<size_t>(i)]);
                rz_new += r[static_cast<size_t>(i)] * z[static_cast<size_t>(i)];
            }
            const double beta = rz_new / rz;
            rz = rz_new;
            for (int i = 0; i < n; ++i)
                p[static_cast<size_t>(i)] = z[static_cast<size_t>(i)] + beta * p[static_cast<size_t>(i)];
        }
    }
    achieved = sys.residual(x, r);
    if (achieved <= tol) return;
    throw SolveError("linear solve did not converge", achieved);
}

void solve_bicgstab(const ReducedSystem& sys, std::vector<double>& x, double tol, int budget) {
    const int n = sys.n;
    std::vector<double> r(static_cast<size_t>(n)), rhat, p(static_cast<size_t>(n), 0.0),
        v(static_cast<size_t>(n), 0.0), s(static_cast<size_t>(n)), t(static_cast<size_t>(n));
    int used = 0;
    double achieved = std::numeric_limits<double>::infinity();
    while (used < budget) {
        achieved = sys.residual(x, r);
        if (achieved <= tol) return;
        rhat = r;
        double rho = 1.0, alpha = 1.0, omega = 1.0;
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        bool claimed = false;
        while (used < budget && !claimed) {
            double rho_new = 0.0;
            for (int i = 0; i < n; ++i) rho_new += rhat[static_cast<size_t>(i)] * r[static_cast<size_t>(i)];
            if (std::abs(rho_new) < kBreakdownEps) throw SolveError("solver breakdown", achieved);
            const double beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for (int i = 0; i < n; ++i)
                p[static_cast<size_t>(i)] =
                    r[static_cast<size_t>(i)] + beta * (p[static_cast<size_t>(i)] - omega * v[static_cast<size_t>(i)]);
            sys.apply(p, v);
            double denom = 0.0;
            for (int i = 0; i < n; ++i) denom += rhat[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
            if (std::abs(denom) < kBreakdownEps) throw SolveError("solver breakdown", achieved);
            alpha = rho / denom;
            double smax = 0.0;
            for (int i = 0; i < n; ++i) {
                s[static_cast<size_t>(i)] = r[static_cast<size_t>(i)] - alpha * v[static_cast<size_t>(i)];
                smax = std::max(smax, std::abs(s[static_cast<size_t>(i)]));
            }
            ++used;
            if (!std::isfinite(smax)) throw SolveError("solver breakdown", achieved);
            if (smax <= 0.5 * tol) {
                for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] += alpha * p[static_cast<size_t>(i)];
                claimed = true;
                break;
            }
            sys.apply(s, t);
            double ts = 0.0, tt = 0.0;
            for (int i = 0; i < n; ++i) {
                ts += t[static_cast<size_t>(i)] * s[static_cast<size_t>(i)];
                tt += t[static_cast<size_t>(i)] * t[static_cast<size_t>(i)];
            }
            if (tt < kBreakdownEps) throw SolveError("solver breakdown", achieved);
            omega = ts / tt;
            if (std::abs(omega) < kBreakdownEps) throw SolveError("solver breakdown", achieved);
            double rmax = 0.0;
            for (int i = 0; i < n; ++i) {
                x[static_cast<size_t>(i)] += alpha * p[static_cast<size_t>(i)] + omega * s[static_cast<size_t>(i)];
                r[static_cast<size_t>(i)] = s[static_cast<size_t>(i)] - omega * t[static_cast<size_t>(i)];
                rmax = std::max(rmax, std::abs(r[static_cast<size_t>(i)]));
            }
            if (!std::isfinite(rmax)) throw SolveError("solver breakdown", achieved);
            if (rmax <= 0.5 * tol) claimed = true;
        }
        if (!claimed) break;
    }
    achieved = sys.residual(x, t);
    if (achieved <= tol) return;
    throw SolveError("linear solve did not converge", achieved);
}

// Gauss-Seidel relaxation in sweep (row) order.
void solve_sweep(const ReducedSystem& sys, std::vector<double>& x, double tol, int budget) {
    const int n = sys.n;
    for (int i = 0; i < n; ++i)
        if (sys.diag[static_cast<size_t>(i)] == 0.0)
            throw SolveError("solver breakdown", std::numeric_limits<double>::infinity());
    std::vector<double> scratch;
    double achieved = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < budget; ++sweep) {
        double rmax = 0.0;
        for (int r = 0; r < n; ++r) {
            double dot = 0.0;
            for (int e = sys.offsets[static_cast<size_t>(r)]; e < sys.offsets[static_cast<size_t>(r) + 1]; ++e)
                dot += sys.entries[static_cast<size_t>(e)].val * x[static_cast<size_t>(sys.entries[static_cast<size_t>(e)].col)];
            const double res = sys.b[static_cast<size_t>(r)] - dot;
            rmax = std::max(rmax, std::abs(res));
            x[static_cast<size_t>(r)] += res / sys.diag[static_cast<size_t>(r)];
        }
        if (!std::isfinite(rmax)) throw SolveError("solver breakdown", achieved);
        if (rmax <= 0.5 * tol) {
            achieved = sys.residual(x, scratch);
            if (achieved <= tol) return;
        }
    }
    achieved = sys.residual(x, scratch);
    if (achieved <= tol) return;
    throw SolveError("linear solve did not converge", achieved);
}

// Banded LU without pivoting (the assembled operators are strongly
// diagonally dominant on these grids).
void solve_banded(const ReducedSystem& sys, std::vector<double>& x, double tol) {
    const int n = sys.n;
    int w = 0;
    for (int r = 0; r < n; ++r)
        for (int e = sys.offsets[static_cast<size_t>(r)]; e < sys.offsets[static_cast<size_t>(r) + 1]; ++e)
            w = std::max(w, std::abs(sys.entries[static_cast<size_t>(e)].col - r));
    const size_t width = 2 * static_cast<size_t>(w) + 1;
    if (static_cast<size_t>(n) * width > 60'000'000)
        throw std::invalid_argument("banded solve exceeds memory budget");

    std::vector<double> band(static_cast<size_t>(n) * width, 0.0);
    auto at = [&](int r, int c) -> double& {
        return band[static_cast<size_t>(r) * width + static_cast<size_t>(c - r + w)];
    };
    for (int r = 0; r < n; ++r)
        for (int e = sys.offsets[static_cast<size_t>(r)]; e < sys.offsets[static_cast<size_t>(r) + 1]; ++e)
            at(r, sys.entries[static_cast<size_t>(e)].col) = sys.entries[static_cast<size_t>(e)].val;

    for (int i = 0; i < n; ++i) {
        const double piv = at(i, i);
        if (std::abs(piv) < kBreakdownEps)
            throw SolveError("solver breakdown", std::numeric_limits<double>::infinity());
        const int last = std::min(n - 1, i + w);
        for (int r = i + 1; r <= last; ++r) {
            const double l = at(r, i) / piv;
            if (l == 0.0) continue;
            at(r, i) = l;
            const int cend = std::min(n - 1, i + w);
            for (int c = i + 1; c <= cend; ++c) at(r, c) -= l * at(i, c);
        }
    }
    x = sys.b;
    for (int i = 0; i < n; ++i) {
        const int first = std::max(0, i - w);
        double s = x[static_cast<size_t>(i)];
        for (int c = first; c < i; ++c) s -= at(i, c) * x[static_cast<size_t>(c)];
        x[static_cast<size_t>(i)] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        const int last = std::min(n - 1, i + w);
        double s = x[static_cast<size_t>(i)];
        for (int c = i + 1; c <= last; ++c) s -= at(i, c) * x[static_cast<size_t>(c)];
        x[static_cast<size_t>(i)] = s / at(i, i);
    }
    std::vector<double> scratch;
    const double achieved = sys.residual(x, scratch);
    if (achieved > tol) throw SolveError("linear solve did not converge", achieved);
}

}  // namespace

namespace {

MeshFunction linear_solve_impl(const LinearOperator& op, const MeshFunction& rhs,
                               const MeshFunction& boundary, const LinearSolveParams& params,
                               const MeshFunction* warm_start) {
    const Grid& g = op.grid();
    if (rhs.grid().node_count() != g.node_count() || boundary.grid().node_count() != g.node_count())
        throw std::invalid_argument("rhs/boundary grid does not match operator grid");
    if (!(params.tolerance > 0.0) || params.max_iterations < 1)
        throw std::invalid_argument("invalid linear solve parameters");

    ReducedSystem sys = build_reduced(op, rhs, boundary);
    std::vector<double> x(static_cast<size_t>(sys.n), 0.0);
    if (warm_start != nullptr) {
        for (int r = 0; r < sys.n; ++r)
            x[static_cast<size_t>(r)] = (*warm_start)[g.interior_nodes()[static_cast<size_t>(r)]];
    }
    // Tolerance is relative to the data scale; an absolute target below
    // ||A|| ||u|| eps is not reachable in double precision.
    double scale = 0.0;
    for (double v : sys.b) scale = std::max(scale, std::abs(v));
    const double tol = params.tolerance * (1.0 + scale);
    switch (params.method) {
        case LinearMethod::krylov:
            if (op.symmetric())
                solve_cg(sys, x, tol, params.max_iterations);
            else
                solve_bicgstab(sys, x, tol, params.max_iterations);
            break;
        case LinearMethod::stationary_sweep:
            solve_sweep(sys, x, tol, params.max_iterations);
            break;
        case LinearMethod::direct_banded:
            solve_banded(sys, x, tol);
            break;
    }

    MeshFunction out(op.grid_ptr());
    for (int fl = 0; fl < g.node_count(); ++fl)
        out[fl] = g.is_interior(fl) ? x[static_cast<size_t>(g.interior_ordinal(fl))] : boundary[fl];
    return out;
}

}  // namespace

MeshFunction linear_solve(const LinearOperator& op, const MeshFunction& rhs,
                          const MeshFunction& boundary, const LinearSolveParams& params) {
    return linear_solve_impl(op, rhs, boundary, params, nullptr);
}

MeshFunction linear_solve(const LinearOperator& op, const MeshFunction& rhs,
                          const MeshFunction& boundary, const LinearSolveParams& params,
                          const MeshFunction& warm_start) {
    return linear_solve_impl(op, rhs, boundary, params, &warm_start);
}

MeshFunction solve_poisson(std::shared_ptr<const Grid> grid, const MeshFunction& rhs,
                           const MeshFunction& boundary, const LinearSolveParams& params) {
    return linear_solve(assemble_laplacian(std::move(grid)), rhs, boundary, params);
}

}  // namespace khess
