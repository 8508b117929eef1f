#include "khess/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace khess {

Grid::Grid(int dim, int subdivisions) : n_(dim), m_(subdivisions) {
    if (n_ != 2 && n_ != 3) throw std::invalid_argument("unsupported dimension");
    if (m_ < 2) throw std::invalid_argument("no interior nodes");

    h_ = 1.0 / static_cast<double>(m_);
    const int per_axis = m_ + 1;
    node_count_ = 1;
    for (int a = 0; a < n_; ++a) node_count_ *= per_axis;

    stride_ = {1, per_axis, (n_ == 3) ? per_axis * per_axis : 0};

    interior_ordinal_.assign(static_cast<size_t>(node_count_), -1);
    int ord = 0;
    if (n_ == 2) {
        for (int j = 1; j < m_; ++j)
            for (int i = 1; i < m_; ++i) {
                const int fl = flat_index(i, j);
                interior_.push_back(fl);
                interior_ordinal_[static_cast<size_t>(fl)] = ord++;
            }
    } else {
        for (int k = 1; k < m_; ++k)
            for (int j = 1; j < m_; ++j)
                for (int i = 1; i < m_; ++i) {
                    const int fl = flat_index(i, j, k);
                    interior_.push_back(fl);
                    interior_ordinal_[static_cast<size_t>(fl)] = ord++;
                }
    }
}

std::array<int, 3> Grid::multi_index(int flat) const {
    const int per_axis = m_ + 1;
    std::array<int, 3> mi{0, 0, 0};
    mi[0] = flat % per_axis;
    flat /= per_axis;
    mi[1] = flat % per_axis;
    if (n_ == 3) mi[2] = flat / per_axis;
    return mi;
}

Point Grid::node_coords(int flat) const {
    const auto mi = multi_index(flat);
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < n_; ++a)
        p[static_cast<size_t>(a)] = static_cast<double>(mi[static_cast<size_t>(a)]) / static_cast<double>(m_);
    return p;
}

std::shared_ptr<const Grid> build_grid(int dim, int subdivisions) {
    return std::make_shared<const Grid>(dim, subdivisions);
}

MeshFunction restrict_to_grid(const ScalarField& v, std::shared_ptr<const Grid> grid) {
    MeshFunction out(std::move(grid));
    const Grid& g = out.grid();
    for (int fl = 0; fl < g.node_count(); ++fl) {
        const double value = v(g.node_coords(fl));
        if (!std::isfinite(value)) throw std::invalid_argument("non-finite sample");
        out[fl] = value;
    }
    return out;
}

SymMat discrete_hessian(const MeshFunction& u, int flat) {
    const Grid& g = u.grid();
    if (!g.is_interior(flat)) throw std::invalid_argument("stencil leaves grid");

    const int n = g.dim();
    const double h2 = g.spacing() * g.spacing();
    const double uc = u[flat];
    SymMat H(n);
    for (int i = 0; i < n; ++i) {
        const int si = g.stride(i);
        H.set(i, i, (u[flat + si] - 2.0 * uc + u[flat - si]) / h2);
        for (int j = i + 1; j < n; ++j) {
            const int sj = g.stride(j);
            const double cross = (u[flat + si + sj] + u[flat - si - sj] -
                                  u[flat + si - sj] - u[flat - si + sj]) /
                                 (4.0 * h2);
            H.set(i, j, cross);
        }
    }
    return H;
}

double discrete_laplacian(const MeshFunction& u, int flat) {
    const Grid& g = u.grid();
    if (!g.is_interior(flat)) throw std::invalid_argument("stencil leaves grid");

    const double h2 = g.spacing() * g.spacing();
    const double uc = u[flat];
    double lap = 0.0;
    for (int i = 0; i < g.dim(); ++i) {
        const int si = g.stride(i);
        lap += (u[flat + si] - 2.0 * uc + u[flat - si]) / h2;
    }
    return lap;
}

double max_norm(const MeshFunction& u) {
    double m = 0.0;
    for (double v : u.values()) m = std::max(m, std::abs(v));
    return m;
}

double max_diff(const MeshFunction& a, const MeshFunction& b) {
    if (a.grid().dim() != b.grid().dim() ||
        a.grid().subdivisions() != b.grid().subdivisions())
        throw std::invalid_argument("mesh functions live on different grids");
    double m = 0.0;
    for (int fl = 0; fl < a.grid().node_count(); ++fl)
        m = std::max(m, std::abs(a[fl] - b[fl]));
    return m;
}

}  // namespace khess
