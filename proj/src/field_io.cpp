#include "khess/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace khess {

namespace {

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_field(std::ostream& out, const MeshFunction& u) {
    const Grid& g = u.grid();
    for (int a = 0; a < g.dim(); ++a) out << 'x' << (a + 1) << ',';
    out << "u\n";
    for (int fl = 0; fl < g.node_count(); ++fl) {
        const Point p = g.node_coords(fl);
        for (int a = 0; a < g.dim(); ++a) out << fmt17(p[static_cast<size_t>(a)]) << ',';
        out << fmt17(u[fl]) << '\n';
    }
}

std::pair<std::shared_ptr<const Grid>, MeshFunction> read_field(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty field file");
    int n = 0;
    if (line == "x1,x2,u")
        n = 2;
    else if (line == "x1,x2,x3,u")
        n = 3;
    else
        throw std::invalid_argument("unrecognized field header");

    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const size_t last = line.rfind(',');
        if (last == std::string::npos) throw std::invalid_argument("malformed field row");
        values.push_back(std::stod(line.substr(last + 1)));
    }
    // node count (m+1)^n determines m
    const double per_axis = (n == 2) ? std::sqrt(static_cast<double>(values.size()))
                                     : std::cbrt(static_cast<double>(values.size()));
    const int m = static_cast<int>(std::llround(per_axis)) - 1;
    auto check = [&](int mm) {
        long long count = 1;
        for (int a = 0; a < n; ++a) count *= mm + 1;
        return count == static_cast<long long>(values.size());
    };
    if (m < 2 || !check(m)) throw std::invalid_argument("field row count is not a full lattice");

    auto grid = build_grid(n, m);
    MeshFunction u(grid);
    for (int fl = 0; fl < grid->node_count(); ++fl) u[fl] = values[static_cast<size_t>(fl)];
    return {grid, std::move(u)};
}

std::string export_slice(const MeshFunction& u, int axis, double value) {
    const Grid& g = u.grid();
    if (g.dim() != 3) throw std::invalid_argument("slice requires a 3-d field");
    if (axis < 0 || axis > 2) throw std::invalid_argument("slice axis must be 0, 1 or 2");

    const double scaled = value * g.subdivisions();
    const int plane = static_cast<int>(std::llround(scaled));
    if (plane < 0 || plane > g.subdivisions() || std::abs(scaled - plane) > 1e-9 * g.subdivisions())
        throw std::invalid_argument("slice plane not on grid");

    int a1 = 0, a2 = 0;
    switch (axis) {
        case 0: a1 = 1; a2 = 2; break;
        case 1: a1 = 0; a2 = 2; break;
        default: a1 = 0; a2 = 1; break;
    }

    std::ostringstream out;
    out << 'x' << (a1 + 1) << ",x" << (a2 + 1) << ",u\n";
    for (int j = 0; j <= g.subdivisions(); ++j)
        for (int i = 0; i <= g.subdivisions(); ++i) {
            std::array<int, 3> mi{};
            mi[static_cast<size_t>(axis)] = plane;
            mi[static_cast<size_t>(a1)] = i;
            mi[static_cast<size_t>(a2)] = j;
            const int fl = g.flat_index(mi[0], mi[1], mi[2]);
            const Point p = g.node_coords(fl);
            out << fmt17(p[static_cast<size_t>(a1)]) << ',' << fmt17(p[static_cast<size_t>(a2)])
                << ',' << fmt17(u[fl]) << '\n';
        }
    return out.str();
}

}  // namespace khess
