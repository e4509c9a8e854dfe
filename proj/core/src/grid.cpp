#include "dotcgo/grid.hpp"

#include <cmath>
#include <sstream>

#include "dotcgo/errors.hpp"

namespace dotcgo {

std::size_t Grid::size() const {
    std::size_t s = 1;
    for (int d = 0; d < n; ++d) s *= static_cast<std::size_t>(N);
    return s;
}

std::array<int, 3> Grid::unflatten(std::size_t idx) const {
    std::array<int, 3> p{0, 0, 0};
    for (int d = n - 1; d >= 0; --d) {
        p[d] = static_cast<int>(idx % N);
        idx /= N;
    }
    return p;
}

std::size_t Grid::flatten(const std::array<int, 3>& p) const {
    std::size_t idx = 0;
    for (int d = 0; d < n; ++d) idx = idx * N + static_cast<std::size_t>(p[d]);
    return idx;
}

std::array<double, 3> Grid::position(std::size_t idx) const {
    auto p = unflatten(idx);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int d = 0; d < n; ++d) x[d] = coord(p[d]);
    return x;
}

bool Grid::in_omega(std::size_t idx) const {
    auto p = unflatten(idx);
    for (int d = 0; d < n; ++d)
        if (p[d] < omega_lo() || p[d] > omega_hi()) return false;
    return true;
}

bool Grid::in_ball(std::size_t idx) const {
    auto x = position(idx);
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
    return r2 <= R_ball * R_ball;
}

bool Grid::operator==(const Grid& o) const {
    return n == o.n && N == o.N && R_box == o.R_box && m_omega == o.m_omega &&
           R_ball == o.R_ball;
}

Grid make_grid(int n, int N, double R_box, double L_omega, double R_ball) {
    auto fail = [](const std::string& msg) { throw ConfigError("grid: " + msg); };
    if (n != 2 && n != 3) fail("n must be 2 or 3");
    if (N < 8 || (N & (N - 1)) != 0) fail("N must be a power of two >= 8");
    if (!(R_box > 0.0)) fail("R_box must be positive");

    Grid g;
    g.n = n;
    g.N = N;
    g.R_box = R_box;
    g.R_ball = R_ball;
    const double h = g.h();
    const double m = L_omega / h;
    g.m_omega = static_cast<int>(std::lround(m));
    if (std::abs(m - g.m_omega) > 1e-9 * std::max(1.0, m))
        fail("L_Omega must be an integer multiple of h");
    if (g.m_omega < 2) fail("L_Omega must be at least 2h");

    const double gap = g.margin();
    const double corner = g.L_omega() * std::sqrt(static_cast<double>(n));
    if (!(corner + gap < R_ball) || (gap == 0.0 && !(corner < R_ball)))
        fail("Omega must lie inside B with margin");
    if (!(R_ball + gap < R_box)) fail("B must lie inside the box with margin");
    return g;
}

} // namespace dotcgo
