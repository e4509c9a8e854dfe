#include "dotcgo/liouville.hpp"

#include <cmath>

namespace dotcgo {

RealField discrete_laplacian(const RealField& f) {
    const Grid& g = f.grid;
    const double ih2 = 1.0 / (g.h() * g.h());
    RealField out(g, 0.0);
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        auto p = g.unflatten(idx);
        double acc = 0.0;
        for (int d = 0; d < g.n; ++d) {
            auto a = p, b = p;
            a[d] = (p[d] + 1) % g.N;
            b[d] = (p[d] + g.N - 1) % g.N;
            acc += f[g.flatten(a)] + f[g.flatten(b)] - 2.0 * f[idx];
        }
        out[idx] = acc * ih2;
    }
    return out;
}

RealField liouville_q(const CoefficientSet& c) {
    RealField sg(c.gamma.grid);
    for (std::size_t i = 0; i < sg.size(); ++i) sg[i] = std::sqrt(c.gamma[i]);
    RealField q = discrete_laplacian(sg);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = -q[i] / sg[i];
    return q;
}

RealField liouville_Q(const CoefficientSet& c) {
    RealField Q = liouville_q(c);
    const Grid& g = Q.grid;
    const double k2 = c.k * c.k;
    for (std::size_t i = 0; i < Q.size(); ++i)
        if (g.in_omega(i)) Q[i] += (k2 + c.D[i]) / c.gamma[i];
    return Q;
}

RealField liouville_forward(const CoefficientSet& c, const RealField& u) {
    RealField v(u.grid);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sqrt(c.gamma[i]) * u[i];
    return v;
}

ComplexField liouville_forward(const CoefficientSet& c, const ComplexField& u) {
    ComplexField v(u.grid);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sqrt(c.gamma[i]) * u[i];
    return v;
}

} // namespace dotcgo
