#include "dotcgo/phantom.hpp"

#include <cmath>

#include "dotcgo/errors.hpp"

namespace dotcgo {

double bump_value(const Bump& b, const std::array<double, 3>& x, int n) {
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) {
        const double t = x[d] - b.center[d];
        r2 += t * t;
    }
    const double s = r2 / (b.rho * b.rho);
    if (s >= 1.0) return 0.0;
    return b.amp * std::exp(-1.0 / (1.0 - s));
}

CoefficientSet make_phantom(const Grid& grid, const Phantom& ph, double k, double M) {
    if (k < 0.0) throw DomainViolation("make_phantom: k must be >= 0");
    const double L = grid.L_omega();
    const double gap = grid.margin();
    for (std::size_t i = 0; i < ph.bumps.size(); ++i) {
        const Bump& b = ph.bumps[i];
        if (!(b.rho > 0.0))
            throw DomainViolation("make_phantom: bump radius must be positive");
        for (int d = 0; d < grid.n; ++d) {
            const double reach = std::abs(b.center[d]) + b.rho;
            if (reach > L - gap || (gap == 0.0 && reach >= L))
                throw BumpOutsideOmega("bump " + std::to_string(i) +
                                       " support leaves Omega");
        }
    }

    CoefficientSet c;
    c.k = k;
    c.M = M;
    c.gamma = RealField(grid, 1.0);
    c.D = RealField(grid, 0.0);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        const auto x = grid.position(idx);
        for (const Bump& b : ph.bumps) {
            const double val = bump_value(b, x, grid.n);
            if (b.target == BumpTarget::gamma)
                c.gamma[idx] += val;
            else
                c.D[idx] += val;
        }
    }
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        if (!(c.gamma[idx] > 1.0 / M))
            throw PositivityViolated("gamma <= 1/M at node " + std::to_string(idx));
        if (c.gamma[idx] > M || std::abs(c.D[idx]) > M)
            throw DomainViolation("coefficient exceeds the a priori bound M");
    }
    return c;
}

BumpTarget parse_target(const std::string& s) {
    if (s == "gamma") return BumpTarget::gamma;
    if (s == "D") return BumpTarget::D;
    throw ConfigError("bump target must be \"gamma\" or \"D\", got \"" + s + "\"");
}

const char* target_name(BumpTarget t) { return t == BumpTarget::gamma ? "gamma" : "D"; }

} // namespace dotcgo
