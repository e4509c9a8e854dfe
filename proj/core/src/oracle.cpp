#include "dotcgo/oracle.hpp"

#include <cmath>
#include <numbers>

#include "dotcgo/errors.hpp"

namespace dotcgo::oracle {

namespace {

bool on_face(const Grid& g, const std::array<int, 3>& p) {
    for (int d = 0; d < g.n; ++d)
        if (p[d] == g.omega_lo() || p[d] == g.omega_hi()) return true;
    return false;
}

} // namespace

DenseProblem dense_problem(const CoefficientSet& c) {
    const Grid& g = c.gamma.grid;
    if (g.N > 12) throw DomainViolation("dense oracle limited to N <= 12");
    DenseProblem P;
    std::vector<long> slot(g.size(), -1);
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (!g.in_omega(idx)) continue;
        if (on_face(g, g.unflatten(idx))) {
            slot[idx] = static_cast<long>(P.boundary.size());
            P.boundary.push_back(idx);
        } else {
            slot[idx] = static_cast<long>(P.interior.size());
            P.interior.push_back(idx);
        }
    }
    P.nI = P.interior.size();
    P.nB = P.boundary.size();
    P.A.assign(P.nI * P.nI, 0.0);
    P.C.assign(P.nI * P.nB, 0.0);
    const double h = g.h();
    // -(div gamma grad u + (k^2 + D) u) at each interior node, harmonic-free
    // geometric face values, scaled by 1/1 (no h^n factor here)
    for (std::size_t a = 0; a < P.nI; ++a) {
        const std::size_t idx = P.interior[a];
        const auto p = g.unflatten(idx);
        double diag = -(c.k * c.k + c.D[idx]);
        for (int d = 0; d < g.n; ++d) {
            for (int step : {-1, 1}) {
                auto q = p;
                q[d] += step;
                const std::size_t qi = g.flatten(q);
                const double ge = std::sqrt(c.gamma[idx] * c.gamma[qi]) / (h * h);
                diag += ge;
                if (on_face(g, q))
                    P.C[a * P.nB + static_cast<std::size_t>(slot[qi])] -= ge;
                else
                    P.A[a * P.nI + static_cast<std::size_t>(slot[qi])] -= ge;
            }
        }
        P.A[a * P.nI + a] += diag;
    }
    return P;
}

std::vector<double> gauss_solve(std::vector<double> A, std::vector<double> b, std::size_t n) {
    double scale = 0.0;
    for (double x : A) scale = std::max(scale, std::abs(x));
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
        if (std::abs(A[piv * n + col]) <= 1e-14 * scale)
            throw SingularMatrix("dense oracle: zero pivot in column " + std::to_string(col));
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(A[col * n + j], A[piv * n + j]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = A[r * n + col] / A[col * n + col];
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) A[r * n + j] -= f * A[col * n + j];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= A[i * n + j] * x[j];
        x[i] = s / A[i * n + i];
    }
    return x;
}

RealField dense_solve(const CoefficientSet& c, const std::vector<double>& g) {
    const DenseProblem P = dense_problem(c);
    if (g.size() != P.nB) throw DomainViolation("dense_solve: boundary data length");
    std::vector<double> rhs(P.nI, 0.0);
    for (std::size_t a = 0; a < P.nI; ++a)
        for (std::size_t b = 0; b < P.nB; ++b) rhs[a] -= P.C[a * P.nB + b] * g[b];
    const std::vector<double> x = gauss_solve(P.A, rhs, P.nI);

    // residual self-check
    double res = 0.0, nr = 0.0;
    for (std::size_t a = 0; a < P.nI; ++a) {
        double s = -rhs[a];
        for (std::size_t j = 0; j < P.nI; ++j) s += P.A[a * P.nI + j] * x[j];
        res = std::max(res, std::abs(s));
        nr = std::max(nr, std::abs(rhs[a]));
    }
    if (res > 1e-12 * std::max(1.0, nr)) throw SingularMatrix("dense oracle: residual too large");

    RealField u(c.gamma.grid, 0.0);
    for (std::size_t a = 0; a < P.nI; ++a) u[P.interior[a]] = x[a];
    for (std::size_t b = 0; b < P.nB; ++b) u[P.boundary[b]] = g[b];
    return u;
}

cplx quadrature_integral(const std::vector<ComplexField>& fields, Region region) {
    if (fields.empty()) return 0.0;
    const Grid& g = fields.front().grid;
    const double hn = std::pow(g.h(), g.n);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (region == Region::omega && !g.in_omega(i)) continue;
        if (region == Region::ball && !g.in_ball(i)) continue;
        cplx prod = 1.0;
        for (const auto& f : fields) prod *= f[i];
        acc += prod;
    }
    return hn * acc;
}

cplx fourier_mode_oracle(const RealField& Q1, const RealField& Q2, double r, const RVec& eta) {
    const Grid& g = Q1.grid;
    const double hn = std::pow(g.h(), g.n);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.position(i);
        double ph = 0.0;
        for (int d = 0; d < g.n; ++d) ph += r * eta[d] * x[d];
        acc += (Q2[i] - Q1[i]) * cplx(std::cos(ph), -std::sin(ph));
    }
    return hn * acc;
}

std::vector<cplx> direct_dft(const ComplexField& f) {
    const Grid& g = f.grid;
    const double hn = std::pow(g.h(), g.n);
    const double dk = std::numbers::pi / g.R_box;
    std::vector<cplx> out(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto kp = g.unflatten(k);
        cplx acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto x = g.position(i);
            double ph = 0.0;
            for (int d = 0; d < g.n; ++d) ph += dk * signed_index(kp[d], g.N) * x[d];
            acc += f[i] * cplx(std::cos(ph), -std::sin(ph));
        }
        out[k] = hn * acc;
    }
    return out;
}

double hs_norm_direct(const ComplexField& f, double s) {
    const Grid& g = f.grid;
    const std::vector<cplx> F = direct_dft(f);
    const double dk = std::numbers::pi / g.R_box;
    double acc = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto kp = g.unflatten(k);
        double xx = 0.0;
        for (int d = 0; d < g.n; ++d) {
            const double xi = dk * signed_index(kp[d], g.N);
            xx += xi * xi;
        }
        acc += std::pow(1.0 + xx, -s) * std::norm(F[k]);
    }
    return std::sqrt(acc / std::pow(2.0 * g.R_box, g.n));
}

double lemma41_volume_side(const CoefficientSet& c1, const CoefficientSet& c2,
                           const RealField& v1, const RealField& v2) {
    const Grid& g = v1.grid;
    const double h = g.h();
    const double hn = std::pow(h, g.n);
    auto grad_term = [&](const CoefficientSet& c) {
        double acc = 0.0;
        for (std::size_t idx = 0; idx < g.size(); ++idx) {
            if (!g.in_omega(idx)) continue;
            const auto p = g.unflatten(idx);
            for (int d = 0; d < g.n; ++d) {
                if (p[d] == g.omega_hi()) continue;
                auto q = p;
                q[d] += 1;
                const std::size_t qi = g.flatten(q);
                const double da = std::sqrt(c.gamma[qi]) - std::sqrt(c.gamma[idx]);
                if (da == 0.0) continue;
                const double wq = v1[qi] * v2[qi] / std::sqrt(c.gamma[qi]);
                const double wi = v1[idx] * v2[idx] / std::sqrt(c.gamma[idx]);
                acc += (da / h) * ((wq - wi) / h);
            }
        }
        return hn * acc;
    };
    double mass = 0.0;
    const double k2 = c1.k * c1.k;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (!g.in_omega(idx)) continue;
        const double dq = (k2 + c2.D[idx]) / c2.gamma[idx] - (k2 + c1.D[idx]) / c1.gamma[idx];
        mass += dq * v1[idx] * v2[idx];
    }
    return grad_term(c2) - grad_term(c1) + hn * mass;
}

double power_norm_star(const Eigen::MatrixXd& L, const Eigen::VectorXd& lambda, int iters) {
    const Eigen::Index m = L.rows();
    Eigen::MatrixXd M(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            M(i, j) = std::pow(1.0 + lambda[i], -0.25) * L(i, j) * std::pow(1.0 + lambda[j], -0.25);
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(m, 1.0, 2.0);
    double val = 0.0;
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd y = M.transpose() * (M * x);
        const double ny = y.norm();
        if (ny == 0.0) return 0.0;
        const double next = std::sqrt(ny / x.norm());
        x = y / ny;
        if (it > 10 && std::abs(next - val) <= 1e-15 * next) { val = next; break; }
        val = next;
    }
    return val;
}

} // namespace dotcgo::oracle
