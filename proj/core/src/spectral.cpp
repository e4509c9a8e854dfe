#include "dotcgo/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace dotcgo {

namespace {

// Plans are keyed by shape and direction. Planning is not thread safe in
// FFTW, execution through fftw_execute_dft on fresh arrays is.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int n, int N, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_tuple(n, N, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        int dims[3] = {N, N, N};
        std::size_t total = 1;
        for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(N);
        fftw_complex* a = fftw_alloc_complex(total);
        fftw_complex* b = fftw_alloc_complex(total);
        fftw_plan p = fftw_plan_dft(n, dims, a, b, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(a);
        fftw_free(b);
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mu_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void run(const Grid& g, int sign, const std::vector<cplx>& in, std::vector<cplx>& out) {
    fftw_plan p = PlanCache::instance().get(g.n, g.N, sign);
    out.resize(in.size());
    // fftw_execute_dft does not write to its input for out-of-place plans
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
    fftw_execute_dft(p, src, reinterpret_cast<fftw_complex*>(out.data()));
}

// (-1)^(k_1 + ... + k_n) accounts for the lattice starting at -R_box.
double parity(const Grid& g, std::size_t idx) {
    auto p = g.unflatten(idx);
    int s = 0;
    for (int d = 0; d < g.n; ++d) s += p[d];
    return (s & 1) ? -1.0 : 1.0;
}

} // namespace

RVec frequency(const Grid& g, std::size_t idx) {
    auto p = g.unflatten(idx);
    const double dk = std::numbers::pi / g.R_box;
    RVec xi(g.n);
    for (int d = 0; d < g.n; ++d) xi[d] = dk * signed_index(p[d], g.N);
    return xi;
}

double frequency_cell(const Grid& g) {
    return std::pow(std::numbers::pi / g.R_box, g.n);
}

double spectral_measure(const Grid& g) { return std::pow(2.0 * g.R_box, -g.n); }

SpectralField fft(const ComplexField& f) {
    const Grid& g = f.grid;
    SpectralField F{g, {}};
    run(g, FFTW_FORWARD, f.v, F.c);
    const double hn = std::pow(g.h(), g.n);
    for (std::size_t i = 0; i < F.c.size(); ++i) F.c[i] *= hn * parity(g, i);
    return F;
}

SpectralField fft(const RealField& f) { return fft(to_complex(f)); }

ComplexField ifft(const SpectralField& F) {
    const Grid& g = F.grid;
    std::vector<cplx> tmp(F.c.size());
    for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = F.c[i] * parity(g, i);
    ComplexField f(g);
    run(g, FFTW_BACKWARD, tmp, f.v);
    const double scale = spectral_measure(g);
    for (auto& z : f.v) z *= scale;
    return f;
}

cplx dot(const CVec& a, const CVec& b) {
    cplx s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) s += a[d] * b[d];
    return s;
}

cplx dot(const CVec& a, const RVec& b) {
    cplx s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) s += a[d] * b[d];
    return s;
}

double norm2(const CVec& a) {
    double s = 0.0;
    for (const cplx& z : a) s += std::norm(z);
    return s;
}

cplx symbol_p(const CVec& zeta, const RVec& xi) {
    double xx = 0.0;
    for (double x : xi) xx += x * x;
    return -xx + cplx(0.0, 2.0) * dot(zeta, xi);
}

CVec lattice_zeta(const CVec& zeta, double h) {
    CVec zt(zeta.size());
    for (std::size_t d = 0; d < zeta.size(); ++d)
        zt[d] = (2.0 / h) * std::asinh(0.5 * h * zeta[d]);
    return zt;
}

cplx lattice_symbol(const CVec& zt, const RVec& xi, double h) {
    cplx s = 0.0;
    for (std::size_t d = 0; d < zt.size(); ++d) {
        const cplx t = std::sinh(0.5 * h * (zt[d] + cplx(0.0, xi[d])));
        s += t * t;
    }
    return (4.0 / (h * h)) * s;
}

BourgainWeight default_weight(const CVec& zeta) {
    BourgainWeight w;
    w.zeta = zeta;
    w.reg_floor = 1e-6 * norm2(zeta);
    return w;
}

BourgainWeight cgo_weight(const CVec& zeta, const Grid& g) {
    BourgainWeight w;
    w.zeta = lattice_zeta(zeta, g.h());
    w.kind = SymbolKind::lattice;
    w.h = g.h();
    w.reg_floor = std::sqrt(norm2(zeta)) * std::numbers::pi / g.R_box;
    return w;
}

cplx weight_symbol(const BourgainWeight& w, const RVec& xi) {
    return w.kind == SymbolKind::lattice ? lattice_symbol(w.zeta, xi, w.h)
                                         : symbol_p(w.zeta, xi);
}

SymbolTable symbol_table(const Grid& g, const BourgainWeight& w) {
    SymbolTable t;
    const std::size_t M = g.size();
    t.p.resize(M);
    t.p_reg.resize(M);
    t.wt.resize(M);
    t.min_abs_p = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < M; ++i) {
        RVec xi = frequency(g, i);
        for (std::size_t d = 0; d < w.shift.size(); ++d) xi[d] += w.shift[d];
        const cplx p = weight_symbol(w, xi);
        const double a = std::abs(p);
        t.p[i] = p;
        t.min_abs_p = std::min(t.min_abs_p, a);
        if (a < w.reg_floor) {
            t.p_reg[i] = a > 0.0 ? p * (w.reg_floor / a) : cplx(w.reg_floor, 0.0);
            t.wt[i] = w.reg_floor;
            ++t.clamped;
        } else {
            t.p_reg[i] = p;
            t.wt[i] = a;
        }
    }
    return t;
}

double xnorm(const SpectralField& F, const SymbolTable& t, double b) {
    double s = 0.0;
    for (std::size_t i = 0; i < F.c.size(); ++i) {
        if (F.c[i] == cplx(0.0)) continue;
        s += std::pow(t.wt[i], 2.0 * b) * std::norm(F.c[i]);
    }
    return std::sqrt(s * spectral_measure(F.grid));
}

double xnorm(const ComplexField& f, const BourgainWeight& w, double b) {
    return xnorm(fft(f), symbol_table(f.grid, w), b);
}

double xnorm(const RealField& f, const BourgainWeight& w, double b) {
    return xnorm(to_complex(f), w, b);
}

InvDeltaResult inv_delta_zeta(const ComplexField& f, const BourgainWeight& w) {
    const SymbolTable t = symbol_table(f.grid, w);
    SpectralField F = fft(f);
    for (std::size_t i = 0; i < F.c.size(); ++i) F.c[i] /= t.p_reg[i];
    InvDeltaResult r;
    r.u = ifft(F);
    r.min_abs_p = t.min_abs_p;
    r.clamped = t.clamped;
    r.warning = t.clamped > 0;
    return r;
}

ComplexField apply_delta_zeta(const ComplexField& f, const BourgainWeight& w) {
    const SymbolTable t = symbol_table(f.grid, w);
    SpectralField F = fft(f);
    for (std::size_t i = 0; i < F.c.size(); ++i) F.c[i] *= t.p[i];
    return ifft(F);
}

double hs_norm(const SpectralField& F, double s) {
    const Grid& g = F.grid;
    double acc = 0.0;
    for (std::size_t i = 0; i < F.c.size(); ++i) {
        const RVec xi = frequency(g, i);
        double xx = 0.0;
        for (double x : xi) xx += x * x;
        acc += std::pow(1.0 + xx, -s) * std::norm(F.c[i]);
    }
    return std::sqrt(acc * spectral_measure(g));
}

double hs_norm(const RealField& f, double s) { return hs_norm(fft(f), s); }
double hs_norm(const ComplexField& f, double s) { return hs_norm(fft(f), s); }

} // namespace dotcgo
