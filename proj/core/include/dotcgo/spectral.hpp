#pragma once

#include <cstddef>
#include <vector>

#include "dotcgo/field.hpp"

namespace dotcgo {

using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

// Coefficients on the lattice frequencies (pi/R_box) * {-N/2..N/2-1}^n,
// stored in FFT order (slot j holds signed index signed_index(j, N)).
struct SpectralField {
    Grid grid;
    std::vector<cplx> c;
};

// Frequency vector of flat spectral slot idx.
RVec frequency(const Grid& g, std::size_t idx);

// Cell volume of the frequency lattice, (pi/R_box)^n.
double frequency_cell(const Grid& g);

// Measure attached to each frequency cell in every spectral norm.
// Chosen so that hs_norm(f, 0) equals the L2 norm: 1/(2 R_box)^n.
double spectral_measure(const Grid& g);

// fhat(xi) = h^n sum_x f(x) exp(-i xi.x); ifft inverts it exactly.
SpectralField fft(const ComplexField& f);
SpectralField fft(const RealField& f);
ComplexField ifft(const SpectralField& F);

// Bilinear dot products throughout, never conjugated.
cplx dot(const CVec& a, const CVec& b);
cplx dot(const CVec& a, const RVec& b);
double norm2(const CVec& a); // sum |a_d|^2

// p_zeta(xi) = -|xi|^2 + 2i zeta.xi
cplx symbol_p(const CVec& zeta, const RVec& xi);

// Lattice counterpart of zeta: (2/h) asinh(h zeta_d / 2). exp(zt.x) is
// then exactly harmonic for the 2n+1 point Laplacian.
CVec lattice_zeta(const CVec& zeta, double h);

// Symbol of exp(-zt.x) Lap_h exp(zt.x): sum_d (4/h^2) sinh^2((zt_d + i xi_d) h/2).
cplx lattice_symbol(const CVec& zt, const RVec& xi, double h);

enum class SymbolKind { continuum, lattice };

struct BourgainWeight {
    CVec zeta;
    double reg_floor = 0.0;
    SymbolKind kind = SymbolKind::continuum;
    double h = 0.0; // only used by the lattice symbol
    RVec shift;     // Bloch offset added to every lattice frequency, empty = none
};

// Continuum symbol, reg_floor = 1e-6 |zeta|^2.
BourgainWeight default_weight(const CVec& zeta);

// Weight used by the CGO solver: lattice symbol, reg_floor = |zeta| pi/R_box.
BourgainWeight cgo_weight(const CVec& zeta, const Grid& g);

cplx weight_symbol(const BourgainWeight& w, const RVec& xi);

// Precomputed symbol on every lattice mode of one grid.
struct SymbolTable {
    std::vector<cplx> p;      // raw symbol
    std::vector<cplx> p_reg;  // clamped in modulus at reg_floor, phase kept
    std::vector<double> wt;   // max(|p|, reg_floor)
    double min_abs_p = 0.0;
    std::size_t clamped = 0;
};
SymbolTable symbol_table(const Grid& g, const BourgainWeight& w);

double xnorm(const SpectralField& F, const SymbolTable& t, double b);
double xnorm(const ComplexField& f, const BourgainWeight& w, double b);
double xnorm(const RealField& f, const BourgainWeight& w, double b);

struct InvDeltaResult {
    ComplexField u;
    double min_abs_p = 0.0;
    std::size_t clamped = 0;
    bool warning = false; // some mode had |p| < reg_floor
};
InvDeltaResult inv_delta_zeta(const ComplexField& f, const BourgainWeight& w);

// Applies Delta + 2 zeta.grad spectrally, i.e. multiplies by p_zeta.
ComplexField apply_delta_zeta(const ComplexField& f, const BourgainWeight& w);

double hs_norm(const SpectralField& F, double s);
double hs_norm(const RealField& f, double s);
double hs_norm(const ComplexField& f, double s);

} // namespace dotcgo
