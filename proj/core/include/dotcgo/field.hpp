#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "dotcgo/grid.hpp"

namespace dotcgo {

using cplx = std::complex<double>;

template <class T>
struct Field {
    Grid grid;
    std::vector<T> v;

    Field() = default;
    explicit Field(const Grid& g, T init = T{}) : grid(g), v(g.size(), init) {}

    std::size_t size() const { return v.size(); }
    T& operator[](std::size_t i) { return v[i]; }
    const T& operator[](std::size_t i) const { return v[i]; }

    bool finite() const {
        for (const T& x : v)
            if (!std::isfinite(std::abs(x))) return false;
        return true;
    }
};

using RealField = Field<double>;
using ComplexField = Field<cplx>;

inline ComplexField to_complex(const RealField& f) {
    ComplexField out(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
    return out;
}

inline RealField real_part(const ComplexField& f) {
    RealField out(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
    return out;
}

} // namespace dotcgo
