#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace dotcgo {

// Periodic lattice on [-R_box, R_box)^n with node j at -R_box + j*h.
// Omega is the closed cube [-L, L]^n, L = m_omega*h, centred on node N/2.
// B is the ball of radius R_ball; Omega sits inside B inside the box.
struct Grid {
    int n = 3;
    int N = 32;
    double R_box = 0.5;
    int m_omega = 6;
    double R_ball = 0.41;

    double h() const { return 2.0 * R_box / N; }
    double L_omega() const { return m_omega * h(); }
    std::size_t size() const;
    double coord(int j) const { return -R_box + j * h(); }

    int omega_lo() const { return N / 2 - m_omega; }
    int omega_hi() const { return N / 2 + m_omega; }

    std::array<int, 3> unflatten(std::size_t idx) const;
    std::size_t flatten(const std::array<int, 3>& p) const;
    std::array<double, 3> position(std::size_t idx) const;

    bool in_omega(std::size_t idx) const;
    bool in_ball(std::size_t idx) const;

    // Safety gap used for Omega in B, B in box and bump-in-Omega tests.
    // Coarse grids cannot afford 2h: N = 16 uses h, N = 8 is merely strict.
    double margin() const { return N >= 32 ? 2.0 * h() : (N == 16 ? h() : 0.0); }

    bool operator==(const Grid& o) const;
};

// Validates every Grid invariant, throws ConfigError naming the first
// violated constraint.
Grid make_grid(int n, int N, double R_box, double L_omega, double R_ball);

// Signed integer frequency index for FFT slot j (0..N-1).
inline int signed_index(int j, int N) { return j < N / 2 ? j : j - N; }

} // namespace dotcgo
