#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dotcgo/field.hpp"

namespace dotcgo {

// Raw content of a DOTF file.
struct DotfData {
    std::uint32_t version = 1;
    int n = 0;
    int N = 0;
    double R_box = 0.0;
    bool is_complex = false;
    std::vector<cplx> values;
};

void write_dotf(const std::string& path, const RealField& f);
void write_dotf(const std::string& path, const ComplexField& f);

std::vector<unsigned char> encode_dotf(const Grid& g, const std::vector<cplx>& values,
                                       bool is_complex);
DotfData decode_dotf(const std::vector<unsigned char>& bytes);
DotfData read_dotf(const std::string& path);

// Loads onto a caller supplied grid, checking n, N and R_box agree.
RealField read_dotf_real(const std::string& path, const Grid& g);
ComplexField read_dotf_complex(const std::string& path, const Grid& g);

} // namespace dotcgo
