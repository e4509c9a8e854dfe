#include "dotcgo/dotf.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "dotcgo/errors.hpp"

namespace dotcgo {

static_assert(std::endian::native == std::endian::little,
              "DOTF io assumes a little-endian host");

namespace {

constexpr std::size_t kHeaderBytes = 4 + 4 + 1 + 4 + 8 + 1;

template <class T>
void put(std::vector<unsigned char>& out, T x) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &x, sizeof(T));
    out.insert(out.end(), buf, buf + sizeof(T));
}

template <class T>
T get(const std::vector<unsigned char>& in, std::size_t& pos, const char* what) {
    if (pos + sizeof(T) > in.size())
        throw FormatError(std::string("DOTF: truncated ") + what, in.size());
    T x;
    std::memcpy(&x, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return x;
}

void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error("write failed: " + path);
}

void check_grid(const DotfData& d, const Grid& g, const std::string& path) {
    if (d.n != g.n || d.N != g.N || d.R_box != g.R_box)
        throw FormatError("DOTF " + path + ": grid does not match", 4);
}

} // namespace

std::vector<unsigned char> encode_dotf(const Grid& g, const std::vector<cplx>& values,
                                       bool is_complex) {
    std::vector<unsigned char> out{'D', 'O', 'T', 'F'};
    out.reserve(kHeaderBytes + values.size() * (is_complex ? 16 : 8));
    put<std::uint32_t>(out, 1);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(g.n));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.N));
    put<double>(out, g.R_box);
    put<std::uint8_t>(out, is_complex ? 1 : 0);
    for (const cplx& z : values) {
        put<double>(out, z.real());
        if (is_complex) put<double>(out, z.imag());
    }
    return out;
}

DotfData decode_dotf(const std::vector<unsigned char>& in) {
    if (in.size() < 4 || std::memcmp(in.data(), "DOTF", 4) != 0)
        throw FormatError("DOTF: bad magic", 0);
    std::size_t pos = 4;
    DotfData d;
    d.version = get<std::uint32_t>(in, pos, "version");
    if (d.version != 1) throw FormatError("DOTF: unsupported version", 4);
    d.n = get<std::uint8_t>(in, pos, "n");
    if (d.n < 1 || d.n > 3) throw FormatError("DOTF: bad dimension", 8);
    d.N = static_cast<int>(get<std::uint32_t>(in, pos, "N"));
    if (d.N < 1 || d.N > (1 << 12)) throw FormatError("DOTF: bad N", 9);
    d.R_box = get<double>(in, pos, "R_box");
    const auto dtype = get<std::uint8_t>(in, pos, "dtype");
    if (dtype > 1) throw FormatError("DOTF: unknown dtype", 21);
    d.is_complex = dtype == 1;

    std::size_t count = 1;
    for (int i = 0; i < d.n; ++i) count *= static_cast<std::size_t>(d.N);
    const std::size_t need = count * (d.is_complex ? 16 : 8);
    if (in.size() - pos < need)
        throw FormatError("DOTF: payload truncated", in.size());
    if (in.size() - pos > need) throw FormatError("DOTF: trailing bytes", pos + need);
    d.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t at = pos;
        double re = get<double>(in, pos, "payload");
        double im = d.is_complex ? get<double>(in, pos, "payload") : 0.0;
        if (!std::isfinite(re) || !std::isfinite(im))
            throw FormatError("DOTF: non-finite sample", at);
        d.values[i] = {re, im};
    }
    return d;
}

DotfData read_dotf(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                     std::istreambuf_iterator<char>());
    return decode_dotf(bytes);
}

void write_dotf(const std::string& path, const RealField& f) {
    std::vector<cplx> vals(f.v.begin(), f.v.end());
    write_bytes(path, encode_dotf(f.grid, vals, false));
}

void write_dotf(const std::string& path, const ComplexField& f) {
    write_bytes(path, encode_dotf(f.grid, f.v, true));
}

RealField read_dotf_real(const std::string& path, const Grid& g) {
    DotfData d = read_dotf(path);
    check_grid(d, g, path);
    if (d.is_complex) throw FormatError("DOTF " + path + ": expected real payload", 21);
    RealField f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = d.values[i].real();
    return f;
}

ComplexField read_dotf_complex(const std::string& path, const Grid& g) {
    DotfData d = read_dotf(path);
    check_grid(d, g, path);
    ComplexField f(g);
    f.v = std::move(d.values);
    return f;
}

} // namespace dotcgo
