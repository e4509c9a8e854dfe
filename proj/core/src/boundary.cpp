#include "dotcgo/boundary.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dotcgo/errors.hpp"

namespace dotcgo {

using json = nlohmann::json;

OmegaNodes omega_nodes(const Grid& g) {
    OmegaNodes on;
    on.local.assign(g.size(), -1);
    on.on_face.assign(g.size(), 0);
    const int lo = g.omega_lo(), hi = g.omega_hi();
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (!g.in_omega(idx)) continue;
        auto p = g.unflatten(idx);
        bool face = false;
        for (int d = 0; d < g.n; ++d) face = face || p[d] == lo || p[d] == hi;
        on.on_face[idx] = face ? 1 : 0;
        auto& list = face ? on.boundary : on.interior;
        on.local[idx] = static_cast<int>(list.size());
        list.push_back(idx);
    }
    return on;
}

std::string basis_id(const Grid& g) {
    std::ostringstream os;
    os << "cube-n" << g.n << "-N" << g.N << "-m" << g.m_omega << "-R" << g.R_box;
    return os.str();
}

BoundaryBasis build_boundary_basis(const Grid& g) {
    const OmegaNodes on = omega_nodes(g);
    const auto nb = static_cast<Eigen::Index>(on.boundary.size());
    const double ih2 = 1.0 / (g.h() * g.h());

    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nb, nb);
    for (Eigen::Index a = 0; a < nb; ++a) {
        auto p = g.unflatten(on.boundary[a]);
        for (int d = 0; d < g.n; ++d) {
            if (p[d] + 1 > g.omega_hi()) continue;
            auto q = p;
            q[d] += 1;
            const std::size_t qi = g.flatten(q);
            // both ends on the surface means the edge lies in a face
            if (!on.is_boundary(qi)) continue;
            const int b = on.local[qi];
            G(a, a) += ih2;
            G(b, b) += ih2;
            G(a, b) -= ih2;
            G(b, a) -= ih2;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    if (es.info() != Eigen::Success) throw Error("boundary eigensolver failed");

    BoundaryBasis B;
    B.grid = g;
    B.nodes = on.boundary;
    B.weight = std::pow(g.h(), g.n - 1);
    B.lambda = es.eigenvalues().cwiseMax(0.0);
    B.phi = es.eigenvectors() / std::sqrt(B.weight);
    // fix the sign of each eigenvector for reproducibility
    for (Eigen::Index j = 0; j < nb; ++j) {
        Eigen::Index at;
        B.phi.col(j).cwiseAbs().maxCoeff(&at);
        if (B.phi(at, j) < 0.0) B.phi.col(j) *= -1.0;
    }
    B.id = basis_id(g);
    return B;
}

Eigen::VectorXcd BoundaryBasis::project(const Eigen::VectorXcd& nodal, Eigen::Index m) const {
    return weight * (phi.leftCols(m).transpose().cast<cplx>() * nodal);
}

Eigen::VectorXcd BoundaryBasis::synthesize(const Eigen::VectorXcd& c) const {
    return phi.leftCols(c.size()).cast<cplx>() * c;
}

namespace {

std::string cache_stem(const Grid& g, const std::string& dir) {
    return (std::filesystem::path(dir) / ("basis-" + basis_id(g))).string();
}

void write_block(const std::string& path, const std::vector<const Eigen::MatrixXd*>& mats) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path);
    for (const auto* m : mats)
        os.write(reinterpret_cast<const char*>(m->data()),
                 static_cast<std::streamsize>(m->size() * sizeof(double)));
}

void read_block(const std::string& path, const std::vector<Eigen::MatrixXd*>& mats) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot read " + path);
    std::size_t offset = 0;
    for (auto* m : mats) {
        const auto bytes = static_cast<std::streamsize>(m->size() * sizeof(double));
        is.read(reinterpret_cast<char*>(m->data()), bytes);
        if (is.gcount() != bytes)
            throw FormatError("truncated binary block " + path,
                              offset + static_cast<std::size_t>(is.gcount()));
        offset += static_cast<std::size_t>(bytes);
    }
}

} // namespace

void save_basis(const BoundaryBasis& b, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::string stem = cache_stem(b.grid, dir);
    json meta = {{"id", b.id},
                 {"n", b.grid.n},
                 {"N", b.grid.N},
                 {"R_box", b.grid.R_box},
                 {"L_Omega", b.grid.L_omega()},
                 {"nodes", b.nodes},
                 {"modes", b.size()}};
    std::ofstream(stem + ".json") << meta.dump(1) << "\n";
    Eigen::MatrixXd lam = b.lambda;
    write_block(stem + ".bin", {&lam, &b.phi});
}

bool load_basis(const Grid& g, const std::string& dir, BoundaryBasis& out) {
    const std::string stem = cache_stem(g, dir);
    std::ifstream is(stem + ".json");
    if (!is) return false;
    json meta = json::parse(is);
    if (meta.at("n") != g.n || meta.at("N") != g.N ||
        std::abs(meta.at("L_Omega").get<double>() - g.L_omega()) > 1e-12)
        return false;
    const auto m = meta.at("modes").get<Eigen::Index>();
    BoundaryBasis b;
    b.grid = g;
    b.nodes = meta.at("nodes").get<std::vector<std::size_t>>();
    b.id = meta.at("id").get<std::string>();
    b.weight = std::pow(g.h(), g.n - 1);
    Eigen::MatrixXd lam(m, 1);
    b.phi.resize(static_cast<Eigen::Index>(b.nodes.size()), m);
    read_block(stem + ".bin", {&lam, &b.phi});
    b.lambda = lam.col(0);
    out = std::move(b);
    return true;
}

BoundaryBasis cached_basis(const Grid& g, const std::string& dir) {
    BoundaryBasis b;
    if (!dir.empty() && load_basis(g, dir, b)) return b;
    b = build_boundary_basis(g);
    if (!dir.empty()) save_basis(b, dir);
    return b;
}

DtNMatrix leading_block(const DtNMatrix& L, Eigen::Index m) {
    if (m > L.modes()) throw DomainViolation("leading_block: m exceeds matrix size");
    DtNMatrix out = L;
    out.L = L.L.topLeftCorner(m, m);
    return out;
}

void save_dtn(const DtNMatrix& L, const std::string& stem) {
    json meta = {{"n", L.n},
                 {"N", L.N},
                 {"m_modes", L.modes()},
                 {"k", L.k},
                 {"basis", L.basis},
                 {"layout", "column-major f64"}};
    std::ofstream(stem + ".json") << meta.dump(1) << "\n";
    write_block(stem + ".bin", {&L.L});
}

DtNMatrix load_dtn(const std::string& stem) {
    std::ifstream is(stem + ".json");
    if (!is) throw Error("cannot read " + stem + ".json");
    json meta = json::parse(is);
    DtNMatrix L;
    L.n = meta.at("n");
    L.N = meta.at("N");
    L.k = meta.at("k");
    L.basis = meta.at("basis");
    const auto m = meta.at("m_modes").get<Eigen::Index>();
    L.L.resize(m, m);
    read_block(stem + ".bin", {&L.L});
    return L;
}

double sobolev_boundary_norm(const Eigen::VectorXd& lambda, const Eigen::VectorXcd& c,
                             double s) {
    if (c.size() > lambda.size())
        throw DomainViolation("coefficient vector longer than the basis");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i)
        acc += std::pow(1.0 + lambda[i], s) * std::norm(c[i]);
    return std::sqrt(acc);
}

namespace {

Eigen::VectorXd weighted_singular_values(const Eigen::MatrixXd& L,
                                         const Eigen::VectorXd& lambda) {
    const Eigen::Index m = L.rows();
    if (L.cols() != m || lambda.size() < m)
        throw DomainViolation("operator_norm_star: shape mismatch");
    const Eigen::VectorXd w = (1.0 + lambda.head(m).array()).pow(-0.25).matrix();
    const Eigen::MatrixXd W = w.asDiagonal() * L * w.asDiagonal();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(W);
    return svd.singularValues();
}

} // namespace

double operator_norm_star(const Eigen::MatrixXd& L, const Eigen::VectorXd& lambda) {
    if (L.size() == 0) return 0.0;
    return weighted_singular_values(L, lambda)[0];
}

DataProxy data_proxy_A(const DtNMatrix& L1, const DtNMatrix& L2,
                       const Eigen::VectorXd& lambda, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw DomainViolation("delta must lie in (0,1)");
    if (L1.modes() != L2.modes() || L1.basis != L2.basis)
        throw DomainViolation("data_proxy_A: DtN matrices use different bases");
    const Eigen::VectorXd sv = weighted_singular_values(L1.L - L2.L, lambda);
    DataProxy dp;
    dp.d = sv.size() ? sv[0] : 0.0;
    if (dp.d == 0.0) throw IdenticalData("DtN maps coincide, A = 0");
    dp.A = std::max(dp.d * dp.d, std::pow(dp.d, 2.0 * delta));
    dp.minus_log_A = -std::log(dp.A);
    dp.log_ok = dp.minus_log_A >= 1.0;
    const Eigen::Index tail = std::max<Eigen::Index>(1, sv.size() / 10);
    dp.tail_ratio = sv.tail(tail).sum() / sv.sum();
    return dp;
}

} // namespace dotcgo
