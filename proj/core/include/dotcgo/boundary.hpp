#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "dotcgo/field.hpp"

namespace dotcgo {

// Nodes of the closed cube Omega split into interior and boundary sets.
// Both lists hold flat lattice indices in increasing order.
struct OmegaNodes {
    std::vector<std::size_t> interior;
    std::vector<std::size_t> boundary;
    std::vector<int> local; // lattice index -> position in its list, -1 if outside
    std::vector<char> on_face; // lattice index -> 1 for boundary nodes

    bool is_boundary(std::size_t idx) const { return on_face[idx] != 0; }
};
OmegaNodes omega_nodes(const Grid& g);

// Eigenpairs of the graph Laplacian (weights 1/h^2) on the cube surface
// nodes, ascending. Columns of phi are orthonormal under weight h^(n-1).
struct BoundaryBasis {
    Grid grid;
    std::vector<std::size_t> nodes;
    Eigen::VectorXd lambda;
    Eigen::MatrixXd phi;
    double weight = 0.0;
    std::string id;

    Eigen::Index size() const { return lambda.size(); }

    // c_i = <phi_i, g> under the boundary quadrature.
    Eigen::VectorXcd project(const Eigen::VectorXcd& nodal, Eigen::Index m) const;
    Eigen::VectorXcd synthesize(const Eigen::VectorXcd& c) const;
};

BoundaryBasis build_boundary_basis(const Grid& g);
std::string basis_id(const Grid& g);

// Cache is a JSON file plus a raw f64 block next to it.
void save_basis(const BoundaryBasis& b, const std::string& dir);
bool load_basis(const Grid& g, const std::string& dir, BoundaryBasis& out);
BoundaryBasis cached_basis(const Grid& g, const std::string& dir);

// Square DtN matrix in basis coordinates.
struct DtNMatrix {
    Eigen::MatrixXd L;
    double k = 0.0;
    int n = 0;
    int N = 0;
    std::string basis;

    Eigen::Index modes() const { return L.rows(); }
};

DtNMatrix leading_block(const DtNMatrix& L, Eigen::Index m);
void save_dtn(const DtNMatrix& L, const std::string& stem);
DtNMatrix load_dtn(const std::string& stem);

// (sum_i (1 + lambda_i)^s |c_i|^2)^(1/2)
double sobolev_boundary_norm(const Eigen::VectorXd& lambda, const Eigen::VectorXcd& c,
                             double s);

// Largest singular value of diag((1+l)^-1/4) L diag((1+l)^-1/4).
double operator_norm_star(const Eigen::MatrixXd& L, const Eigen::VectorXd& lambda);

struct DataProxy {
    double d = 0.0;
    double A = 0.0;
    double minus_log_A = 0.0;
    bool log_ok = false;     // -log A >= 1
    double tail_ratio = 0.0; // share of the last 10% singular values
};

DataProxy data_proxy_A(const DtNMatrix& L1, const DtNMatrix& L2,
                       const Eigen::VectorXd& lambda, double delta);

} // namespace dotcgo
