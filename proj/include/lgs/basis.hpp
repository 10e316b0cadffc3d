#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "lgs/errors.hpp"

namespace lgs {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;

// Full-rank lattice basis with cached QR factors. The sign convention
// r_{i,i} > 0 is enforced by flipping columns of Q, so gs_norms[i] is
// exactly R(i,i) = ||b-hat_i||.
struct Basis {
    MatrixXd B;
    MatrixXd Q;
    MatrixXd R;
    VectorXd gs_norms;
    int n = 0;

    double min_gs_norm() const { return gs_norms.minCoeff(); }
    double max_gs_norm() const { return gs_norms.maxCoeff(); }
};

inline std::pair<MatrixXd, MatrixXd> qr_decompose(const MatrixXd& B) {
    if (B.rows() != B.cols()) throw singular_basis_error("qr_decompose: matrix not square");
    const int n = static_cast<int>(B.rows());
    Eigen::HouseholderQR<MatrixXd> qr(B);
    MatrixXd Q = qr.householderQ() * MatrixXd::Identity(n, n);
    MatrixXd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        if (R(i, i) < 0.0) {
            R.row(i) = -R.row(i);
            Q.col(i) = -Q.col(i);
        }
    }
    const double scale = B.norm();
    for (int i = 0; i < n; ++i) {
        if (R(i, i) <= 1e-12 * scale)
            throw singular_basis_error("qr_decompose: rank-deficient basis (R diagonal ~ 0)");
    }
    return {std::move(Q), std::move(R)};
}

inline Basis make_basis(const MatrixXd& B) {
    Basis b;
    b.B = B;
    auto [Q, R] = qr_decompose(B);
    b.Q = std::move(Q);
    b.R = std::move(R);
    b.n = static_cast<int>(B.rows());
    b.gs_norms = b.R.diagonal();
    return b;
}

// Target lattice Gaussian parameters: density proportional to
// exp(-||Bx - center||^2 / (2 sigma^2)).
struct GaussianSpec {
    double sigma = 1.0;
    VectorXd center;
};

inline GaussianSpec make_gaussian_spec(double sigma, VectorXd center) {
    if (!(sigma > 0.0)) throw std::invalid_argument("GaussianSpec: sigma must be > 0");
    return GaussianSpec{sigma, std::move(center)};
}

struct LatticePoint {
    VectorXi x;
    VectorXd embedded;  // B * x
};

inline LatticePoint embed_point(const Basis& basis, const VectorXi& x) {
    return LatticePoint{x, basis.B * x.cast<double>()};
}

// Plain-text basis format: first line "n", then n rows of n decimals.
inline Basis read_basis(std::istream& in) {
    int n = 0;
    if (!(in >> n) || n <= 0) throw std::invalid_argument("basis file: bad dimension line");
    MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!(in >> B(i, j))) throw std::invalid_argument("basis file: truncated matrix data");
    return make_basis(B);
}

inline Basis read_basis_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("basis file: cannot open " + path);
    return read_basis(in);
}

inline void write_basis(std::ostream& out, const MatrixXd& B) {
    out << B.rows() << "\n";
    for (Eigen::Index i = 0; i < B.rows(); ++i) {
        for (Eigen::Index j = 0; j < B.cols(); ++j) {
            if (j) out << " ";
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", B(i, j));
            out << buf;
        }
        out << "\n";
    }
}

}  // namespace lgs
