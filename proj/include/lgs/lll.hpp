#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "lgs/basis.hpp"

namespace lgs {

using IntMatrix = Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct LllResult {
    Basis basis;    // reduced basis B' = B * U
    IntMatrix U;    // unimodular transform, |det U| = 1
};

namespace detail {

// Gram-Schmidt coefficients mu and squared GS norms of the columns of B.
inline void gram_schmidt(const MatrixXd& B, MatrixXd& mu, VectorXd& gs_sq) {
    const int n = static_cast<int>(B.cols());
    MatrixXd gs = B;
    mu.setIdentity(n, n);
    gs_sq.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            mu(i, j) = B.col(i).dot(gs.col(j)) / gs_sq(j);
            gs.col(i) -= mu(i, j) * gs.col(j);
        }
        gs_sq(i) = gs.col(i).squaredNorm();
    }
}

}  // namespace detail

// Textbook LLL with the two classic conditions: |mu_{i,j}| <= 1/2 and
// kappa*||b-hat_i||^2 <= ||mu_{i+1,i} b-hat_i + b-hat_{i+1}||^2.
// Column operations are mirrored on an integer matrix U so that the
// reduced basis is exactly B*U.
inline LllResult lll_reduce(const Basis& basis, double kappa = 0.75) {
    if (!(kappa >= 0.25 && kappa <= 1.0))
        throw std::invalid_argument("lll_reduce: kappa must lie in [1/4, 1]");
    const int n = basis.n;
    MatrixXd B = basis.B;
    IntMatrix U = IntMatrix::Identity(n, n);
    MatrixXd mu;
    VectorXd gs_sq;
    detail::gram_schmidt(B, mu, gs_sq);

    int k = 1;
    while (k < n) {
        for (int j = k - 1; j >= 0; --j) {
            double q = std::round(mu(k, j));
            if (q != 0.0) {
                B.col(k) -= q * B.col(j);
                U.col(k) -= static_cast<int64_t>(q) * U.col(j);
                for (int l = 0; l <= j; ++l) mu(k, l) -= q * mu(j, l);
            }
        }
        if (gs_sq(k) >= (kappa - mu(k, k - 1) * mu(k, k - 1)) * gs_sq(k - 1)) {
            ++k;
        } else {
            B.col(k).swap(B.col(k - 1));
            U.col(k).swap(U.col(k - 1));
            detail::gram_schmidt(B, mu, gs_sq);
            k = std::max(k - 1, 1);
        }
    }
    return LllResult{make_basis(B), std::move(U)};
}

inline bool is_lll_reduced(const Basis& basis, double kappa = 0.75, double tol = 1e-9) {
    const MatrixXd& R = basis.R;
    const int n = basis.n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            // mu_{i,j} = r_{j,i} / r_{j,j}
            if (std::abs(R(j, i) / R(j, j)) > 0.5 + tol) return false;
        }
    }
    for (int i = 0; i + 1 < n; ++i) {
        double lhs = kappa * R(i, i) * R(i, i);
        double rhs = R(i, i + 1) * R(i, i + 1) + R(i + 1, i + 1) * R(i + 1, i + 1);
        if (lhs > rhs * (1.0 + tol) + tol) return false;
    }
    return true;
}

}  // namespace lgs
