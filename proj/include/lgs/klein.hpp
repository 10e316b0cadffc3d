#pragma once

#include <cmath>
#include <utility>

#include "lgs/basis.hpp"
#include "lgs/discrete_gaussian.hpp"
#include "lgs/rng.hpp"

namespace lgs {

// Randomized nearest-plane sampler: one backward pass of per-coordinate
// discrete Gaussians with level deviations sigma_i = sigma / r_{i,i}.
struct KleinSampler {
    Basis basis;
    GaussianSpec spec;
    VectorXd c_prime;  // Q^T c
    VectorXd sigmas;   // sigma / r_{i,i}
};

inline KleinSampler make_klein_sampler(Basis basis, GaussianSpec spec) {
    KleinSampler ks;
    ks.c_prime = basis.Q.transpose() * spec.center;
    ks.sigmas = spec.sigma * basis.gs_norms.cwiseInverse();
    ks.basis = std::move(basis);
    ks.spec = std::move(spec);
    return ks;
}

// Draws x and accumulates log q(x) in the same backward pass; the MH
// acceptance ratio needs q for every proposal, so recomputing it would
// double the work.
inline std::pair<VectorXi, double> klein_sample(const KleinSampler& ks, Rng& rng) {
    const int n = ks.basis.n;
    const MatrixXd& R = ks.basis.R;
    VectorXi x(n);
    double log_q = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        double v = ks.c_prime(i);
        for (int j = i + 1; j < n; ++j) v -= R(i, j) * x(j);
        const double center = v / R(i, i);
        auto [xi, logp] = sample_z_logp(make_zgaussian(ks.sigmas(i), center), rng);
        x(i) = xi;
        log_q += logp;
    }
    return {std::move(x), log_q};
}

// log q(x) for an arbitrary integer vector, by the same backward recursion.
inline double proposal_logprob(const KleinSampler& ks, const VectorXi& x) {
    const int n = ks.basis.n;
    const MatrixXd& R = ks.basis.R;
    double log_q = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        double v = ks.c_prime(i);
        for (int j = i + 1; j < n; ++j) v -= R(i, j) * x(j);
        const double center = v / R(i, i);
        ZGaussian zg = make_zgaussian(ks.sigmas(i), center);
        log_q += log_pmf_z(x(i), zg);
    }
    return log_q;
}

struct SigmaChoices {
    double decoder_default;  // min ||b-hat_i|| / (2 sqrt(pi))
    double klein_variant;    // min ||b-hat_i|| / sqrt(2 ln n)
};

inline SigmaChoices klein_sigma_default(const Basis& basis) {
    if (basis.n < 2)
        throw std::domain_error("klein_sigma_default: klein variant needs n >= 2");
    const double m = basis.min_gs_norm();
    return SigmaChoices{m / (2.0 * std::sqrt(M_PI)),
                        m / std::sqrt(2.0 * std::log(static_cast<double>(basis.n)))};
}

}  // namespace lgs
