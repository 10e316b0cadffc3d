#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lgs/samplers.hpp"

namespace lgs {

// Finite truncation of the chain's state space, states sorted by
// descending importance weight w(x) = pi(x)/q(x) (lexicographic
// tie-break for determinism). pi is normalized over the truncation; q
// keeps its exact values on Z^n.
struct TruncatedStateSpace {
    std::vector<VectorXi> states;
    VectorXd pi;
    VectorXd q;
    VectorXd logw;         // log pi_unnorm - log q, same order as states
    double covered_mass = 0.0;
    KleinSampler proposal;
};

inline TruncatedStateSpace exact_target(const Basis& basis, const GaussianSpec& spec,
                                        double mass = 1.0 - 1e-9) {
    KleinSampler ks = make_klein_sampler(basis, spec);
    double enum_mass = mass;
    for (int iter = 0;; ++iter) {
        auto en = detail::enumerate_gaussian_mass(basis, spec, enum_mass);
        const size_t m = en.points.size();
        std::vector<double> log_pi(m), log_q(m);
        for (size_t i = 0; i < m; ++i) {
            log_pi[i] = log_rho(en.points[i].embedded, spec);
            log_q[i] = proposal_logprob(ks, en.points[i].x);
        }
        // q must also be covered: grow the region until the proposal mass
        // inside reaches the target.
        const double q_mass = std::exp(logsumexp(log_q));
        if (q_mass < mass && iter < 40) {
            enum_mass = 1.0 - (1.0 - enum_mass) * 0.1;
            continue;
        }
        if (q_mass < mass) throw numerical_error("exact_target: q-mass coverage unreachable");

        TruncatedStateSpace sp;
        sp.proposal = std::move(ks);
        sp.covered_mass = std::min(en.coverage_lb, q_mass);
        std::vector<size_t> order(m);
        std::iota(order.begin(), order.end(), size_t{0});
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            const double wa = log_pi[a] - log_q[a], wb = log_pi[b] - log_q[b];
            if (wa != wb) return wa > wb;
            return detail::lex_less(en.points[a].x, en.points[b].x);
        });
        const double log_norm = logsumexp(log_pi);
        sp.states.resize(m);
        sp.pi.resize(m);
        sp.q.resize(m);
        sp.logw.resize(m);
        for (size_t i = 0; i < m; ++i) {
            const size_t s = order[i];
            sp.states[i] = en.points[s].x;
            sp.pi(i) = std::exp(log_pi[s] - log_norm);
            sp.q(i) = std::exp(log_q[s]);
            sp.logw(i) = log_pi[s] - log_q[s];
        }
        return sp;
    }
}

// Explicit MHK transition matrix over the truncation:
// P(x,y) = q(y) min{1, w(y)/w(x)} off the diagonal; the diagonal absorbs
// the rejection mass plus the < 1e-9 leakage of proposals landing outside
// the truncation, so P is exactly row-stochastic.
inline MatrixXd build_mhk_matrix(const TruncatedStateSpace& space) {
    const int m = static_cast<int>(space.states.size());
    MatrixXd P(m, m);
    for (int i = 0; i < m; ++i) {
        double off = 0.0;
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            const double a = std::exp(std::min(0.0, space.logw(j) - space.logw(i)));
            P(i, j) = space.q(j) * a;
            off += P(i, j);
        }
        P(i, i) = 1.0 - off;
    }
    return P;
}

// MTMK transition probabilities by brute-force summation over all k-trial
// tuples drawn from the truncation (small k, small state count only).
// Uses the reused-trial reference set, matching mtmk_step.
inline MatrixXd build_mtmk_matrix_bruteforce(const TruncatedStateSpace& space, int k) {
    const int m = static_cast<int>(space.states.size());
    if (k < 1 || k > 3) throw std::invalid_argument("build_mtmk_matrix_bruteforce: k in {1,2,3}");
    VectorXd w(m);
    for (int i = 0; i < m; ++i) w(i) = std::exp(space.logw(i));

    MatrixXd P = MatrixXd::Zero(m, m);
    std::vector<int> trial(k, 0);
    for (int i = 0; i < m; ++i) {
        // enumerate all tuples (y_1..y_k) in the truncation
        std::fill(trial.begin(), trial.end(), 0);
        while (true) {
            double q_tuple = 1.0, w_sum = 0.0;
            for (int j = 0; j < k; ++j) {
                q_tuple *= space.q(trial[j]);
                w_sum += w(trial[j]);
            }
            for (int c = 0; c < k; ++c) {
                const int y = trial[c];
                const double select = w(y) / w_sum;
                const double denom = w_sum - w(y) + w(i);  // reference set: x replaces y_c
                const double alpha = std::min(1.0, w_sum / denom);
                if (y != i) P(i, y) += q_tuple * select * alpha;
            }
            int pos = k - 1;
            while (pos >= 0 && ++trial[pos] == m) trial[pos--] = 0;
            if (pos < 0) break;
        }
        P(i, i) = 1.0 - P.row(i).sum();
    }
    return P;
}

inline double tv_distance(const VectorXd& p, const VectorXd& q) {
    if (p.size() != q.size()) throw std::invalid_argument("tv_distance: length mismatch");
    return 0.5 * (p - q).lpNorm<1>();
}

struct SpectralCheck {
    double tau1 = 0.0;       // second-largest eigenvalue magnitude of P
    double predicted = 0.0;  // 1 - q(x_1)/pi(x_1) at the top-weight state
};

namespace detail {

// Power iteration on P - e pi^T, which deflates the eigenvalue-1 pair
// and leaves the eigenvalues eta_j of the rejection spectrum.
inline double deflated_power_iteration(const MatrixXd& P, const VectorXd& pi,
                                       long max_iters = 10000, double tol = 1e-13) {
    const int m = static_cast<int>(P.rows());
    MatrixXd A = P - VectorXd::Ones(m) * pi.transpose();
    VectorXd v(m);
    uint64_t s = 0x1234abcdull;  // any fixed start direction not orthogonal to the dominant mode
    for (int i = 0; i < m; ++i)
        v(i) = static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53 - 0.5;
    v.normalize();
    double lambda = 0.0;
    for (long it = 0; it < max_iters; ++it) {
        VectorXd nv = A * v;
        const double norm = nv.norm();
        if (norm < 1e-14) return 0.0;  // spectrum collapsed: rank-one chain
        nv /= norm;
        const double next = std::abs(nv.dot(A * nv));
        if (std::abs(next - lambda) < tol * std::max(1.0, next)) return next;
        lambda = next;
        v = std::move(nv);
    }
    throw numerical_error("deflated_power_iteration: no convergence in iteration budget");
}

inline double dense_second_eigenvalue(const MatrixXd& P) {
    Eigen::EigenSolver<MatrixXd> es(P, /*computeEigenvectors=*/false);
    std::vector<double> mags(P.rows());
    for (Eigen::Index i = 0; i < P.rows(); ++i) mags[i] = std::abs(es.eigenvalues()(i));
    std::sort(mags.begin(), mags.end(), std::greater<>());
    return mags.size() > 1 ? mags[1] : 0.0;
}

}  // namespace detail

// Compares the numerically computed spectral radius against the
// closed-form prediction 1 - q(x_1)/pi(x_1). Dense eigensolve up to 200
// states, deflated power iteration beyond.
inline SpectralCheck spectral_radius_check(const MatrixXd& P, const TruncatedStateSpace& space) {
    SpectralCheck out;
    out.predicted = 1.0 - space.q(0) / space.pi(0);
    if (P.rows() <= 200) {
        out.tau1 = detail::dense_second_eigenvalue(P);
    } else {
        out.tau1 = detail::deflated_power_iteration(P, space.pi);
    }
    return out;
}

struct MixingTime {
    double exact = 0.0;  // ln(eps) / ln(1 - delta)
    double upper = 0.0;  // (-ln eps) / delta
};

inline MixingTime mixing_time_bound(double delta, double eps) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("mixing_time_bound: delta must lie in (0, 1)");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::domain_error("mixing_time_bound: eps must lie in (0, 1)");
    return MixingTime{std::log(eps) / std::log1p(-delta), -std::log(eps) / delta};
}

}  // namespace lgs
