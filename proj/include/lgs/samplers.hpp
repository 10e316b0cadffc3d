#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "lgs/enumerate.hpp"
#include "lgs/klein.hpp"
#include "lgs/numeric.hpp"

namespace lgs {

// Markov-chain state. log_pi_unnorm = -||Bx - c||^2 / (2 sigma^2); the
// log importance weight is log_pi_unnorm - log_q up to the constant
// normalizer, and only differences of weights are ever used.
struct ChainState {
    VectorXi x;
    double log_q = 0.0;
    double log_pi_unnorm = 0.0;
    long move_index = 0;
};

struct MhkSampler {
    KleinSampler klein;
};

struct MtmkSampler {
    KleinSampler klein;
    int k = 1;  // trial count; k = 1 degenerates to MHK
};

// Sequential Gibbs over the exact one-dimensional conditionals of the
// target, scanning coordinates backward (i = n..1). One step = one full
// scan, comparable to one MHK/MTMK move.
struct GibbsSampler {
    Basis basis;
    GaussianSpec spec;
    VectorXd col_sq;  // ||b_i||^2 column norms (not GS norms)
};

inline MhkSampler make_mhk_sampler(Basis basis, GaussianSpec spec) {
    return MhkSampler{make_klein_sampler(std::move(basis), std::move(spec))};
}

inline MtmkSampler make_mtmk_sampler(Basis basis, GaussianSpec spec, int k) {
    if (k < 1) throw std::invalid_argument("MtmkSampler: k must be >= 1");
    return MtmkSampler{make_klein_sampler(std::move(basis), std::move(spec)), k};
}

inline GibbsSampler make_gibbs_sampler(Basis basis, GaussianSpec spec) {
    GibbsSampler g;
    g.col_sq = basis.B.colwise().squaredNorm();
    g.basis = std::move(basis);
    g.spec = std::move(spec);
    return g;
}

inline ChainState make_chain_state(const KleinSampler& ks, const VectorXi& x) {
    ChainState st;
    st.x = x;
    st.log_q = proposal_logprob(ks, x);
    st.log_pi_unnorm = log_rho(ks.basis.B * x.cast<double>(), ks.spec);
    return st;
}

inline ChainState make_chain_state(const MhkSampler& s, const VectorXi& x) {
    return make_chain_state(s.klein, x);
}

inline ChainState make_chain_state(const MtmkSampler& s, const VectorXi& x) {
    return make_chain_state(s.klein, x);
}

inline ChainState make_chain_state(const GibbsSampler& s, const VectorXi& x) {
    ChainState st;
    st.x = x;
    st.log_q = 0.0;  // no proposal density in Gibbs
    st.log_pi_unnorm = log_rho(s.basis.B * x.cast<double>(), s.spec);
    return st;
}

// One independent-MH move: propose via Klein, accept with probability
// min{1, w(y)/w(x)} computed in the log domain.
inline std::pair<ChainState, bool> mhk_step(const MhkSampler& s, const ChainState& state,
                                            Rng& rng) {
    auto [y, log_q_y] = klein_sample(s.klein, rng);
    const double log_pi_y = log_rho(s.klein.basis.B * y.cast<double>(), s.klein.spec);
    const double dlog = (log_pi_y - log_q_y) - (state.log_pi_unnorm - state.log_q);
    const double u = rng.uniform01();
    if (u <= std::exp(std::min(0.0, dlog))) {
        return {ChainState{std::move(y), log_q_y, log_pi_y, state.move_index + 1}, true};
    }
    ChainState st = state;
    st.move_index += 1;
    return {std::move(st), false};
}

// One multiple-try move: k i.i.d. Klein trials, candidate selected with
// probability proportional to its importance weight, accepted with
// min{1, sum_j w(y_j) / (w(x) + sum_{j != c} w(y_j))}. Reference samples
// are the reused trials (valid for independent proposals), so no extra
// draws happen. With k = 1 the selection draw is skipped and the move is
// exactly an MHK move.
inline std::pair<ChainState, bool> mtmk_step(const MtmkSampler& s, const ChainState& state,
                                             Rng& rng) {
    const int k = s.k;
    std::vector<VectorXi> ys(k);
    std::vector<double> log_q(k), log_pi(k), logw(k);
    for (int j = 0; j < k; ++j) {
        auto [y, lq] = klein_sample(s.klein, rng);
        log_q[j] = lq;
        log_pi[j] = log_rho(s.klein.basis.B * y.cast<double>(), s.klein.spec);
        logw[j] = log_pi[j] - log_q[j];
        ys[j] = std::move(y);
    }
    int c = 0;
    if (k > 1) {
        double m = *std::max_element(logw.begin(), logw.end());
        std::vector<double> w(k);
        for (int j = 0; j < k; ++j) w[j] = std::exp(logw[j] - m);
        c = rng.pick(w);
    }
    std::vector<double> num(logw);
    std::vector<double> den(logw);
    den[c] = state.log_pi_unnorm - state.log_q;
    const double dlog = logsumexp(num) - logsumexp(den);
    const double u = rng.uniform01();
    if (u <= std::exp(std::min(0.0, dlog))) {
        return {ChainState{std::move(ys[c]), log_q[c], log_pi[c], state.move_index + 1}, true};
    }
    ChainState st = state;
    st.move_index += 1;
    return {std::move(st), false};
}

// One full backward Gibbs scan. Coordinate i's conditional is the
// one-dimensional discrete Gaussian with deviation sigma/||b_i|| centered
// at b_i^T (c - sum_{j != i} x_j b_j) / ||b_i||^2 (complete the square in
// ||Bx - c||^2 as a quadratic in x_i).
inline std::pair<ChainState, bool> gibbs_step(const GibbsSampler& s, const ChainState& state,
                                              Rng& rng) {
    const int n = s.basis.n;
    const MatrixXd& B = s.basis.B;
    VectorXi x = state.x;
    VectorXd resid = s.spec.center - B * x.cast<double>();
    for (int i = n - 1; i >= 0; --i) {
        resid += B.col(i) * static_cast<double>(x(i));
        const double center = B.col(i).dot(resid) / s.col_sq(i);
        const double sigma_i = s.spec.sigma / std::sqrt(s.col_sq(i));
        x(i) = sample_z(make_zgaussian(sigma_i, center), rng);
        resid -= B.col(i) * static_cast<double>(x(i));
    }
    ChainState st;
    st.x = std::move(x);
    st.log_q = 0.0;
    st.log_pi_unnorm = -resid.squaredNorm() / (2.0 * s.spec.sigma * s.spec.sigma);
    st.move_index = state.move_index + 1;
    return {std::move(st), true};
}

// --- convergence-rate bounds -------------------------------------------

namespace detail {

// Upper bound on the rho-mass outside radius r around the center: lattice
// points within distance s of c number at most V_n (s + mu)^n / det(R)
// (disjoint Voronoi cells of volume det and circumradius <= mu fit inside
// the inflated ball); summation by parts turns the shell counts into
//   tail(r) <= N(r) e^{-r^2/2s^2} + int_r^inf N(s) (s/sigma^2) e^{-s^2/2s^2} ds,
// evaluated by Simpson's rule in the log domain.
inline double gaussian_tail_bound(const Basis& basis, double sigma, double r) {
    const int n = basis.n;
    const double mu = 0.5 * basis.gs_norms.norm();  // covering radius bound
    double log_det = 0.0;
    for (int i = 0; i < n; ++i) log_det += std::log(basis.gs_norms(i));
    const double log_vn =
        0.5 * n * std::log(M_PI) - std::lgamma(0.5 * n + 1.0);
    auto log_count = [&](double s) { return log_vn + n * std::log(s + mu) - log_det; };
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);

    double tail = std::exp(log_count(r) - r * r * inv2s2);
    const double h = sigma / 20.0;
    const double s_max = r + 15.0 * sigma;
    double integral = 0.0;
    for (double s = r; s < s_max; s += 2.0 * h) {
        auto f = [&](double t) {
            return std::exp(log_count(t) + std::log(t * 2.0 * inv2s2) - t * t * inv2s2);
        };
        integral += (h / 3.0) * (f(s) + 4.0 * f(s + h) + f(s + 2.0 * h));
    }
    return tail + integral;
}

struct MassEnumeration {
    std::vector<LatticePoint> points;
    double log_mass = 0.0;    // log sum of rho over the enumerated points
    double coverage_lb = 0.0; // lower bound on the fraction of total rho-mass captured
    double radius = 0.0;
};

// Enumerates lattice points until a provable fraction >= mass of the
// rho-mass is captured, growing the radius geometrically.
inline MassEnumeration enumerate_gaussian_mass(const Basis& basis, const GaussianSpec& spec,
                                               double mass) {
    if (!(mass > 0.0 && mass < 1.0))
        throw std::invalid_argument("enumerate_gaussian_mass: mass must lie in (0,1)");
    const double sigma = spec.sigma;
    LatticePoint nearest = babai_round(basis, spec.center);
    const double d0 = (nearest.embedded - spec.center).norm();
    double r = d0 + sigma * (std::sqrt(static_cast<double>(basis.n)) + 3.0);

    for (int iter = 0;; ++iter) {
        auto points = enumerate_ball(basis, spec.center, r);
        std::vector<double> logs(points.size());
        for (size_t i = 0; i < points.size(); ++i) logs[i] = log_rho(points[i].embedded, spec);
        const double log_mass = logsumexp(logs);
        const double tail = gaussian_tail_bound(basis, sigma, r);
        const double captured = std::exp(log_mass);
        const double coverage = captured / (captured + tail);
        if (coverage >= mass || iter >= 60) {
            if (coverage < mass)
                throw numerical_error("enumerate_gaussian_mass: coverage target unreachable");
            return MassEnumeration{std::move(points), log_mass, coverage, r};
        }
        r *= 1.25;
    }
}

}  // namespace detail

// Lower bound on the spectral gap of the independent MHK chain:
// delta = rho_{sigma,c}(Lambda) / prod_i rho_{sigma_i}(Z), the numerator
// enumerated to the requested mass coverage, the denominator summed with
// center 0 at sigma_i = sigma / r_{i,i}.
inline double delta_bound(const Basis& basis, const GaussianSpec& spec,
                          double mass_coverage = 1.0 - 1e-12) {
    auto en = detail::enumerate_gaussian_mass(basis, spec, mass_coverage);
    double log_den = 0.0;
    for (int i = 0; i < basis.n; ++i) {
        const double sigma_i = spec.sigma / basis.gs_norms(i);
        log_den += log_rho_sum_z(make_zgaussian(sigma_i, 0.0));
    }
    return std::exp(en.log_mass - log_den);
}

// MTMK convergence coefficient: delta_mtm = k / (k - 1 + 1/delta).
inline double delta_mtm(double delta, int k) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::domain_error("delta_mtm: delta must lie in (0, 1]");
    if (k < 1) throw std::domain_error("delta_mtm: k must be >= 1");
    return static_cast<double>(k) / (static_cast<double>(k) - 1.0 + 1.0 / delta);
}

// --- chain driver --------------------------------------------------------

inline std::pair<ChainState, bool> sampler_step(const MhkSampler& s, const ChainState& st,
                                                Rng& rng) {
    return mhk_step(s, st, rng);
}
inline std::pair<ChainState, bool> sampler_step(const MtmkSampler& s, const ChainState& st,
                                                Rng& rng) {
    return mtmk_step(s, st, rng);
}
inline std::pair<ChainState, bool> sampler_step(const GibbsSampler& s, const ChainState& st,
                                                Rng& rng) {
    return gibbs_step(s, st, rng);
}

// Applies `moves` Markov moves, invoking observer(state, accepted) after
// each one. Observers stream per-move data (argmin tracking, diagnostics)
// so long runs stay memory-bounded.
template <class Sampler, class Observer>
ChainState run_chain(const Sampler& s, const VectorXi& x0, long moves, Rng& rng,
                     Observer&& observer) {
    ChainState st = make_chain_state(s, x0);
    for (long t = 0; t < moves; ++t) {
        auto [next, accepted] = sampler_step(s, st, rng);
        st = std::move(next);
        observer(st, accepted);
    }
    return st;
}

template <class Sampler>
ChainState run_chain(const Sampler& s, const VectorXi& x0, long moves, Rng& rng) {
    return run_chain(s, x0, moves, rng, [](const ChainState&, bool) {});
}

}  // namespace lgs
