#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "lgs/lll.hpp"
#include "lgs/samplers.hpp"

namespace lgs {

enum class SigmaPolicy { Default2SqrtPi, KleinLog, Explicit };

struct DecodeConfig {
    SigmaPolicy sigma_policy = SigmaPolicy::Default2SqrtPi;
    double sigma_explicit = 0.0;
    long moves = 50;
    int trials_k = 1;  // 1 = MHK, > 1 = MTMK
    bool use_lll = true;
    double eps = 0.01;
    uint64_t seed = 1;
    int shards = 1;

    void validate() const {
        if (moves < 1) throw std::invalid_argument("DecodeConfig: moves must be >= 1");
        if (trials_k < 1) throw std::invalid_argument("DecodeConfig: trials_k must be >= 1");
        if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("DecodeConfig: eps must lie in (0,1)");
        if (shards < 1) throw std::invalid_argument("DecodeConfig: shards must be >= 1");
        if (sigma_policy == SigmaPolicy::Explicit && !(sigma_explicit > 0.0))
            throw std::invalid_argument("DecodeConfig: explicit sigma must be > 0");
    }
};

struct DecodeResult {
    VectorXi x_cvp;
    double distance = 0.0;  // ||B x_cvp - c||
    long moves_used = 0;
    double acceptance_rate = 0.0;
    std::vector<long> improved_at;  // global move indices, strictly increasing
};

// sigma = min_i ||b-hat_i|| / (2 sqrt(pi)); keeps every theta factor in
// the complexity bound at theta3(>=2).
inline double sigma_default(const Basis& basis) {
    return basis.min_gs_norm() / (2.0 * std::sqrt(M_PI));
}

inline double resolve_sigma(const Basis& basis, const DecodeConfig& cfg) {
    switch (cfg.sigma_policy) {
        case SigmaPolicy::Default2SqrtPi:
            return sigma_default(basis);
        case SigmaPolicy::KleinLog:
            return klein_sigma_default(basis).klein_variant;
        case SigmaPolicy::Explicit:
            return cfg.sigma_explicit;
    }
    return sigma_default(basis);
}

struct CvpComplexity {
    double value = 0.0;      // ln(1/eps) * exp(d^2 / (2 sigma^2)); +inf on overflow
    double log_value = 0.0;  // ln of the bound, always finite
    bool finite = true;
};

// Number-of-moves bound for solving CVP at the given distance.
inline CvpComplexity cvp_complexity_estimate(const GaussianSpec& spec, double distance,
                                             double eps) {
    if (!(distance >= 0.0)) throw std::invalid_argument("cvp_complexity_estimate: distance < 0");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("cvp_complexity_estimate: eps must lie in (0,1)");
    const double expo = distance * distance / (2.0 * spec.sigma * spec.sigma);
    CvpComplexity out;
    out.log_value = std::log(std::log(1.0 / eps)) + expo;
    if (out.log_value > 700.0) {
        out.value = HUGE_VAL;
        out.finite = false;
    } else {
        out.value = std::log(1.0 / eps) * std::exp(expo);
    }
    return out;
}

// Correct decoding radius for t Markov moves: R = sigma sqrt(2 ln(kt/a)),
// a = ln(1/eps); natural logarithm throughout.
inline double bdd_radius(double sigma, double t, double eps, int k = 1) {
    if (!(sigma > 0.0)) throw std::invalid_argument("bdd_radius: sigma must be > 0");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("bdd_radius: eps must lie in (0,1)");
    if (k < 1) throw std::invalid_argument("bdd_radius: k must be >= 1");
    const double a = std::log(1.0 / eps);
    if (t <= a) throw std::domain_error("bdd_radius: radius undefined for t <= ln(1/eps)");
    return sigma * std::sqrt(2.0 * std::log(static_cast<double>(k) * t / a));
}

namespace detail {

struct ArgminTracker {
    VectorXi best_x;
    double best_dist;
    long base_index = 0;
    long accepted = 0;
    double sigma = 1.0;
    std::vector<long>* improved_at = nullptr;

    // Distance recovered from the cached log-density:
    // log_pi_unnorm = -d^2 / (2 sigma^2).
    void operator()(const ChainState& st, bool accepted_move) {
        if (accepted_move) {
            ++accepted;
            const double d = sigma * std::sqrt(std::max(0.0, -2.0 * st.log_pi_unnorm));
            if (d < best_dist - 1e-12) {
                best_dist = d;
                best_x = st.x;
                if (improved_at) improved_at->push_back(base_index + st.move_index);
            }
        }
    }
};

}  // namespace detail

// Argmin-tracking CVP decode: optional LLL preprocessing (the answer is
// mapped back through the unimodular transform), Babai initial state,
// then t Markov moves inspecting accepted states only. Shards split the
// move budget across independently seeded chains merged sequentially;
// output is a deterministic function of (seed, shard count).
inline DecodeResult decode_cvp(const Basis& basis, const VectorXd& c, const DecodeConfig& cfg) {
    cfg.validate();
    Basis work = basis;
    IntMatrix U;
    const bool mapped = cfg.use_lll;
    if (cfg.use_lll) {
        auto red = lll_reduce(basis);
        work = std::move(red.basis);
        U = std::move(red.U);
    }
    const double sigma = resolve_sigma(work, cfg);
    GaussianSpec spec = make_gaussian_spec(sigma, c);

    const LatticePoint x0 = babai_round(work, c);

    DecodeResult res;
    detail::ArgminTracker track;
    track.best_x = x0.x;
    track.best_dist = (x0.embedded - c).norm();
    track.sigma = sigma;
    track.improved_at = &res.improved_at;

    const MtmkSampler sampler = make_mtmk_sampler(work, spec, cfg.trials_k);
    long done = 0;
    for (int shard = 0; shard < cfg.shards; ++shard) {
        long quota = cfg.moves / cfg.shards + (shard < cfg.moves % cfg.shards ? 1 : 0);
        if (quota == 0) continue;
        Rng rng = Rng::derive(cfg.seed, {0x6465636full /*deco*/, static_cast<uint64_t>(shard)});
        track.base_index = done;
        run_chain(sampler, x0.x, quota, rng, track);
        done += quota;
    }
    res.moves_used = done;
    res.acceptance_rate = done > 0 ? static_cast<double>(track.accepted) / done : 0.0;
    if (mapped) {
        Eigen::Matrix<int64_t, Eigen::Dynamic, 1> back = U * track.best_x.cast<int64_t>();
        res.x_cvp = back.cast<int>();
    } else {
        res.x_cvp = track.best_x;
    }
    res.distance = (basis.B * res.x_cvp.cast<double>() - c).norm();
    return res;
}

struct BddCurveRow {
    double noise_norm = 0.0;
    double success_rate = 0.0;
    double r_predicted = 0.0;
};

// Empirical BDD success probability at each noise norm: plant a random
// lattice point, add noise of the exact norm in a uniform direction,
// decode, and count recoveries of the planted point.
inline std::vector<BddCurveRow> bdd_success_curve(const Basis& basis, const DecodeConfig& cfg,
                                                  const std::vector<double>& noise_norms,
                                                  long trials, Rng& rng) {
    const double sigma = cfg.use_lll ? resolve_sigma(lll_reduce(basis).basis, cfg)
                                     : resolve_sigma(basis, cfg);
    double r_pred = 0.0;
    bool r_defined = true;
    try {
        r_pred = bdd_radius(sigma, cfg.moves, cfg.eps, cfg.trials_k);
    } catch (const std::domain_error&) {
        r_defined = false;
    }
    std::vector<BddCurveRow> rows;
    const int n = basis.n;
    uint64_t instance = 0;
    for (double nn : noise_norms) {
        long ok = 0;
        for (long trial = 0; trial < trials; ++trial) {
            ++instance;
            VectorXi planted(n);
            for (int i = 0; i < n; ++i)
                planted(i) = static_cast<int>(rng.bits() % 9) - 4;
            VectorXd dir(n);
            for (int i = 0; i < n; ++i) dir(i) = rng.gauss();
            dir.normalize();
            VectorXd c = basis.B * planted.cast<double>() + nn * dir;
            DecodeConfig dc = cfg;
            dc.seed = cfg.seed ^ (0x9e3779b97f4a7c15ull * instance);
            DecodeResult dr = decode_cvp(basis, c, dc);
            if (dr.x_cvp == planted) ++ok;
        }
        rows.push_back(BddCurveRow{nn, static_cast<double>(ok) / static_cast<double>(trials),
                                   r_defined ? r_pred : std::nan("")});
    }
    return rows;
}

}  // namespace lgs
