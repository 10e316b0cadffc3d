#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lgs/basis.hpp"
#include "lgs/rng.hpp"

namespace lgs {

// rho_{sigma,c}(z) = exp(-||z - c||^2 / (2 sigma^2))
inline double log_rho(const VectorXd& z, const GaussianSpec& spec) {
    return -(z - spec.center).squaredNorm() / (2.0 * spec.sigma * spec.sigma);
}

inline double rho(const VectorXd& z, const GaussianSpec& spec) {
    return std::exp(log_rho(z, spec));
}

// Jacobi theta function: theta3(tau) = sum_{n in Z} exp(-pi tau n^2).
// Partial sum, truncated once a term drops below 1e-18.
inline double theta3(double tau) {
    if (!(tau > 0.0)) throw std::domain_error("theta3: tau must be > 0");
    double s = 1.0;
    for (long n = 1;; ++n) {
        double term = std::exp(-M_PI * tau * static_cast<double>(n) * static_cast<double>(n));
        if (term < 1e-18) break;
        s += 2.0 * term;
    }
    return s;
}

// One-dimensional discrete Gaussian on Z with a finite support window.
// The window covers at least +-10 sigma and never fewer than +-10
// integers around round(center); the mass outside is < 1e-20.
struct ZGaussian {
    double sigma;
    double center;
    int window_center;      // round(center)
    int support_halfwidth;  // in integers
};

inline ZGaussian make_zgaussian(double sigma, double center) {
    if (!(sigma > 0.0)) throw std::invalid_argument("ZGaussian: sigma must be > 0");
    int hw = std::max(10, static_cast<int>(std::ceil(10.0 * sigma)) + 1);
    return ZGaussian{sigma, center, static_cast<int>(std::llround(center)), hw};
}

namespace detail {

// Fills w[j] with the log-weights of the window and returns
// log sum(exp(w)) via max subtraction; plain exp would underflow for
// small sigma.
inline double window_log_weights(const ZGaussian& zg, std::vector<double>& logw) {
    const int m = 2 * zg.support_halfwidth + 1;
    logw.resize(m);
    const double inv = 1.0 / (2.0 * zg.sigma * zg.sigma);
    double lmax = -HUGE_VAL;
    for (int j = 0; j < m; ++j) {
        double x = static_cast<double>(zg.window_center - zg.support_halfwidth + j);
        double d = x - zg.center;
        logw[j] = -d * d * inv;
        if (logw[j] > lmax) lmax = logw[j];
    }
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += std::exp(logw[j] - lmax);
    return lmax + std::log(s);
}

}  // namespace detail

inline double log_rho_sum_z(const ZGaussian& zg) {
    std::vector<double> logw;
    return detail::window_log_weights(zg, logw);
}

inline double rho_sum_z(const ZGaussian& zg) { return std::exp(log_rho_sum_z(zg)); }

inline double log_pmf_z(int x, const ZGaussian& zg) {
    double d = static_cast<double>(x) - zg.center;
    return -d * d / (2.0 * zg.sigma * zg.sigma) - log_rho_sum_z(zg);
}

inline double pmf_z(int x, const ZGaussian& zg) { return std::exp(log_pmf_z(x, zg)); }

// Exact inverse-CDF draw over the window, scanning outward from
// round(center) so the bulk of the mass is consumed first. Returns the
// sampled integer and its log-pmf.
inline std::pair<int, double> sample_z_logp(const ZGaussian& zg, Rng& rng) {
    std::vector<double> logw;
    const double logsum = detail::window_log_weights(zg, logw);
    const int m = 2 * zg.support_halfwidth + 1;
    const int mid = zg.support_halfwidth;
    const double u = rng.uniform01();
    double acc = 0.0;
    int idx = mid;
    for (int step = 0;; ++step) {
        int lo = mid - step, hi = mid + step;
        if (lo < 0 && hi >= m) break;  // u ~ 1; fall through to the last index seen
        if (hi < m) {
            acc += std::exp(logw[hi] - logsum);
            idx = hi;
            if (acc >= u) break;
        }
        if (step > 0 && lo >= 0) {
            acc += std::exp(logw[lo] - logsum);
            idx = lo;
            if (acc >= u) break;
        }
    }
    int x = zg.window_center - zg.support_halfwidth + idx;
    return {x, logw[idx] - logsum};
}

inline int sample_z(const ZGaussian& zg, Rng& rng) { return sample_z_logp(zg, rng).first; }

}  // namespace lgs
