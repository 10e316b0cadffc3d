#pragma once

// Shared helpers for the test suites: chi-square goodness-of-fit,
// batch-means standard errors, and independent re-implementations used
// as oracles (kept free of the library's own code paths).

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "lgs/rng.hpp"

namespace testsupport {

// Regularized upper incomplete gamma Q(a, x), series + continued fraction.
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // lower series, then complement
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    // continued fraction (modified Lentz)
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

inline double chi_square_pvalue(double stat, int dof) {
    return gamma_q(0.5 * dof, 0.5 * stat);
}

// Pearson goodness-of-fit p-value; bins with expected count below 5 are
// pooled into the last bin.
inline double chi_square_test(const std::vector<long>& counts, const std::vector<double>& probs,
                              long total) {
    double pooled_exp = 0.0;
    long pooled_obs = 0;
    double stat = 0.0;
    int dof = -1;
    for (size_t i = 0; i < counts.size(); ++i) {
        const double e = probs[i] * static_cast<double>(total);
        if (e < 5.0) {
            pooled_exp += e;
            pooled_obs += counts[i];
            continue;
        }
        stat += (counts[i] - e) * (counts[i] - e) / e;
        ++dof;
    }
    if (pooled_exp >= 5.0) {
        stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
        ++dof;
    }
    if (dof < 1) throw std::invalid_argument("chi_square_test: too few usable bins");
    return chi_square_pvalue(stat, dof);
}

// Standard error of the mean of a correlated series, by batch means.
inline double batch_se(const std::vector<double>& xs, int batches = 50) {
    const long n = static_cast<long>(xs.size());
    const long per = n / batches;
    std::vector<double> means;
    for (int b = 0; b < batches; ++b) {
        double s = 0.0;
        for (long i = b * per; i < (b + 1) * per; ++i) s += xs[i];
        means.push_back(s / per);
    }
    double m = 0.0;
    for (double v : means) m += v;
    m /= means.size();
    double var = 0.0;
    for (double v : means) var += (v - m) * (v - m);
    var /= (means.size() - 1);
    return std::sqrt(var / means.size());
}

// Full-rank random integer matrix with entries uniform in [-amp, amp].
inline Eigen::MatrixXd random_int_matrix(lgs::Rng& rng, int n, int amp) {
    for (int attempt = 0; attempt < 256; ++attempt) {
        Eigen::MatrixXd B(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                B(i, j) = static_cast<double>(
                    static_cast<int>(rng.bits() % (2ull * amp + 1ull)) - amp);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
        if (lu.rank() == n) return B;
    }
    throw std::runtime_error("random_int_matrix: could not draw full-rank matrix");
}

// Independent Gram-Schmidt (classic projections), used to validate the
// library's QR-based quantities without sharing a code path with them.
struct GsOracle {
    Eigen::MatrixXd mu;     // mu(i, j) for j < i
    Eigen::VectorXd gs_sq;  // squared GS norms
};

inline GsOracle gram_schmidt_oracle(const Eigen::MatrixXd& B) {
    const int n = static_cast<int>(B.cols());
    Eigen::MatrixXd gs = B;
    GsOracle out;
    out.mu.setIdentity(n, n);
    out.gs_sq.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            out.mu(i, j) = B.col(i).dot(gs.col(j)) / gs.col(j).squaredNorm();
            gs.col(i) -= out.mu(i, j) * gs.col(j);
        }
        out.gs_sq(i) = gs.col(i).squaredNorm();
    }
    return out;
}

inline bool lll_conditions_oracle(const Eigen::MatrixXd& B, double kappa, double tol = 1e-9) {
    GsOracle gs = gram_schmidt_oracle(B);
    const int n = static_cast<int>(B.cols());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
            if (std::abs(gs.mu(i, j)) > 0.5 + tol) return false;
    for (int i = 0; i + 1 < n; ++i) {
        const double lhs = kappa * gs.gs_sq(i);
        const double rhs = gs.mu(i + 1, i) * gs.mu(i + 1, i) * gs.gs_sq(i) + gs.gs_sq(i + 1);
        if (lhs > rhs * (1.0 + tol) + tol) return false;
    }
    return true;
}

}  // namespace testsupport
