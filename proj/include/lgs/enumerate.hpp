#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lgs/basis.hpp"
#include "lgs/errors.hpp"

namespace lgs {

constexpr long kEnumerationNodeCap = 10'000'000;  // test-oracle scale only

namespace detail {

inline bool lex_less(const VectorXi& a, const VectorXi& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a(i) != b(i)) return a(i) < b(i);
    }
    return false;
}

}  // namespace detail

// All x in Z^n with ||Bx - c|| <= radius, by depth-first enumeration over
// the triangular system R x ~ Q^T c. Complete up to a 1e-12 boundary
// slack so points at exactly the radius are kept.
inline std::vector<LatticePoint> enumerate_ball(const Basis& basis, const VectorXd& c,
                                                double radius,
                                                long node_cap = kEnumerationNodeCap) {
    if (!(radius >= 0.0)) throw std::invalid_argument("enumerate_ball: radius must be >= 0");
    const int n = basis.n;
    const MatrixXd& R = basis.R;
    const VectorXd cp = basis.Q.transpose() * c;
    const double bound_sq = radius * radius * (1.0 + 1e-12) + 1e-12;

    std::vector<LatticePoint> out;
    VectorXi x = VectorXi::Zero(n);
    std::vector<double> partial(n + 1, 0.0);  // partial[i]: cost of levels i..n-1
    long visited = 0;

    // Iterative DFS over levels n-1 .. 0; at each level x_i ranges over the
    // integer interval allowed by the remaining budget.
    struct Frame {
        int lo, hi, cur;
    };
    std::vector<Frame> stack(n);
    int level = n - 1;
    bool descend = true;
    while (level < n) {
        if (descend) {
            double rem = bound_sq - partial[level + 1];
            if (rem < 0.0) rem = 0.0;
            double center = cp(level);
            for (int j = level + 1; j < n; ++j) center -= R(level, j) * x(j);
            center /= R(level, level);
            double half = std::sqrt(rem) / R(level, level);
            int lo = static_cast<int>(std::ceil(center - half - 1e-12));
            int hi = static_cast<int>(std::floor(center + half + 1e-12));
            stack[level] = Frame{lo, hi, lo};
        }
        Frame& f = stack[level];
        if (f.cur > f.hi) {
            ++level;
            descend = false;
            continue;
        }
        if (++visited > node_cap)
            throw capacity_error("enumerate_ball: node budget exceeded");
        x(level) = f.cur++;
        double resid = cp(level);
        for (int j = level; j < n; ++j) resid -= R(level, j) * x(j);
        double cost = partial[level + 1] + resid * resid;
        if (cost <= bound_sq) {
            if (level == 0) {
                out.push_back(embed_point(basis, x));
            } else {
                partial[level] = cost;
                --level;
                descend = true;
                continue;
            }
        }
        descend = false;
    }
    return out;
}

// Nearest-plane rounding on the triangular factor (Babai).
inline LatticePoint babai_round(const Basis& basis, const VectorXd& c) {
    const int n = basis.n;
    const MatrixXd& R = basis.R;
    const VectorXd cp = basis.Q.transpose() * c;
    VectorXi x(n);
    for (int i = n - 1; i >= 0; --i) {
        double v = cp(i);
        for (int j = i + 1; j < n; ++j) v -= R(i, j) * x(j);
        x(i) = static_cast<int>(std::llround(v / R(i, i)));
    }
    return embed_point(basis, x);
}

// Exact CVP by bounded enumeration, radius seeded from the Babai distance.
// Ties at the minimum distance break to the lexicographically smallest x.
inline LatticePoint cvp_bruteforce(const Basis& basis, const VectorXd& c,
                                   long node_cap = kEnumerationNodeCap) {
    LatticePoint babai = babai_round(basis, c);
    const double d0 = (babai.embedded - c).norm();
    auto points = enumerate_ball(basis, c, d0, node_cap);
    const LatticePoint* best = &babai;
    double best_d = d0;
    for (const auto& p : points) {
        double d = (p.embedded - c).norm();
        if (d < best_d - 1e-12 ||
            (d <= best_d + 1e-12 && detail::lex_less(p.x, best->x))) {
            best = &p;
            best_d = d;
        }
    }
    return *best;
}

}  // namespace lgs
