#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "lgs/enumerate.hpp"
#include "lgs/lll.hpp"
#include "support.hpp"

using namespace lgs;
using Catch::Approx;

namespace {

MatrixXd mat2(double a, double b, double c, double d) {
    MatrixXd m(2, 2);
    m << a, b, c, d;
    return m;
}

VectorXd vec2(double a, double b) {
    VectorXd v(2);
    v << a, b;
    return v;
}

std::set<std::vector<int>> point_set(const std::vector<LatticePoint>& pts) {
    std::set<std::vector<int>> out;
    for (const auto& p : pts) out.insert({p.x.data(), p.x.data() + p.x.size()});
    return out;
}

}  // namespace

TEST_CASE("qr of identity and triangular bases", "[lattice_core]") {
    Basis id = make_basis(MatrixXd::Identity(2, 2));
    CHECK(id.Q.isApprox(MatrixXd::Identity(2, 2), 1e-12));
    CHECK(id.R.isApprox(MatrixXd::Identity(2, 2), 1e-12));

    Basis tri = make_basis(mat2(2, 1, 0, 1));
    CHECK(tri.R(0, 0) == Approx(2.0));
    CHECK(tri.R(1, 1) == Approx(1.0));
    CHECK(tri.Q.isApprox(MatrixXd::Identity(2, 2), 1e-12));
    CHECK(tri.gs_norms(0) == tri.R(0, 0));
}

TEST_CASE("qr reconstructs a random integer basis", "[lattice_core]") {
    Rng rng(42);
    for (int rep = 0; rep < 10; ++rep) {
        MatrixXd B = testsupport::random_int_matrix(rng, 4, 9);
        Basis b = make_basis(B);
        CHECK((b.B - b.Q * b.R).norm() / B.norm() <= 1e-9);
        CHECK((b.Q.transpose() * b.Q - MatrixXd::Identity(4, 4)).norm() <= 1e-9);
        for (int i = 0; i < 4; ++i) CHECK(b.R(i, i) > 0.0);
    }
}

TEST_CASE("qr rejects rank-deficient input", "[lattice_core]") {
    CHECK_THROWS_AS(make_basis(mat2(1, 2, 2, 4)), singular_basis_error);
}

TEST_CASE("lll leaves a reduced basis unchanged", "[lattice_core]") {
    Basis id = make_basis(MatrixXd::Identity(3, 3));
    auto res = lll_reduce(id);
    CHECK(res.basis.B.isApprox(id.B, 1e-12));
    CHECK(res.U.isApprox(IntMatrix::Identity(3, 3)));
}

TEST_CASE("lll improves a skewed basis", "[lattice_core]") {
    Basis bad = make_basis(mat2(1, 0, 0.99, 0.01));
    CHECK_FALSE(is_lll_reduced(bad));
    auto res = lll_reduce(bad);
    CHECK(is_lll_reduced(res.basis));
    CHECK(res.basis.min_gs_norm() > bad.min_gs_norm());
    CHECK(res.basis.max_gs_norm() <= bad.max_gs_norm() + 1e-12);
    CHECK(res.basis.B.isApprox(bad.B * res.U.cast<double>(), 1e-9));
}

TEST_CASE("lll output satisfies both conditions on random bases", "[lattice_core]") {
    Rng rng(7);
    for (int rep = 0; rep < 15; ++rep) {
        MatrixXd B = testsupport::random_int_matrix(rng, 6, 5);
        Basis basis = make_basis(B);
        auto res = lll_reduce(basis);
        // independently recomputed Gram-Schmidt conditions
        CHECK(testsupport::lll_conditions_oracle(res.basis.B, 0.75));
        CHECK(is_lll_reduced(res.basis));
        CHECK(res.basis.min_gs_norm() >= basis.min_gs_norm() - 1e-9);
        CHECK(res.basis.max_gs_norm() <= basis.max_gs_norm() + 1e-9);
        // |det U| = 1
        double det = res.U.cast<double>().determinant();
        CHECK(std::abs(std::abs(det) - 1.0) < 1e-6);
        CHECK(res.basis.B.isApprox(B * res.U.cast<double>(), 1e-9));
    }
}

TEST_CASE("lll rejects kappa outside [1/4, 1]", "[lattice_core]") {
    Basis id = make_basis(MatrixXd::Identity(2, 2));
    CHECK_THROWS_AS(lll_reduce(id, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(lll_reduce(id, 1.1), std::invalid_argument);
}

TEST_CASE("enumerate_ball on the unit ball of Z^2", "[lattice_core]") {
    Basis id = make_basis(MatrixXd::Identity(2, 2));
    auto pts = enumerate_ball(id, vec2(0, 0), 1.0);
    auto got = point_set(pts);
    std::set<std::vector<int>> want = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    CHECK(got == want);

    auto single = enumerate_ball(id, vec2(0.4, 0), 0.5);
    CHECK(point_set(single) == std::set<std::vector<int>>{{0, 0}});
}

TEST_CASE("enumerate_ball matches a grid-scan oracle", "[lattice_core]") {
    Rng rng(11);
    MatrixXd B = testsupport::random_int_matrix(rng, 3, 4);
    Basis basis = make_basis(B);
    VectorXd c(3);
    c << 0.3, -1.2, 0.7;
    double radius = 2.0 * basis.min_gs_norm();
    auto got = point_set(enumerate_ball(basis, c, radius));

    // independent scan over a box wide enough to contain the ball
    std::set<std::vector<int>> want;
    for (int a = -12; a <= 12; ++a)
        for (int b = -12; b <= 12; ++b)
            for (int d = -12; d <= 12; ++d) {
                VectorXd x(3);
                x << a, b, d;
                if ((B * x - c).norm() <= radius + 1e-9) want.insert({a, b, d});
            }
    CHECK(got == want);
}

TEST_CASE("enumerate_ball is invariant under unimodular change of basis", "[lattice_core]") {
    Rng rng(13);
    MatrixXd B = testsupport::random_int_matrix(rng, 3, 3);
    // elementary unimodular ops
    MatrixXd U = MatrixXd::Identity(3, 3);
    U(0, 1) = 2;
    U(2, 0) = -1;
    Basis b1 = make_basis(B);
    Basis b2 = make_basis(B * U);
    VectorXd c(3);
    c << 0.4, 0.1, -0.6;
    auto embed_set = [&](const std::vector<LatticePoint>& pts) {
        std::set<std::vector<long>> out;
        for (const auto& p : pts) {
            std::vector<long> key;
            for (int i = 0; i < 3; ++i) key.push_back(std::lround(p.embedded(i) * 1e6));
            out.insert(key);
        }
        return out;
    };
    CHECK(embed_set(enumerate_ball(b1, c, 3.0)) == embed_set(enumerate_ball(b2, c, 3.0)));
}

TEST_CASE("enumerate_ball enforces its node budget", "[lattice_core]") {
    Basis id = make_basis(MatrixXd::Identity(3, 3));
    CHECK_THROWS_AS(enumerate_ball(id, VectorXd::Zero(3), 50.0, 1000), capacity_error);
}

TEST_CASE("babai rounding basics", "[lattice_core]") {
    Basis id = make_basis(MatrixXd::Identity(2, 2));
    CHECK(babai_round(id, vec2(0.3, -0.4)).x == (VectorXi(2) << 0, 0).finished());
    CHECK(babai_round(id, vec2(1.7, 2.2)).x == (VectorXi(2) << 2, 2).finished());
}

TEST_CASE("cvp_bruteforce basics and tie-break", "[lattice_core]") {
    Basis id = make_basis(MatrixXd::Identity(2, 2));
    CHECK(cvp_bruteforce(id, vec2(0.3, -0.4)).x == (VectorXi(2) << 0, 0).finished());
    // exact tie against (1,0): lexicographically smallest wins
    CHECK(cvp_bruteforce(id, vec2(0.5, 0)).x == (VectorXi(2) << 0, 0).finished());
}

TEST_CASE("cvp_bruteforce matches exhaustive box scan", "[lattice_core]") {
    Rng rng(17);
    for (int rep = 0; rep < 5; ++rep) {
        MatrixXd B = testsupport::random_int_matrix(rng, 4, 3);
        Basis basis = make_basis(B);
        VectorXd c(4);
        for (int i = 0; i < 4; ++i) c(i) = 4.0 * (rng.uniform01() - 0.5);
        LatticePoint got = cvp_bruteforce(basis, c);

        double best = HUGE_VAL;
        VectorXi bx(4);
        for (int a = -10; a <= 10; ++a)
            for (int b = -10; b <= 10; ++b)
                for (int d = -10; d <= 10; ++d)
                    for (int e = -10; e <= 10; ++e) {
                        VectorXd x(4);
                        x << a, b, d, e;
                        double dist = (B * x - c).norm();
                        if (dist < best - 1e-12) {
                            best = dist;
                            bx << a, b, d, e;
                        }
                    }
        CHECK((got.embedded - c).norm() == Approx(best).margin(1e-9));
        CHECK(got.x == bx);

        // babai never beats the optimum
        CHECK((babai_round(basis, c).embedded - c).norm() >= best - 1e-12);
    }
}

TEST_CASE("basis text round-trip", "[lattice_core]") {
    Rng rng(23);
    MatrixXd B = testsupport::random_int_matrix(rng, 3, 6);
    std::stringstream ss;
    write_basis(ss, B);
    Basis back = read_basis(ss);
    CHECK(back.B.isApprox(B, 1e-15));
}
