#include "lgs/diagnostics.hpp"
#include "lgs/decoder.hpp"
#include "lgs/mimo.hpp"
#include "lgs/config.hpp"
#include <iostream>
int main() {
    using namespace lgs;
    Eigen::MatrixXd B(2,2);
    B << 2,1,0,1;
    Basis b = make_basis(B);
    GaussianSpec spec = make_gaussian_spec(0.8, (Eigen::VectorXd(2)<<0.5,0.5).finished());
    std::cout << "delta=" << delta_bound(b, spec) << "\n";
    auto space = exact_target(b, spec);
    std::cout << "states=" << space.states.size() << " cov=" << space.covered_mass << "\n";
    auto P = build_mhk_matrix(space);
    auto sc = spectral_radius_check(P, space);
    std::cout << "tau1=" << sc.tau1 << " pred=" << sc.predicted << "\n";
    std::cout << "theta3(2)=" << theta3(2.0) << "\n";
    return 0;
}
