#include "monodromy/pipeline.hpp"

namespace mono {

ConnectionMatrix connection_at(const RankOneSystem& sys, const std::vector<LocalBasis>& bases, double eta,
                               double tol) {
    DirectionFrame fr = frame(sys, eta);
    return connection_matrix(sys, fr, bases, tol);
}

std::map<int, CMat> stokes_factors(const RankOneSystem& sys, const std::vector<LocalBasis>& bases,
                                   const DirectionFrame& fr, int first, int last, double tol) {
    std::map<int, CMat> W;
    for (int nu = first; nu <= last; ++nu) {
        double eta = interval_midpoint(fr, nu);
        DirectionFrame f = frame(sys, eta);
        ConnectionMatrix C = connection_matrix(sys, f, bases, tol);
        W[nu] = stokes_factor(sys, C.c, f, nu);
    }
    return W;
}

CMat factor_product_inverse(const std::map<int, CMat>& W, int nu, int mu) {
    int n = static_cast<int>(W.begin()->second.rows());
    CMat P = CMat::Identity(n, n);
    for (int i = nu + mu; i >= nu + 1; --i) P = P * W.at(i);
    return P.inverse();
}

Analysis analyze(const RankOneSystem& sys, double eta, int order, double tol, bool with_factors) {
    Analysis a;
    a.sys = sys;
    a.fr = frame(sys, eta);
    a.bases = build_all_bases(sys, order);
    a.C = connection_matrix(sys, a.fr, a.bases, tol);
    a.data = assemble_monodromy(sys, a.fr, a.C);
    if (with_factors) {
        a.data.W = stokes_factors(sys, a.bases, a.fr, a.fr.nu + 1, a.fr.nu + a.fr.m, tol);
    }
    return a;
}

}  // namespace mono
