#include <future>
#include <sstream>

#include "sector_impl.hpp"

namespace mono::oracle {

StokesEstimate stokes_direct(const SectorSolution& a, const SectorSolution& b) {
    DirectionFrame fr = frame(a.impl().sys, a.eta());
    if (b.nu() != a.nu() + fr.mu) {
        std::ostringstream os;
        os << "second sector is " << b.nu() << ", expected " << a.nu() + fr.mu;
        throw Error("oracle", "PreconditionViolation", os.str());
    }
    int n = fr.eta_jk.rows();
    double theta = 0.5 * (a.arg_lo() + kPi + a.arg_hi());
    StokesEstimate est;
    est.nu = a.nu();
    est.S = CMat::Zero(n, n);
    const int points = 5;
    for (int i = 0; i < points; ++i) {
        ZPoint z{0.6 * std::pow(1.5, i), theta};
        quad::QMat S = quad::mul(quad::inverse(a.impl().eval_q(z)), b.impl().eval_q(z));
        est.samples.push_back(quad::to_d(S));
        est.S += est.samples.back();
    }
    est.S /= static_cast<double>(points);
    for (auto& s : est.samples) est.spread = std::max(est.spread, (s - est.S).cwiseAbs().maxCoeff());
    if (est.spread > 1e-4) {
        std::ostringstream os;
        os << "spread " << est.spread << " between overlap samples";
        throw Error("oracle", "OverlapConditioning", os.str());
    }
    return est;
}

StokesEstimate stokes_direct(const RankOneSystem& sys, double eta, double tol) {
    auto second = std::async(std::launch::async, [&] { return sector_solution(sys, eta - kPi, tol); });
    SectorSolution a = sector_solution(sys, eta, tol);
    return stokes_direct(a, second.get());
}

}  // namespace mono::oracle
