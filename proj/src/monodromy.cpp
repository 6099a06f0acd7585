#include "monodromy/monodromy.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace mono {

namespace {

cplx e2pi(cplx x) { return std::exp(kTwoPi * kI * x); }

double angle_gap(double a, double b) {
    double d = std::fmod(a - b, kTwoPi);
    if (d < 0) d += kTwoPi;
    return std::min(d, kTwoPi - d);
}

}  // namespace

cplx alpha(cplx lp) {
    if (is_integer(lp)) return kTwoPi * kI;
    return e2pi(-lp) - 1.0;
}

cplx beta(cplx lp) { return -e2pi(lp) * alpha(lp); }

MonodromyMatrices monodromy_matrices(const CMat& C, const std::vector<cplx>& lp) {
    int n = static_cast<int>(C.rows());
    MonodromyMatrices out;
    for (int k = 0; k < n; ++k) {
        CMat M = CMat::Identity(n, n);
        CMat Mi = CMat::Identity(n, n);
        cplx a = alpha(lp[k]), b = beta(lp[k]);
        for (int j = 0; j < n; ++j) {
            M(k, j) += a * C(k, j);
            Mi(k, j) += b * C(k, j);
        }
        M(k, k) = e2pi(-lp[k]);
        Mi(k, k) = e2pi(lp[k]);
        out.M.push_back(M);
        out.M_inv.push_back(Mi);
    }
    return out;
}

std::vector<CMat> mstar_matrices(const CMat& C, const std::vector<cplx>& lp, const std::vector<cplx>& eigs) {
    for (auto mu : eigs) {
        double r = std::round(mu.real());
        if (r < 0 && std::abs(mu - r) < 1e-8) {
            std::ostringstream os;
            os << "A1 eigenvalue " << mu.real() << (mu.imag() >= 0 ? "+" : "") << mu.imag()
               << "i is a negative integer";
            throw Error("monodromy", "Unavailable", os.str());
        }
    }
    int n = static_cast<int>(C.rows());
    std::vector<CMat> out;
    for (int k = 0; k < n; ++k) {
        CMat M = CMat::Identity(n, n);
        cplx a = alpha(lp[k]);
        for (int j = 0; j < n; ++j) M(j, k) += a * C(j, k);
        M(k, k) = e2pi(-lp[k]);
        out.push_back(M);
    }
    return out;
}

CMat stokes_plus(const CMat& C, const std::vector<cplx>& lp, const DirectionFrame& fr) {
    int n = static_cast<int>(C.rows());
    CMat S = CMat::Identity(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            if (j != k && fr.precedes(j, k)) S(j, k) = e2pi(lp[k]) * alpha(lp[k]) * C(j, k);
    return S;
}

CMat stokes_minus_inv(const CMat& C, const std::vector<cplx>& lp, const DirectionFrame& fr) {
    int n = static_cast<int>(C.rows());
    CMat S = CMat::Identity(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            if (j != k && fr.precedes(k, j)) S(j, k) = -e2pi(lp[k] - lp[j]) * alpha(lp[k]) * C(j, k);
    return S;
}

CMat stokes_factor(const RankOneSystem& sys, const CMat& C_nu, const DirectionFrame& fr_nu, int nu) {
    if (fr_nu.nu != nu) {
        std::ostringstream os;
        os << "frame eta=" << fr_nu.eta << " lies in interval " << fr_nu.nu << ", not " << nu;
        throw Error("monodromy", "PreconditionViolation", os.str());
    }
    int n = sys.n;
    double eta_nu = fr_nu.critical(nu);
    CMat W = CMat::Identity(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (j == k) continue;
            if (angle_gap(std::arg(sys.lambda[j] - sys.lambda[k]), eta_nu) < 1e-12)
                W(j, k) = -alpha(sys.lambda_prime[k]) * C_nu(j, k);
        }
    return W;
}

TraceTable trace_invariants(const std::vector<CMat>& M, const std::vector<cplx>& lp, const CMat& Sp,
                            const CMat& Smi, const DirectionFrame& fr) {
    int n = static_cast<int>(M.size());
    TraceTable t;
    t.tr.resize(n);
    t.tr_closed.resize(n);
    t.tr_pair = CMat::Zero(n, n);
    t.tr_pair_closed = CMat::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        t.tr(k) = M[k].trace();
        t.tr_closed(k) = static_cast<double>(n - 1) + e2pi(-lp[k]);
        t.max_diff = std::max(t.max_diff, std::abs(t.tr(k) - t.tr_closed(k)));
    }
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (j == k) continue;
            t.tr_pair(j, k) = (M[j] * M[k]).trace();
            cplx base = static_cast<double>(n - 2) + e2pi(-lp[j]) + e2pi(-lp[k]);
            if (fr.precedes(j, k))
                t.tr_pair_closed(j, k) = base - e2pi(-lp[j]) * Sp(j, k) * Smi(k, j);
            else
                t.tr_pair_closed(j, k) = base - e2pi(-lp[k]) * Smi(j, k) * Sp(k, j);
            t.max_diff = std::max(t.max_diff, std::abs(t.tr_pair(j, k) - t.tr_pair_closed(j, k)));
        }
    return t;
}

CMat eta_shift(const CMat& C, const std::vector<cplx>& lp) {
    int n = static_cast<int>(C.rows());
    CMat out = C;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out(j, k) = e2pi(-lp[j]) * C(j, k) * e2pi(lp[k]);
    return out;
}

double spectrum_mismatch(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    int n = static_cast<int>(a.size());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
        best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

InfinityReport monodromy_at_infinity(const std::vector<CMat>& M, const DirectionFrame& fr, const CMat& a1) {
    int n = static_cast<int>(M.size());
    InfinityReport r;
    auto order = fr.dominance_order();
    r.M_inf = CMat::Identity(n, n);
    for (int i = 0; i < n; ++i) r.M_inf = M[order[i]] * r.M_inf;
    Eigen::ComplexEigenSolver<CMat> es(r.M_inf);
    Eigen::ComplexEigenSolver<CMat> ea(a1);
    for (int i = 0; i < n; ++i) {
        r.eigenvalues.push_back(es.eigenvalues()(i));
        cplx mu = ea.eigenvalues()(i);
        r.expected.push_back(e2pi(-mu));
        if (std::abs(mu - std::round(mu.real())) < 1e-8 && std::round(mu.real()) < 0) r.fundamental = false;
    }
    r.mismatch = spectrum_mismatch(r.eigenvalues, r.expected);
    return r;
}

MonodromyData assemble_monodromy(const RankOneSystem& sys, const DirectionFrame& fr, const ConnectionMatrix& C) {
    MonodromyData d;
    auto mm = monodromy_matrices(C.c, sys.lambda_prime);
    d.M = mm.M;
    d.M_inv = mm.M_inv;
    d.lambda_prime = sys.lambda_prime;
    for (auto lp : sys.lambda_prime) {
        d.alpha.push_back(alpha(lp));
        d.beta.push_back(beta(lp));
    }
    Eigen::ComplexEigenSolver<CMat> ea(sys.a1);
    std::vector<cplx> eigs(ea.eigenvalues().data(), ea.eigenvalues().data() + sys.n);
    try {
        d.M_star = mstar_matrices(C.c, sys.lambda_prime, eigs);
        d.has_M_star = true;
    } catch (const Error& e) {
        d.M_star_note = e.what();
    }
    d.S_plus = stokes_plus(C.c, sys.lambda_prime, fr);
    d.S_minus_inv = stokes_minus_inv(C.c, sys.lambda_prime, fr);
    d.traces = trace_invariants(d.M, sys.lambda_prime, d.S_plus, d.S_minus_inv, fr);
    d.infinity = monodromy_at_infinity(d.M, fr, sys.a1);
    d.zero_rows = C.zero_rows;
    d.zero_cols = C.zero_cols;
    d.integer_eigenvalue = C.integer_eigenvalue;
    return d;
}

}  // namespace mono
