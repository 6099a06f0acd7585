#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "monodromy/oracle.hpp"
#include "systems.hpp"

using namespace mono;
using testsys::max_abs;
using testsys::Sampler;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

const double kLambdaPrimes[] = {-1.0, 0.0, 2.0, -3.0};

Verdict generic_cross_check() {
    Sampler s(20240601);
    double worst_p = 0, worst_m = 0, worst_t = 0;
    int count = 0;
    for (int t = 0; t < 20; ++t) {
        int n = 2 + t % 2;
        RankOneSystem sys = testsys::generic(s, n);
        double eta = default_eta(sys);
        auto t0 = Clock::now();
        Analysis a = analyze(sys, eta, 80, 1e-12, false);
        auto sp = oracle::stokes_direct(sys, eta);
        auto sm = oracle::stokes_direct(sys, eta - kPi);
        worst_t = std::max(worst_t, seconds_since(t0));
        worst_p = std::max(worst_p, max_abs(sp.S - a.data.S_plus));
        worst_m = std::max(worst_m, max_abs(sm.S.inverse() - a.data.S_minus_inv));
        ++count;
    }
    Verdict v;
    v.pass = count >= 20 && worst_p <= 1e-6 && worst_m <= 1e-6 && worst_t <= 10.0;
    v.detail = std::to_string(count) + " systems, " +
               fmt("max|S+ diff| %.2e, max|S-^-1 diff| %.2e, slowest %.2fs", worst_p, worst_m, worst_t);
    return v;
}

Verdict resonant_coverage() {
    Sampler s(777);
    double worst = 0, worst_tr = 0;
    for (int n : {2, 3})
        for (double lp : kLambdaPrimes) {
            RankOneSystem sys = testsys::with_pole_exponent(s, n, lp);
            double eta = default_eta(sys);
            Analysis a = analyze(sys, eta, 80, 1e-12, false);
            auto sp = oracle::stokes_direct(sys, eta);
            auto sm = oracle::stokes_direct(sys, eta - kPi);
            worst = std::max({worst, max_abs(sp.S - a.data.S_plus), max_abs(sm.S.inverse() - a.data.S_minus_inv)});
            worst_tr = std::max(worst_tr, a.data.traces.max_diff);
        }
    return {worst <= 1e-5 && worst_tr <= 1e-8, fmt("8 systems, oracle diff %.2e, trace identities %.2e", worst, worst_tr)};
}

Verdict diagonal_identity() {
    double worst = 0;
    std::vector<std::vector<double>> exps = {{0.3, -0.7}, {0.3, -0.7, 0.45}, {2.0, -0.25, -1.0}, {0.0, -3.0, 0.6}};
    std::vector<cplx> lam3 = {0.0, 1.0, cplx(0.3, 0.8)};
    for (auto& e : exps) {
        int n = int(e.size());
        CMat a1 = CMat::Zero(n, n);
        for (int i = 0; i < n; ++i) a1(i, i) = e[i];
        std::vector<cplx> lam(lam3.begin(), lam3.begin() + n);
        RankOneSystem sys = validate_system(n, lam, a1);
        Analysis a = analyze(sys, default_eta(sys), 80, 1e-12, false);
        CMat pattern = CMat::Zero(n, n);
        for (int i = 0; i < n; ++i) pattern(i, i) = is_integer(e[i]) ? 0.0 : 1.0;
        worst = std::max(worst, max_abs(a.C.c - pattern));
        worst = std::max(worst, max_abs(a.data.S_plus - CMat::Identity(n, n)));
        worst = std::max(worst, max_abs(a.data.S_minus_inv - CMat::Identity(n, n)));
        for (auto& M : a.data.M) {
            CMat off = M;
            off.diagonal().setZero();
            worst = std::max(worst, max_abs(off));
        }
    }
    return {worst <= 1e-10, fmt("4 systems, max deviation %.2e", worst)};
}

double det_c(const RankOneSystem& sys) {
    Analysis a = analyze(sys, default_eta(sys), 80, 1e-12, false);
    return std::abs(a.C.c.determinant());
}

Verdict invertibility() {
    Sampler s(4242);
    double worst_sing = 0, worst_reg = 1e300;
    for (int n : {2, 3})
        for (double ev : {1.0, -2.0}) {
            auto lam = s.poles(n);
            CMat P = CMat::Identity(n, n) + 0.4 * s.matrix(n);
            CMat D = CMat::Zero(n, n);
            D(0, 0) = ev;
            for (int i = 1; i < n; ++i) D(i, i) = cplx(0.35 * i, 0.2);
            CMat Pinv = P.inverse();
            CMat a1 = P * D * Pinv;
            CMat a1p = P * (D + 0.1 * CMat::Identity(n, n).col(0) * CMat::Identity(n, n).row(0)) * Pinv;
            worst_sing = std::max(worst_sing, det_c(validate_system(n, lam, a1)));
            worst_reg = std::min(worst_reg, det_c(validate_system(n, lam, a1p)));
        }
    return {worst_sing < 1e-8 && worst_reg > 1e-6,
            fmt("max |det C| with integer eigenvalue %.2e, min after perturbation %.2e", worst_sing, worst_reg)};
}

Verdict skew_family() {
    Sampler s(5151);
    double worst_a = 0, worst_b = 0;
    for (int t = 0; t < 5; ++t) {
        auto lam = s.poles(3);
        CMat V = CMat::Zero(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < i; ++j) {
                V(i, j) = s.real();
                V(j, i) = -V(i, j);
            }
        for (double nu : {0.3, 0.5}) {
            CMat a1 = V - (0.5 + nu) * CMat::Identity(3, 3);
            RankOneSystem sys = validate_system(3, lam, a1);
            Analysis a = analyze(sys, default_eta(sys), 80, 1e-12, false);
            cplx al = alpha(sys.lambda_prime[0]);
            CMat lhs = std::exp(kTwoPi * kI * nu) * a.data.S_plus + a.data.S_plus.transpose() + al * a.C.c;
            worst_a = std::max(worst_a, lhs.norm());
            worst_b = std::max(worst_b, (a.data.S_minus_inv - a.data.S_plus.transpose()).norm());
        }
    }
    return {worst_a <= 1e-8 && worst_b <= 1e-8,
            fmt("10 systems, |e^{2pi i nu}S+ + S+^T + alpha C| %.2e, |S-^-1 - S+^T| %.2e", worst_a, worst_b)};
}

Verdict eta_stability() {
    Sampler s(606);
    double worst_in = 0, worst_shift = 0;
    std::vector<RankOneSystem> systems = {testsys::generic(s, 2), testsys::generic(s, 3), testsys::generic(s, 3),
                                          testsys::with_pole_exponent(s, 3, -1.0)};
    for (auto& sys : systems) {
        auto bases = build_all_bases(sys, 80);
        DirectionFrame sk = critical_directions(sys);
        double eta = default_eta(sys);
        int idx = critical_index(sk, eta);
        double hi = sk.critical(idx), lo = sk.critical(idx + 1);
        double w = hi - lo;
        ConnectionMatrix c1 = connection_at(sys, bases, lo + 0.2 * w);
        ConnectionMatrix c2 = connection_at(sys, bases, lo + 0.8 * w);
        worst_in = std::max(worst_in, max_abs(c1.c - c2.c));
        ConnectionMatrix c0 = connection_at(sys, bases, eta);
        ConnectionMatrix cs = connection_at(sys, bases, eta - kTwoPi);
        CMat L = CMat::Zero(sys.n, sys.n);
        for (int i = 0; i < sys.n; ++i) L(i, i) = std::exp(kTwoPi * kI * sys.lambda_prime[i]);
        CMat expected = L.inverse() * c0.c * L;
        worst_shift = std::max(worst_shift, max_abs(cs.c - expected));
    }
    return {worst_in <= 1e-8 && worst_shift <= 1e-8,
            fmt("4 systems, within interval %.2e, 2pi shift %.2e", worst_in, worst_shift)};
}

Verdict factorization() {
    Sampler s(7070);
    double worst = 0;
    int used = 0;
    while (used < 4) {
        RankOneSystem sys = testsys::generic(s, 3);
        if (critical_directions(sys).m != 6) continue;
        Analysis a = analyze(sys, default_eta(sys), 80, 1e-12, true);
        CMat P = factor_product_inverse(a.data.W, a.fr.nu, a.fr.mu);
        worst = std::max(worst, max_abs(P - a.data.S_plus));
        ++used;
    }
    return {worst <= 1e-8, fmt("4 systems with m=6, max deviation %.2e", worst)};
}

RankOneSystem tagged_system(Sampler& s, int n, int tag_index) {
    if (tag_index == 0) return testsys::generic(s, n);
    const double lp[] = {0.0, -1.0, 2.0, -3.0};
    return testsys::with_pole_exponent(s, n, lp[tag_index]);
}

Verdict laplace_consistency() {
    Sampler s(8080);
    double worst = 0;
    std::string tags;
    for (int tag = 0; tag < 4; ++tag)
        for (int n : {2, 3}) {
            RankOneSystem sys = tagged_system(s, n, tag);
            double eta = default_eta(sys);
            auto bases = build_all_bases(sys, 80);
            if (n == 2) tags += (tags.empty() ? "" : ",") + to_string(bases[0].tag);
            auto Y = oracle::sector_solution(sys, eta);
            const double rs[] = {5.0, 12.0, 20.0};
            const double dth[] = {-0.4, 0.0, 0.4};
            for (int k = 0; k < n; ++k)
                for (int p = 0; p < 3; ++p) {
                    oracle::ZPoint z{rs[p], kPi - eta + dth[p]};
                    CVec col = Y.column(k, z);
                    CVec lap = oracle::laplace_column(sys, eta, bases, k, z);
                    worst = std::max(worst, (lap - col).cwiseAbs().maxCoeff() / col.cwiseAbs().maxCoeff());
                }
        }
    return {worst <= 1e-6, "tags " + tags + fmt(", max relative difference %.2e", worst)};
}

Verdict monodromy_relations() {
    Sampler s(9090);
    double worst_t = 0, worst_spec = 0;
    for (int n : {2, 3, 3}) {
        RankOneSystem sys = testsys::generic(s, n);
        double eta = default_eta(sys);
        Analysis a = analyze(sys, eta, 80, 1e-12, false);
        auto Y = oracle::sector_solution(sys, eta);
        CMat L = CMat::Zero(n, n);
        for (int i = 0; i < n; ++i) L(i, i) = std::exp(kTwoPi * kI * sys.lambda_prime[i]);
        CMat right = L * a.data.S_minus_inv * a.data.S_plus.inverse();
        double mid = 0.5 * (Y.arg_lo() + Y.arg_hi());
        for (double r : {1.5, 3.0})
            for (double d : {-0.3, 0.3}) {
                oracle::ZPoint z{r, mid + d};
                CMat lhs = Y.eval({r, mid + d + kTwoPi});
                CMat rhs = Y.eval(z) * right;
                worst_t = std::max(worst_t, max_abs(lhs - rhs) / max_abs(rhs));
            }
        Eigen::ComplexEigenSolver<CMat> es(sys.a1);
        std::vector<cplx> expected, got;
        for (int i = 0; i < n; ++i) expected.push_back(std::exp(-kTwoPi * kI * es.eigenvalues()(i)));
        Eigen::ComplexEigenSolver<CMat> ms(a.data.infinity.M_inf);
        for (int i = 0; i < n; ++i) got.push_back(ms.eigenvalues()(i));
        worst_spec = std::max(worst_spec, spectrum_mismatch(got, expected));
    }
    return {worst_t <= 1e-6 && worst_spec <= 1e-6,
            fmt("3 systems, loop relation %.2e, spectrum at infinity %.2e", worst_t, worst_spec)};
}

// continue Psi_k into the disk of lambda_j, run once around lambda_j, compare
struct LoopResult {
    double defect;
    double jump;
};

LoopResult loop_defect(const RankOneSystem& sys, const DirectionFrame& fr, const std::vector<LocalBasis>& bases,
                       const ConnectionMatrix& C, int k, int j) {
    ContinuationPath path = plan_path(sys, fr, k, j);
    const BranchPoint& s0 = path.waypoints.front();
    Continued at = continue_vector(sys, s0, eval_psi_k(bases[k], s0), path, 1e-13);
    cplx c = sys.lambda[j];
    cplx d = at.end.value - c;
    std::vector<cplx> loop;
    for (int i = 1; i <= 24; ++i) loop.push_back(c + d * std::exp(kTwoPi * kI * (i / 24.0)));
    Continued around = transport(sys, at.end, at.value, loop, 1e-13);
    CVec expected = at.value.col(0) + alpha(sys.lambda_prime[j]) * C.c(j, k) * eval_psi_k(bases[j], at.end);
    double scale = std::max(at.value.col(0).norm(), expected.norm());
    return {(around.value.col(0) - expected).norm() / scale, (around.value.col(0) - at.value.col(0)).norm() / scale};
}

Verdict loop_monodromy() {
    Sampler s(1010);
    double worst = 0, smallest_jump = 1e300;
    for (int tag = 0; tag < 4; ++tag)
        for (int n : {2, 3}) {
            RankOneSystem sys = tagged_system(s, n, tag);
            double eta = default_eta(sys);
            auto bases = build_all_bases(sys, 80);
            DirectionFrame fr = frame(sys, eta);
            ConnectionMatrix C = connection_matrix(sys, fr, bases);
            for (int k = 1; k < n; ++k) {
                LoopResult r = loop_defect(sys, fr, bases, C, k, 0);
                worst = std::max(worst, r.defect);
                smallest_jump = std::min(smallest_jump, r.jump);
            }
        }
    return {worst <= 1e-6, fmt("all four tags at the encircled pole, max relative defect %.2e, smallest jump %.2e",
                               worst, smallest_jump)};
}

}  // namespace

int main() {
    std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"generic Stokes cross-check", generic_cross_check},
        {"resonant exponents", resonant_coverage},
        {"diagonal A1", diagonal_identity},
        {"integer eigenvalue and det C", invertibility},
        {"skew-symmetric family", skew_family},
        {"eta stability and 2pi shift", eta_stability},
        {"Stokes factor product", factorization},
        {"Laplace integral vs sector solution", laplace_consistency},
        {"monodromy relations", monodromy_relations},
        {"loop monodromy of Psi", loop_monodromy},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        auto t0 = Clock::now();
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %zu %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    v.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
        if (!v.pass) ++failed;
    }
    return failed ? 1 : 0;
}
