#pragma once

#include <random>

#include "monodromy/pipeline.hpp"

namespace testsys {

using mono::cplx;
using mono::CMat;

struct Sampler {
    std::mt19937_64 rng;
    std::uniform_real_distribution<double> u{-1.0, 1.0};

    explicit Sampler(unsigned long long seed) : rng(seed) {}

    double real() { return u(rng); }

    cplx disk() {
        while (true) {
            cplx z(u(rng), u(rng));
            if (std::abs(z) <= 1.0) return z;
        }
    }

    std::vector<cplx> poles(int n, double min_sep = 0.3) {
        while (true) {
            std::vector<cplx> lam;
            for (int i = 0; i < n; ++i) lam.push_back(disk());
            double ms = 1e300;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < i; ++j) ms = std::min(ms, std::abs(lam[i] - lam[j]));
            if (ms > min_sep) return lam;
        }
    }

    CMat matrix(int n, double amp = 1.0) {
        CMat a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = amp * disk();
        return a;
    }
};

inline double integer_distance(const CMat& a1) {
    Eigen::ComplexEigenSolver<CMat> es(a1);
    double d = 1e300;
    for (int i = 0; i < a1.rows(); ++i) {
        cplx v = es.eigenvalues()(i);
        d = std::min(d, std::abs(v - std::round(v.real())));
    }
    for (int i = 0; i < a1.rows(); ++i) d = std::min(d, std::abs(a1(i, i) - std::round(a1(i, i).real())));
    return d;
}

// generic system: poles in the unit disk, A1 entries in the unit disk, nothing near an integer
inline mono::RankOneSystem generic(Sampler& s, int n, double amp = 1.0) {
    while (true) {
        auto lam = s.poles(n);
        CMat a1 = s.matrix(n, amp);
        if (integer_distance(a1) > 0.02) return mono::validate_system(n, lam, a1);
    }
}

// lambda'_0 set to an exact value, the rest generic
inline mono::RankOneSystem with_pole_exponent(Sampler& s, int n, double lp, double amp = 0.6) {
    while (true) {
        auto lam = s.poles(n);
        CMat a1 = s.matrix(n, amp);
        a1(0, 0) = 0.5;
        if (integer_distance(a1) < 0.02) continue;
        a1(0, 0) = lp;
        Eigen::ComplexEigenSolver<CMat> es(a1);
        bool ok = true;
        for (int i = 0; i < n; ++i) {
            cplx v = es.eigenvalues()(i);
            if (std::abs(v - std::round(v.real())) < 0.02) ok = false;
        }
        if (ok) return mono::validate_system(n, lam, a1);
    }
}

inline double max_abs(const CMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testsys
