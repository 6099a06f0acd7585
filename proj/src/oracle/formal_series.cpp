#include "monodromy/oracle.hpp"

#include "quad.hpp"

namespace mono::oracle {

namespace quad {

std::vector<QMat> formal_coefficients(const QSystem& s, int K) {
    int n = s.n;
    std::vector<QMat> F;
    F.push_back(identity(n));
    for (int k = 0; k < K; ++k) {
        const QMat& P = F[k];
        QMat A1P = mul(s.a1, P);
        QMat N(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                N(i, j) = (P(i, j) * s.lambda_prime[j] - A1P(i, j) - qreal(k) * P(i, j)) / (s.lambda[i] - s.lambda[j]);
            }
        for (int i = 0; i < n; ++i) {
            qcplx d = 0;
            for (int l = 0; l < n; ++l)
                if (l != i) d -= s.a1(i, l) * N(l, i);
            N(i, i) = d / qreal(k + 1);
        }
        F.push_back(std::move(N));
    }
    return F;
}

}  // namespace quad

FormalSeries formal_series(const RankOneSystem& sys, int K) {
    if (K < 1) throw Error("oracle", "PreconditionViolation", "K must be at least 1");
    auto qs = quad::to_q(sys);
    auto F = quad::formal_coefficients(qs, K);
    FormalSeries out;
    out.K = K;
    for (auto& m : F) out.F.push_back(quad::to_d(m));
    quad::qreal a = quad::max_abs(F[K]), b = quad::max_abs(F[K - 1]);
    out.optimal_radius = (b > 0 && a > 0) ? static_cast<double>(a / b) : std::numeric_limits<double>::infinity();
    return out;
}

}  // namespace mono::oracle
