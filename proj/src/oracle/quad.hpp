#pragma once

#include <boost/multiprecision/complex128.hpp>

#include "monodromy/core.hpp"

namespace mono::oracle::quad {

using qreal = boost::multiprecision::float128;
using qcplx = boost::multiprecision::complex128;

struct QMat {
    int rows = 0, cols = 0;
    std::vector<qcplx> a;

    QMat() = default;
    QMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, qcplx(0)) {}
    qcplx& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const qcplx& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

inline qcplx to_q(cplx x) { return qcplx(qreal(x.real()), qreal(x.imag())); }
inline cplx to_d(const qcplx& x) { return {static_cast<double>(x.real()), static_cast<double>(x.imag())}; }
inline qreal qabs(const qcplx& x) { return boost::multiprecision::abs(x); }

inline QMat identity(int n) {
    QMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = qcplx(1);
    return m;
}

QMat to_q(const CMat& m);
CMat to_d(const QMat& m);
QMat mul(const QMat& x, const QMat& y);
QMat inverse(const QMat& m);
qreal max_abs(const QMat& m);

inline qreal q_pi() { return boost::multiprecision::acos(qreal(-1)); }
inline qcplx polar(const qreal& r, const qreal& t) {
    return qcplx(r * boost::multiprecision::cos(t), r * boost::multiprecision::sin(t));
}

struct QSystem {
    int n = 0;
    std::vector<qcplx> lambda;
    std::vector<qcplx> lambda_prime;
    QMat a1;
    double lambda_spread = 0.0;
};

QSystem to_q(const RankOneSystem& sys);

// e^{-shift z} Y along a straight segment, Taylor stepping of dY/dz = (A0 - shift + A1/z) Y
void transport_segment(const QSystem& s, const qcplx& shift, const qcplx& z0, const qcplx& z1, QMat& Y);
// along the ray arg z = theta between two radii
void transport_radial(const QSystem& s, const qcplx& shift, double theta, double r0, double r1, QMat& Y);
// along the circle |z| = r between two args, no net winding beyond the given args
void transport_arc(const QSystem& s, const qcplx& shift, double r, double t0, double t1, QMat& Y);

// F_0 = I, F_1, ..., F_K of the formal solution (I + sum F_k z^-k) z^Lambda' e^{A0 z}
std::vector<QMat> formal_coefficients(const QSystem& s, int K);

}  // namespace mono::oracle::quad
