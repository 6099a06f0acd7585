#include "quad.hpp"

#include <algorithm>

namespace mono::oracle::quad {

QMat to_q(const CMat& m) {
    QMat q(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < q.rows; ++i)
        for (int j = 0; j < q.cols; ++j) q(i, j) = to_q(m(i, j));
    return q;
}

CMat to_d(const QMat& m) {
    CMat d(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) d(i, j) = to_d(m(i, j));
    return d;
}

QMat mul(const QMat& x, const QMat& y) {
    QMat out(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int l = 0; l < x.cols; ++l) {
            qcplx v = x(i, l);
            if (v == qcplx(0)) continue;
            for (int j = 0; j < y.cols; ++j) out(i, j) += v * y(l, j);
        }
    return out;
}

QMat inverse(const QMat& m) {
    int n = m.rows;
    QMat a = m;
    QMat inv = identity(n);
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (qabs(a(r, c)) > qabs(a(p, c))) p = r;
        if (a(p, c) == qcplx(0)) throw Error("oracle", "SingularMatrix", "fundamental matrix is singular");
        if (p != c)
            for (int j = 0; j < n; ++j) {
                std::swap(a(p, j), a(c, j));
                std::swap(inv(p, j), inv(c, j));
            }
        qcplx piv = a(c, c);
        for (int j = 0; j < n; ++j) {
            a(c, j) /= piv;
            inv(c, j) /= piv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            qcplx f = a(r, c);
            if (f == qcplx(0)) continue;
            for (int j = 0; j < n; ++j) {
                a(r, j) -= f * a(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

qreal max_abs(const QMat& m) {
    qreal best = 0;
    for (auto& v : m.a) best = std::max(best, qabs(v));
    return best;
}

QSystem to_q(const RankOneSystem& sys) {
    QSystem s;
    s.n = sys.n;
    for (auto l : sys.lambda) s.lambda.push_back(to_q(l));
    for (auto l : sys.lambda_prime) s.lambda_prime.push_back(to_q(l));
    s.a1 = to_q(sys.a1);
    for (auto a : sys.lambda)
        for (auto b : sys.lambda) s.lambda_spread = std::max(s.lambda_spread, std::abs(a - b));
    return s;
}

namespace {

double max_lambda(const QSystem& s, const qcplx& shift) {
    double m = 0.0;
    for (auto& l : s.lambda) m = std::max(m, static_cast<double>(qabs(l - shift)));
    return m;
}

// one Taylor step of length h from z0; returns false when the terms did not decay
bool taylor_step(const QSystem& s, const qcplx& shift, const qcplx& z0, const qcplx& h, QMat& Y) {
    int n = s.n, c = Y.cols;
    std::vector<qcplx> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = s.lambda[i] - shift;
    QMat prev(n, c), cur = Y, sum = Y;
    qcplx hp = 1;
    qreal scale = max_abs(Y);
    if (scale == 0) return true;
    const qreal eps = qreal(1e-37);
    int small = 0;
    for (int m = 0; m < 400; ++m) {
        QMat next(n, c);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < c; ++j) {
                qcplx v = (z0 * diag[i] - qreal(m)) * cur(i, j) + diag[i] * prev(i, j);
                for (int l = 0; l < n; ++l) v += s.a1(i, l) * cur(l, j);
                next(i, j) = v / (z0 * qreal(m + 1));
            }
        hp *= h;
        qreal mag = 0;
        for (int i = 0; i < n * c; ++i) {
            qcplx t = next.a[i] * hp;
            sum.a[i] += t;
            mag = std::max(mag, qabs(t));
        }
        scale = std::max(scale, max_abs(sum));
        if (mag <= eps * scale) {
            if (++small >= 2) {
                Y = std::move(sum);
                return true;
            }
        } else {
            small = 0;
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    return false;
}

}  // namespace

void transport_segment(const QSystem& s, const qcplx& shift, const qcplx& z0, const qcplx& z1, QMat& Y) {
    double lam = std::max(max_lambda(s, shift), 1e-3);
    qcplx z = z0;
    int guard = 0;
    while (true) {
        qcplx rest = z1 - z;
        qreal remaining = qabs(rest);
        if (remaining == 0) break;
        if (++guard > 1000000) throw Error("oracle", "StepUnderflow", "transport in z did not terminate");
        double habs = std::min(0.3 * static_cast<double>(qabs(z)), 3.0 / lam);
        bool last = remaining <= habs;
        qcplx h = last ? rest : rest * qreal(habs) / remaining;
        QMat trial = Y;
        int tries = 0;
        while (!taylor_step(s, shift, z, h, trial)) {
            if (++tries > 20) throw Error("oracle", "StepUnderflow", "Taylor step in z did not converge");
            h /= qreal(2);
            last = false;
            trial = Y;
        }
        Y = std::move(trial);
        z = last ? z1 : z + h;
    }
}

void transport_radial(const QSystem& s, const qcplx& shift, double theta, double r0, double r1, QMat& Y) {
    if (r0 == r1) return;
    transport_segment(s, shift, polar(qreal(r0), qreal(theta)), polar(qreal(r1), qreal(theta)), Y);
}

void transport_arc(const QSystem& s, const qcplx& shift, double r, double t0, double t1, QMat& Y) {
    if (t0 == t1) return;
    int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(t1 - t0) / 0.3)));
    qreal tq0 = t0, dt = (qreal(t1) - qreal(t0)) / pieces;
    qcplx prev = polar(qreal(r), tq0);
    for (int i = 1; i <= pieces; ++i) {
        qcplx next = polar(qreal(r), tq0 + dt * i);
        transport_segment(s, shift, prev, next, Y);
        prev = next;
    }
}

}  // namespace mono::oracle::quad
