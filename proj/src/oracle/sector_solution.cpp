#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "sector_impl.hpp"

namespace mono::oracle {

using quad::QMat;
using quad::qcplx;
using quad::qreal;

namespace {

constexpr double kRoundoff = 1e-32;
constexpr double kMaxRadius = 400.0;
constexpr int kMaxTerms = 1400;

qcplx qexp(const qcplx& x) { return boost::multiprecision::exp(x); }

qcplx cover_power(const qcplx& p, double r, double theta) {
    return qexp(p * qcplx(boost::multiprecision::log(qreal(r)), qreal(theta)));
}

qcplx dot(const QMat& a, int i, const QMat& b, int j) {
    qcplx s = 0;
    for (int r = 0; r < a.rows; ++r) s += conj(a(r, i)) * b(r, j);
    return s;
}

qreal norm(const QMat& a, int i) { return boost::multiprecision::sqrt(abs(dot(a, i, a, i))); }

void subtract(QMat& a, int i, const QMat& b, int j, const qcplx& f) {
    for (int r = 0; r < a.rows; ++r) a(r, i) -= f * b(r, j);
}

// orthonormal basis of the span of the columns, dropping columns that add nothing
QMat orthonormal(const QMat& m) {
    std::vector<int> keep;
    QMat q = m;
    for (int c = 0; c < q.cols; ++c) {
        qreal before = norm(q, c);
        if (before == 0) continue;
        for (int pass = 0; pass < 2; ++pass)
            for (int b : keep) subtract(q, c, q, b, dot(q, b, q, c));
        qreal after = norm(q, c);
        if (after <= qreal(1e-20) * before) continue;
        for (int r = 0; r < q.rows; ++r) q(r, c) /= after;
        keep.push_back(c);
    }
    QMat out(q.rows, static_cast<int>(keep.size()));
    for (size_t c = 0; c < keep.size(); ++c)
        for (int r = 0; r < q.rows; ++r) out(r, static_cast<int>(c)) = q(r, keep[c]);
    return out;
}

// the rest of C^n after the span of q
QMat complement(const QMat& q) {
    int n = q.rows;
    QMat m(n, q.cols + n);
    for (int c = 0; c < q.cols; ++c)
        for (int r = 0; r < n; ++r) m(r, c) = q(r, c);
    for (int r = 0; r < n; ++r) m(r, q.cols + r) = 1;
    QMat all = orthonormal(m);
    QMat out(n, all.cols - q.cols);
    for (int c = q.cols; c < all.cols; ++c)
        for (int r = 0; r < n; ++r) out(r, c - q.cols) = all(r, c);
    return out;
}

struct Truncated {
    QMat v;
    int terms = 0;
    qreal smallest = 0;
};

// optimally truncated column i of the formal solution at R e^{i theta}, times z^{lambda'_i}
Truncated formal_value(const std::vector<QMat>& F, const quad::QSystem& qs, int i, double R, double theta) {
    int n = qs.n, K = static_cast<int>(F.size()) - 1;
    qcplx zinv = quad::polar(qreal(1) / qreal(R), qreal(-theta));
    std::vector<qreal> size(K + 1);
    qcplx zp = 1;
    for (int l = 0; l <= K; ++l) {
        qreal m = 0;
        for (int r = 0; r < n; ++r) m = std::max(m, quad::qabs(F[l](r, i) * zp));
        size[l] = m;
        zp *= zinv;
    }
    Truncated t;
    t.terms = 1;
    t.smallest = std::numeric_limits<qreal>::infinity();
    for (int l = 1; l + 2 <= K; ++l) {
        qreal w = std::max({size[l], size[l + 1], size[l + 2]});
        if (w < t.smallest) {
            t.smallest = w;
            t.terms = l;
        }
    }
    t.v = QMat(n, 1);
    zp = 1;
    for (int l = 0; l < t.terms; ++l) {
        for (int r = 0; r < n; ++r) t.v(r, 0) += F[l](r, i) * zp;
        zp *= zinv;
    }
    qcplx f = cover_power(qs.lambda_prime[i], R, theta);
    for (int r = 0; r < n; ++r) t.v(r, 0) *= f;
    return t;
}

// Solutions no larger than e^{lambda_k z} along arg z = theta, carried in to the base point. q spans those
// strictly smaller, w is the solution with the asymptotics of column k, kept orthogonal to q.
struct Flag {
    QMat q, w;
    AnchorInfo info;
};

Flag flag_at(const SectorSolutionImpl& s, const std::vector<QMat>& F, int k, double theta, double R) {
    const auto& qs = s.qs;
    int n = qs.n;
    qcplx zR = quad::polar(qreal(R), qreal(theta));
    Flag f;
    f.info.column = k;
    f.info.R = R;
    f.info.theta = theta;
    Truncated own = formal_value(F, qs, k, R, theta);
    f.info.terms = own.terms;
    f.info.smallest_term = static_cast<double>(own.smallest);
    f.w = own.v;
    std::vector<int> below;
    for (int i = 0; i < n; ++i)
        if (i != k && ((qs.lambda[i] - qs.lambda[k]) * zR).real() < 0) below.push_back(i);
    QMat q(n, static_cast<int>(below.size()));
    for (size_t c = 0; c < below.size(); ++c) {
        Truncated t = formal_value(F, qs, below[c], R, theta);
        for (int r = 0; r < n; ++r) q(r, static_cast<int>(c)) = t.v(r, 0);
    }
    q = orthonormal(q);

    double spread = std::max(qs.lambda_spread, 1e-3);
    auto tidy = [&] {
        q = orthonormal(q);
        for (int pass = 0; pass < 2; ++pass)
            for (int c = 0; c < q.cols; ++c) subtract(f.w, 0, q, c, dot(q, c, f.w, 0));
    };
    auto carry = [&](auto&& step) {
        QMat both(n, q.cols + 1);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < q.cols; ++c) both(r, c) = q(r, c);
            both(r, q.cols) = f.w(r, 0);
        }
        step(both);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < q.cols; ++c) q(r, c) = both(r, c);
            f.w(r, 0) = both(r, q.cols);
        }
        tidy();
    };
    tidy();
    double piece = 6.0 / spread;
    for (double r = R; r > s.rb;) {
        double next = std::max(s.rb, r - piece);
        carry([&](QMat& m) { quad::transport_radial(qs, qs.lambda[k], theta, r, next, m); });
        r = next;
    }
    int arcs = std::max(1, static_cast<int>(std::ceil(std::abs(s.theta_b - theta) * s.rb / piece)));
    for (int a = 0; a < arcs; ++a) {
        double t0 = theta + (s.theta_b - theta) * a / arcs, t1 = theta + (s.theta_b - theta) * (a + 1) / arcs;
        carry([&](QMat& m) { quad::transport_arc(qs, qs.lambda[k], s.rb, t0, t1, m); });
    }
    qcplx g = qexp((qs.lambda[k] - s.shift) * quad::polar(qreal(s.rb), qreal(s.theta_b)));
    for (int r = 0; r < n; ++r) f.w(r, 0) *= g;
    f.q = q;
    return f;
}

// direction in the sector where Y_j outgrows Y_k the most
double exclusion_direction(const SectorSolutionImpl& s, int k, int j) {
    double margin = std::min(0.05, 0.1 * (s.hi - s.lo));
    double a = std::arg(s.sys.lambda[j] - s.sys.lambda[k]);
    double best = s.lo + margin, best_c = -2.0;
    const int steps = 720;
    for (int i = 0; i <= steps; ++i) {
        double t = s.lo + margin + (s.hi - s.lo - 2 * margin) * i / steps;
        double c = std::cos(t + a);
        if (c > best_c) {
            best_c = c;
            best = t;
        }
    }
    return best;
}

}  // namespace

QMat SectorSolutionImpl::eval_q(ZPoint z) const {
    QMat Y = base;
    quad::transport_arc(qs, shift, rb, theta_b, z.theta, Y);
    quad::transport_radial(qs, shift, z.theta, rb, z.r, Y);
    qcplx f = qexp(shift * quad::polar(qreal(z.r), qreal(z.theta)));
    for (auto& v : Y.a) v *= f;
    return Y;
}

int SectorSolution::nu() const { return impl_->nu; }
double SectorSolution::eta() const { return impl_->eta; }
double SectorSolution::arg_lo() const { return impl_->lo; }
double SectorSolution::arg_hi() const { return impl_->hi; }
const std::vector<AnchorInfo>& SectorSolution::anchors() const { return impl_->anchors; }
double SectorSolution::predicted_error() const { return impl_->predicted; }

CMat SectorSolution::eval(ZPoint z) const { return quad::to_d(impl_->eval_q(z)); }

CVec SectorSolution::column(int k, ZPoint z) const {
    if (k < 0 || k >= impl_->sys.n) throw Error("oracle", "IndexOutOfRange", "column " + std::to_string(k));
    return quad::to_d(impl_->eval_q(z)).col(k);
}

double SectorSolution::residual(ZPoint z) const {
    const auto& s = impl_->qs;
    int n = s.n;
    QMat Y = impl_->eval_q(z);
    qcplx zq = quad::polar(qreal(z.r), qreal(z.theta));
    qcplx dz = zq * qreal(1e-8);
    auto at = [&](int m) {
        QMat v = Y;
        quad::transport_segment(s, qcplx(0), zq, zq + dz * qreal(m), v);
        return v;
    };
    QMat p2 = at(2), p1 = at(1), m1 = at(-1), m2 = at(-2);
    qreal worst = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            qcplx d = (-p2(i, j) + qreal(8) * p1(i, j) - qreal(8) * m1(i, j) + m2(i, j)) / (qreal(12) * dz);
            qcplx rhs = s.lambda[i] * Y(i, j);
            for (int l = 0; l < n; ++l) rhs += s.a1(i, l) * Y(l, j) / zq;
            worst = std::max(worst, quad::qabs(d - rhs));
        }
    return static_cast<double>(worst / quad::max_abs(Y));
}

cplx column_scale(const RankOneSystem& sys, int k, ZPoint z) {
    return std::exp(sys.lambda[k] * z.value() + sys.lambda_prime[k] * cplx(std::log(z.r), z.theta));
}

SectorSolution sector_solution(const RankOneSystem& sys, double eta, double tol, double radius_scale) {
    if (!(tol >= 1e-13)) throw Error("oracle", "PreconditionViolation", "tol must be at least 1e-13");
    DirectionFrame fr = frame(sys, eta);
    int n = sys.n;
    auto impl = std::make_shared<SectorSolutionImpl>();
    impl->sys = sys;
    impl->qs = quad::to_q(sys);
    impl->nu = fr.nu;
    impl->eta = eta;
    impl->lo = 0.5 * kPi - fr.critical(fr.nu);
    impl->hi = 1.5 * kPi - fr.critical(fr.nu + 1);
    impl->theta_b = 0.5 * (impl->lo + impl->hi);
    impl->rb = 1.0;
    qcplx mean = 0;
    for (auto& l : impl->qs.lambda) mean += l;
    impl->shift = mean / qreal(n);

    double delta = sys.min_separation();
    double R = std::clamp(75.0 / delta, 20.0, kMaxRadius) * radius_scale;
    int K = std::min(static_cast<int>(std::ceil(1.6 * impl->qs.lambda_spread * R)) + 40, kMaxTerms);
    auto F = quad::formal_coefficients(impl->qs, K);

    std::vector<std::vector<double>> dirs(n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            if (j == k) continue;
            double t = exclusion_direction(*impl, k, j);
            bool seen = false;
            for (double u : dirs[k]) seen = seen || std::abs(u - t) < 1e-9;
            if (!seen) dirs[k].push_back(t);
        }
    std::vector<std::vector<Flag>> flags(n);
    std::vector<std::future<void>> running;
    for (int k = 0; k < n; ++k) flags[k].resize(dirs[k].size());
    for (int k = 0; k < n; ++k)
        for (size_t d = 0; d < dirs[k].size(); ++d)
            running.push_back(std::async(std::launch::async, [&, k, d] {
                flags[k][d] = flag_at(*impl, F, k, dirs[k][d], R);
            }));
    for (auto& r : running) r.get();

    impl->base = QMat(n, n);
    for (int k = 0; k < n; ++k) {
        // the column is the one line common to every flag: least eigenvector of the summed complements
        QMat P(n, n);
        for (auto& f : flags[k]) {
            QMat span(n, f.q.cols + 1);
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < f.q.cols; ++c) span(r, c) = f.q(r, c);
                span(r, f.q.cols) = f.w(r, 0);
            }
            QMat c = complement(orthonormal(span));
            for (int x = 0; x < c.cols; ++x)
                for (int r = 0; r < n; ++r)
                    for (int t = 0; t < n; ++t) P(r, t) += c(r, x) * conj(c(t, x));
        }
        QMat shifted = P;
        for (int r = 0; r < n; ++r) shifted(r, r) += qreal(1e-20);
        QMat Pinv = quad::inverse(shifted);
        QMat line = flags[k][0].w;
        for (int it = 0; it < 4; ++it) {
            line = quad::mul(Pinv, line);
            qreal m = norm(line, 0);
            for (auto& v : line.a) v /= m;
        }
        qreal leak = norm(quad::mul(P, line), 0);
        const Flag& f0 = flags[k][0];
        qcplx scale = dot(f0.w, 0, f0.w, 0) / dot(f0.w, 0, line, 0);
        for (int r = 0; r < n; ++r) impl->base(r, k) = line(r, 0) * scale;
        for (auto& f : flags[k]) {
            f.info.predicted_error =
                std::max(f.info.smallest_term, std::exp(-delta * f.info.R)) + kRoundoff * static_cast<double>(n);
            impl->anchors.push_back(f.info);
            impl->predicted = std::max(impl->predicted, f.info.predicted_error);
        }
        impl->predicted = std::max(impl->predicted, static_cast<double>(boost::multiprecision::sqrt(leak)));
    }
    double limit = std::max(1e-7, tol);
    if (impl->predicted > limit) {
        std::ostringstream os;
        os << "predicted anchor error " << impl->predicted << " exceeds " << limit;
        throw Error("oracle", "AnchorAccuracyInsufficient", os.str());
    }
    return SectorSolution(impl);
}

SectorSolution sector_solution(const RankOneSystem& sys, const DirectionFrame& skeleton, int nu, double tol) {
    return sector_solution(sys, interval_midpoint(skeleton, nu), tol);
}

}  // namespace mono::oracle
