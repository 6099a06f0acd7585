#include "monodromy/local.hpp"

#include <gsl/gsl_sf_gamma.h>
#include <gsl/gsl_sf_result.h>

#include <sstream>

namespace mono {

namespace {

cplx complex_gamma(cplx z) {
    gsl_sf_result lnr, arg;
    gsl_sf_lngamma_complex_e(z.real(), z.imag(), &lnr, &arg);
    return std::exp(cplx(lnr.val, arg.val));
}

cplx upow(cplx s, double log_abs_u, double arg_u) {
    if (s == 0.0) return 1.0;
    return std::exp(s * cplx(log_abs_u, arg_u));
}

// Coefficient recursion for (D - u) W' = (A1 + I) W + forcing, D = diag(lambda_i - lambda_k),
// W = sum_m w_m u^(m + rho).  The forcing comes from a log factor a(u):
// g_m = -D a_m + a_{m-1}.  Row k is solved one level late since d_k = 0.
struct Recursion {
    const RankOneSystem& sys;
    int k;
    cplx rho = 0.0;
    cplx kbase;  // lambda'_k + rho, passed exactly
    int m0 = 0;
    const PowerSeries* forcing = nullptr;

    // residuals recorded at obstruction levels
    std::vector<std::pair<int, cplx>> row_obstructions;
    std::vector<std::pair<int, CVec>> col_obstructions;

    Recursion(const RankOneSystem& s, int kk) : sys(s), k(kk) {}

    CVec forcing_at(int m) const {
        int n = sys.n;
        CVec g = CVec::Zero(n);
        if (!forcing) return g;
        auto a_at = [&](int idx) -> CVec {
            int i = idx - forcing->m0;
            if (i < 0 || i >= static_cast<int>(forcing->coef.size())) return CVec::Zero(n);
            return forcing->coef[i];
        };
        CVec am = a_at(m), am1 = a_at(m - 1);
        for (int i = 0; i < n; ++i) g(i) = -(sys.lambda[i] - sys.lambda[k]) * am(i) + am1(i);
        return g;
    }

    std::vector<CVec> run(const CVec& w_start, int count) {
        int n = sys.n;
        std::vector<CVec> w;
        w.push_back(w_start);
        for (int idx = 1; idx <= count; ++idx) {
            int m = m0 + idx;
            CVec g = forcing_at(m);
            CVec& prev = w.back();
            // row k at level m fixes prev[k]
            cplx off = g(k);
            for (int i = 0; i < n; ++i)
                if (i != k) off += sys.a1(k, i) * prev(i);
            cplx coef = kbase + static_cast<double>(m);
            if (idx == 1 || coef == 0.0) {
                row_obstructions.push_back({m, coef * prev(k) + off});
            } else {
                prev(k) = -off / coef;
            }
            if (idx == count) break;
            cplx shift = rho + static_cast<double>(m);
            CVec rhs = sys.a1 * prev + shift * prev + g;
            CVec next = CVec::Zero(n);
            if (shift == 0.0) {
                CVec res = CVec::Zero(n);
                for (int i = 0; i < n; ++i)
                    if (i != k) res(i) = rhs(i);
                col_obstructions.push_back({m, res});
            } else {
                for (int i = 0; i < n; ++i)
                    if (i != k) next(i) = rhs(i) / ((sys.lambda[i] - sys.lambda[k]) * shift);
            }
            w.push_back(next);
        }
        return w;
    }
};

PowerSeries make_series(cplx rho, int m0, std::vector<CVec> coef) {
    PowerSeries s;
    s.rho = rho;
    s.m0 = m0;
    s.coef = std::move(coef);
    return s;
}

std::vector<CVec> combine(const std::vector<CVec>& a, cplx ca, const std::vector<CVec>& b, cplx cb) {
    std::vector<CVec> out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = ca * a[i] + cb * b[i];
    return out;
}

double series_tail(const PowerSeries& s, double r, double conv_radius) {
    int L = static_cast<int>(s.coef.size());
    if (L == 0) return 0.0;
    double peak = 0.0, last = 0.0;
    for (int i = 0; i < L; ++i) {
        double t = s.coef[i].norm() * std::pow(r, i);
        peak = std::max(peak, t);
        if (i >= L - 3) last = std::max(last, t);
    }
    if (peak == 0.0) return 0.0;
    double q = std::min(r / conv_radius, 0.99);
    return last / (1.0 - q) / peak;
}

double column_tail(const LocalColumn& c, double r, double conv_radius) {
    double t = series_tail(c.main, r, conv_radius);
    if (c.has_log) t = std::max(t, series_tail(c.log_factor, r, conv_radius));
    return t;
}

}  // namespace

CaseTag classify(cplx lp) {
    CaseTag t;
    if (!is_integer(lp)) return t;
    int N = static_cast<int>(lp.real());
    t.N = N;
    if (N == -1)
        t.kind = CaseKind::Jordan;
    else if (N >= 0)
        t.kind = CaseKind::ResonantNonneg;
    else
        t.kind = CaseKind::ResonantNeg;
    return t;
}

std::string to_string(const CaseTag& tag) {
    switch (tag.kind) {
        case CaseKind::Generic: return "Generic";
        case CaseKind::Jordan: return "Jordan";
        case CaseKind::ResonantNonneg: return "ResonantNonneg(" + std::to_string(tag.N) + ")";
        case CaseKind::ResonantNeg: return "ResonantNeg(" + std::to_string(tag.N) + ")";
    }
    return "?";
}

CVec PowerSeries::eval(double lu, double au) const {
    if (coef.empty()) return CVec();
    cplx u = std::exp(cplx(lu, au));
    CVec acc = coef.back();
    for (int i = static_cast<int>(coef.size()) - 2; i >= 0; --i) acc = acc * u + coef[i];
    return acc * upow(rho + static_cast<double>(m0), lu, au);
}

CVec PowerSeries::eval_derivative(double lu, double au) const {
    if (coef.empty()) return CVec();
    cplx u = std::exp(cplx(lu, au));
    int L = static_cast<int>(coef.size());
    CVec p = coef.back();
    CVec dp = CVec::Zero(p.size());
    for (int i = L - 2; i >= 0; --i) {
        dp = dp * u + p;
        p = p * u + coef[i];
    }
    cplx s = rho + static_cast<double>(m0);
    return upow(s, lu, au) * (s * p / u + dp);
}

CVec LocalColumn::eval(double lu, double au) const {
    CVec v = main.eval(lu, au);
    if (has_log) v += cplx(lu, au) * log_factor.eval(lu, au);
    return v;
}

CVec LocalColumn::eval_derivative(double lu, double au) const {
    CVec v = main.eval_derivative(lu, au);
    if (has_log) {
        cplx u = std::exp(cplx(lu, au));
        v += cplx(lu, au) * log_factor.eval_derivative(lu, au) + log_factor.eval(lu, au) / u;
    }
    return v;
}

namespace {

LocalBasis build_once(const RankOneSystem& sys, int k, int L) {
    int n = sys.n;
    LocalBasis b;
    b.k = k;
    b.order = L;
    b.center = sys.lambda[k];
    b.tag = classify(sys.lambda_prime[k]);
    b.radius = 0.4 * sys.min_separation(k);
    b.columns.resize(n);
    b.r_vec = CVec::Zero(n);
    b.r_row = CVec::Zero(n);
    const cplx lp = sys.lambda_prime[k];
    double scale = sys.a1.cwiseAbs().maxCoeff();
    double zero_tol = 1e-10 * (scale > 0 ? scale : 1.0);

    auto unit = [&](int i) {
        CVec e = CVec::Zero(n);
        e(i) = 1.0;
        return e;
    };
    // analytic solution through e_i with the k entry fixed by row k
    auto analytic_from = [&](const CVec& v, cplx kentry, int count,
                             std::vector<std::pair<int, cplx>>* obstructions) {
        Recursion rec(sys, k);
        rec.kbase = lp;
        CVec w0 = v;
        w0(k) = kentry;
        auto coef = rec.run(w0, count);
        if (obstructions) *obstructions = rec.row_obstructions;
        return coef;
    };

    if (b.tag.kind == CaseKind::Generic || b.tag.kind == CaseKind::ResonantNonneg) {
        std::vector<std::vector<CVec>> psi(n);
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            psi[i] = analytic_from(unit(i), -sys.a1(k, i) / (lp + 1.0), L, nullptr);
            b.columns[i].main = make_series(0.0, 0, psi[i]);
        }
        if (b.tag.kind == CaseKind::Generic) {
            Recursion rec(sys, k);
            rec.rho = -lp - 1.0;
            rec.kbase = -1.0;
            CVec w0 = complex_gamma(lp + 1.0) * unit(k);
            b.columns[k].main = make_series(rec.rho, 0, rec.run(w0, L));
            b.psi_k = b.columns[k].main;
            double dist = std::abs(lp - std::round(lp.real()));
            b.near_resonance = dist < 1e-6;
        } else {
            int N = b.tag.N;
            double fact = std::tgamma(N + 1.0);
            // pole part first, without forcing, to read off the log factor
            Recursion head(sys, k);
            head.kbase = lp;
            head.m0 = -N - 1;
            auto w_head = head.run(fact * unit(k), N + 2);
            CVec res = head.col_obstructions.at(0).second;
            CVec a0 = CVec::Zero(n);
            for (int i = 0; i < n; ++i)
                if (i != k) a0(i) = res(i) / (sys.lambda[i] - sys.lambda[k]);
            b.r_vec = a0;
            b.psi_k_zero = a0.cwiseAbs().maxCoeff() <= zero_tol;
            cplx a0k = 0.0;
            for (int i = 0; i < n; ++i)
                if (i != k) a0k -= sys.a1(k, i) * a0(i);
            a0k /= (lp + 1.0);
            std::vector<CVec> acoef;
            if (b.psi_k_zero) {
                acoef.assign(L + N + 2, CVec::Zero(n));
            } else {
                acoef = analytic_from(a0, a0k, L + N + 2, nullptr);
            }
            b.d_series = acoef;
            PowerSeries a = make_series(0.0, 0, acoef);
            Recursion full(sys, k);
            full.kbase = lp;
            full.m0 = -N - 1;
            if (!b.psi_k_zero) full.forcing = &a;
            auto w = full.run(fact * unit(k), N + 1 + L);
            b.poly_P.assign(w.begin(), w.begin() + (N + 1));
            b.columns[k].main = make_series(0.0, -N - 1, w);
            b.columns[k].has_log = !b.psi_k_zero;
            b.columns[k].log_factor = a;
            b.psi_k = a;
        }
    } else {
        // lambda' = N <= -1: Psi_k = c e_k u^p + ..., p = -N-1
        int N = b.tag.N;
        int p = -N - 1;
        cplx c = ((p % 2 == 0) ? -1.0 : 1.0) / std::tgamma(p + 1.0);  // (-1)^N / p!
        {
            Recursion rec(sys, k);
            rec.kbase = lp;
            rec.m0 = p;
            b.psi_k = make_series(0.0, p, rec.run(c * unit(k), L));
        }
        // propagate e_i and read the obstruction at row k, level p + 1
        std::vector<std::vector<CVec>> psi(n);
        CVec ell = CVec::Zero(n);
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            std::vector<std::pair<int, cplx>> obs;
            cplx kentry = (p == 0) ? cplx(0.0) : -sys.a1(k, i) / (lp + 1.0);
            psi[i] = analytic_from(unit(i), kentry, L, &obs);
            for (auto& ob : obs)
                if (ob.first == p + 1) ell(i) = ob.second;
        }
        b.r_row = -ell / c;
        double ell_norm = ell.norm();
        if (ell.cwiseAbs().maxCoeff() <= zero_tol) {
            b.epsilon = 0;
            for (int i = 0; i < n; ++i)
                if (i != k) b.columns[i].main = make_series(0.0, 0, psi[i]);
            b.columns[k].main = b.psi_k;
        } else {
            int q = -1;
            for (int i = 0; i < n; ++i)
                if (i != k && (q < 0 || std::abs(ell(i)) > std::abs(ell(q)))) q = i;
            for (int i = 0; i < n; ++i) {
                if (i == k || i == q) continue;
                b.columns[i].main = make_series(0.0, 0, combine(psi[i], 1.0, psi[q], -ell(i) / ell(q)));
            }
            b.columns[q].main = b.psi_k;
            // singular column: W through v with ell(v) = -c, log factor Psi_k
            CVec v = CVec::Zero(n);
            for (int i = 0; i < n; ++i)
                if (i != k) v(i) = -c * std::conj(ell(i)) / (ell_norm * ell_norm);
            cplx kentry = 0.0;
            if (p > 0) {
                for (int i = 0; i < n; ++i)
                    if (i != k) kentry -= sys.a1(k, i) * v(i);
                kentry /= (lp + 1.0);
            }
            Recursion rec(sys, k);
            rec.kbase = lp;
            rec.forcing = &b.psi_k;
            CVec w0 = v;
            w0(k) = kentry;
            b.columns[k].main = make_series(0.0, 0, rec.run(w0, L));
            b.columns[k].has_log = true;
            b.columns[k].log_factor = b.psi_k;
        }
    }

    double conv = sys.min_separation(k);
    b.tail_bound = 0.0;
    for (auto& col : b.columns) b.tail_bound = std::max(b.tail_bound, column_tail(col, b.radius, conv));
    return b;
}

}  // namespace

LocalBasis build_local_basis(const RankOneSystem& sys, int k, int order) {
    if (k < 0 || k >= sys.n) throw Error("local", "IndexOutOfRange", "pole index " + std::to_string(k));
    int L = std::max(order, 10);
    CaseTag tag = classify(sys.lambda_prime[k]);
    if (tag.kind != CaseKind::Generic) L = std::max(L, std::abs(tag.N) + 5);
    LocalBasis b;
    for (int attempt = 0; attempt < 4; ++attempt) {
        b = build_once(sys, k, L);
        if (b.tail_bound <= 1e-6) return b;
        L *= 2;
    }
    std::ostringstream os;
    os << "pole " << k << ": tail bound " << b.tail_bound << " at radius " << b.radius << " with L=" << L / 2;
    throw Error("local", "SeriesDivergence", os.str());
}

double tail_estimate(const LocalBasis& b, double r) {
    double t = 0.0;
    double conv = b.radius / 0.4;
    for (auto& col : b.columns) t = std::max(t, column_tail(col, r, conv));
    return t;
}

namespace {

void check_radius(const LocalBasis& b, const BranchPoint& p) {
    double r = std::abs(p.value - b.center);
    if (r >= b.radius || r == 0.0) {
        std::ostringstream os;
        os << "|lambda - lambda_" << b.k << "| = " << r << ", radius " << b.radius;
        throw Error("local", "OutOfRadius", os.str());
    }
}

}  // namespace

CMat eval_fundamental(const LocalBasis& b, const BranchPoint& p) {
    check_radius(b, p);
    double lu = std::log(std::abs(p.value - b.center));
    double au = p.args[b.k];
    int n = static_cast<int>(b.columns.size());
    CMat out(n, n);
    for (int j = 0; j < n; ++j) out.col(j) = b.columns[j].eval(lu, au);
    return out;
}

CMat eval_fundamental_derivative(const LocalBasis& b, const BranchPoint& p) {
    check_radius(b, p);
    double lu = std::log(std::abs(p.value - b.center));
    double au = p.args[b.k];
    int n = static_cast<int>(b.columns.size());
    CMat out(n, n);
    for (int j = 0; j < n; ++j) out.col(j) = b.columns[j].eval_derivative(lu, au);
    return out;
}

CVec eval_psi_k(const LocalBasis& b, const BranchPoint& p) {
    check_radius(b, p);
    int n = static_cast<int>(b.columns.size());
    if (b.psi_k_zero) return CVec::Zero(n);
    double lu = std::log(std::abs(p.value - b.center));
    return b.psi_k.eval(lu, p.args[b.k]);
}

std::optional<CVec> eval_psi_sing(const LocalBasis& b, const BranchPoint& p) {
    check_radius(b, p);
    if (b.epsilon == 0) return std::nullopt;
    double lu = std::log(std::abs(p.value - b.center));
    return b.columns[b.k].eval(lu, p.args[b.k]);
}

}  // namespace mono
