#include "monodromy/continuation.hpp"

#include <future>
#include <sstream>

namespace mono {

namespace {

constexpr int kMaxTerms = 120;

double nearest_pole_distance(const RankOneSystem& sys, cplx c) {
    double r = std::numeric_limits<double>::infinity();
    for (auto l : sys.lambda) r = std::min(r, std::abs(l - c));
    return r;
}

// Taylor coefficients at c of the solution with value y0 there; stops once two
// consecutive terms scaled by |h|^m fall below term_tol relative to y0.
std::vector<CMat> taylor_at(const RankOneSystem& sys, cplx c, const CMat& y0, double habs,
                            double term_tol, bool& converged, double& tail) {
    int n = sys.n;
    CVec dinv(n);
    for (int i = 0; i < n; ++i) dinv(i) = 1.0 / (sys.lambda[i] - c);
    std::vector<CMat> coef;
    coef.push_back(y0);
    double scale = std::max(y0.norm(), 1e-300);
    double hp = 1.0;
    int small = 0;
    converged = false;
    tail = 0.0;
    for (int m = 0; m < kMaxTerms; ++m) {
        CMat next = (sys.a1 * coef[m] + static_cast<double>(m + 1) * coef[m]) / static_cast<double>(m + 1);
        next = dinv.asDiagonal() * next;
        coef.push_back(next);
        hp *= habs;
        double t = next.norm() * hp / scale;
        if (t <= term_tol) {
            if (++small >= 2) {
                converged = true;
                tail = t;
                break;
            }
        } else {
            small = 0;
        }
    }
    return coef;
}

CMat horner(const std::vector<CMat>& coef, cplx t) {
    CMat acc = coef.back();
    for (int i = static_cast<int>(coef.size()) - 2; i >= 0; --i) acc = acc * t + coef[i];
    return acc;
}

struct Point2 {
    double x, y;
};

double dist_point_segment(Point2 p, Point2 a, Point2 b) {
    double dx = b.x - a.x, dy = b.y - a.y;
    double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - a.x - t * dx, p.y - a.y - t * dy);
}

// horizontal ray from w to +infinity
double dist_point_ray(Point2 p, Point2 w) {
    if (p.x >= w.x) return std::abs(p.y - w.y);
    return std::hypot(p.x - w.x, p.y - w.y);
}

double dist_segment_ray(Point2 a, Point2 b, Point2 w) {
    double ya = a.y - w.y, yb = b.y - w.y;
    if (ya * yb < 0) {
        double t = ya / (ya - yb);
        double x = a.x + t * (b.x - a.x);
        if (x >= w.x) return 0.0;
    } else if (ya == 0 && yb == 0) {
        if (std::max(a.x, b.x) >= w.x) return 0.0;
    }
    return std::min({dist_point_ray(a, w), dist_point_ray(b, w), dist_point_segment(w, a, b)});
}

}  // namespace

CMat TaylorPiece::eval(cplx t) const { return horner(coef, t); }

double path_clearance(const RankOneSystem& sys, double eta, const std::vector<cplx>& points,
                      int skip_start_pole, int skip_end_pole) {
    cplx rot = std::exp(-kI * eta);
    double best = std::numeric_limits<double>::infinity();
    int segs = static_cast<int>(points.size()) - 1;
    for (int s = 0; s < segs; ++s) {
        cplx a = points[s] * rot, b = points[s + 1] * rot;
        for (int i = 0; i < sys.n; ++i) {
            if ((s == 0 && i == skip_start_pole) || (s == segs - 1 && i == skip_end_pole)) continue;
            cplx w = sys.lambda[i] * rot;
            best = std::min(best, dist_segment_ray({a.real(), a.imag()}, {b.real(), b.imag()},
                                                   {w.real(), w.imag()}));
        }
    }
    return best;
}

cplx start_point(const RankOneSystem& sys, const LocalBasis& b, double eta, double offset) {
    (void)sys;
    return b.center + 0.5 * b.radius * std::exp(kI * (eta - kPi + offset));
}

ContinuationPath plan_path(const RankOneSystem& sys, const DirectionFrame& fr, int k, int j) {
    if (k == j) throw Error("continuation", "PreconditionViolation", "plan_path needs k != j");
    double eta = fr.eta;
    cplx rot = std::exp(-kI * eta);
    double rho_k = 0.4 * sys.min_separation(k), rho_j = 0.4 * sys.min_separation(j);
    double rho_max = 0.0, xmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sys.n; ++i) {
        rho_max = std::max(rho_max, 0.4 * sys.min_separation(i));
        xmin = std::min(xmin, (sys.lambda[i] * rot).real());
    }
    double sep = sys.min_separation();
    cplx wk = sys.lambda[k] * rot, wj = sys.lambda[j] * rot;
    cplx s = wk - 0.5 * rho_k, e = wj - 0.5 * rho_j;
    double xl = xmin - rho_max - 0.5 * sep;
    std::vector<cplx> w = {s, cplx(xl, s.imag()), cplx(xl, e.imag()), e};
    std::vector<cplx> pts;
    for (auto p : w) {
        cplx lam = p / rot;
        if (pts.empty() || std::abs(pts.back() - lam) > 1e-14) pts.push_back(lam);
    }
    ContinuationPath path;
    path.eta = eta;
    for (auto p : pts) path.waypoints.push_back(branch_point(sys, eta, p));
    path.clearance = path_clearance(sys, eta, pts, -1, -1);
    if (!(path.clearance > 0.05 * sep)) {
        std::ostringstream os;
        os << "path " << k << "->" << j << " clearance " << path.clearance << " below " << 0.05 * sep;
        throw Error("continuation", "PathPlanningFailure", os.str());
    }
    return path;
}

std::vector<TaylorPiece> taylor_pieces(const RankOneSystem& sys, cplx from, const CMat& value,
                                       cplx to, double tol, double max_step) {
    std::vector<TaylorPiece> out;
    cplx c = from;
    CMat y = value;
    double term_tol = std::min(tol, 1e-3) * 1e-3;
    int guard = 0;
    while (std::abs(to - c) > 0.0) {
        if (++guard > 200000) throw Error("continuation", "StepUnderflow", "too many steps");
        double R = nearest_pole_distance(sys, c);
        double remaining = std::abs(to - c);
        double habs = std::min({remaining, 0.5 * R, max_step});
        if (habs < 1e-12 * std::max(1.0, std::abs(c)))
            throw Error("continuation", "StepUnderflow", "step below 1e-12 near a pole");
        bool ok = false;
        double tail = 0.0;
        std::vector<CMat> coef;
        for (int tries = 0; tries < 30; ++tries) {
            coef = taylor_at(sys, c, y, habs, term_tol, ok, tail);
            if (ok) break;
            habs *= 0.5;
        }
        if (!ok) throw Error("continuation", "ToleranceNotMet", "Taylor series did not converge");
        cplx h = (to - c) / remaining * habs;
        if (habs == remaining) h = to - c;
        TaylorPiece piece{c, h, std::move(coef)};
        y = piece.eval(h);
        c = (habs == remaining) ? to : c + h;
        out.push_back(std::move(piece));
    }
    return out;
}

Continued transport(const RankOneSystem& sys, const BranchPoint& start, const CMat& value,
                    const std::vector<cplx>& polyline, double tol) {
    Continued res;
    res.value = value;
    res.end = start;
    double err = 0.0;
    cplx cur = start.value;
    double term_tol = std::min(tol, 1e-3) * 1e-3;
    for (auto target : polyline) {
        int guard = 0;
        while (std::abs(target - cur) > 0.0) {
            if (++guard > 200000) throw Error("continuation", "StepUnderflow", "too many steps");
            double R = nearest_pole_distance(sys, cur);
            double remaining = std::abs(target - cur);
            double habs = std::min(remaining, 0.5 * R);
            if (habs < 1e-12 * std::max(1.0, std::abs(cur)))
                throw Error("continuation", "StepUnderflow", "step below 1e-12 near a pole");
            bool ok = false;
            double tail = 0.0;
            std::vector<CMat> coef;
            for (int tries = 0; tries < 30; ++tries) {
                coef = taylor_at(sys, cur, res.value, habs, term_tol, ok, tail);
                if (ok) break;
                habs *= 0.5;
            }
            if (!ok) throw Error("continuation", "ToleranceNotMet", "Taylor series did not converge");
            bool last = (habs == remaining);
            cplx next = last ? target : cur + (target - cur) / remaining * habs;
            res.value = horner(coef, next - cur);
            err += tail + 4e-16 * static_cast<double>(coef.size());
            for (int i = 0; i < sys.n; ++i)
                res.end.args[i] += std::arg((next - sys.lambda[i]) / (cur - sys.lambda[i]));
            cur = next;
        }
    }
    res.end.value = cur;
    res.err = err;
    return res;
}

Continued continue_vector(const RankOneSystem& sys, const BranchPoint& start, const CVec& value,
                          const ContinuationPath& path, double tol) {
    std::vector<cplx> pts;
    for (size_t i = 1; i < path.waypoints.size(); ++i) pts.push_back(path.waypoints[i].value);
    return transport(sys, start, CMat(value), pts, tol);
}

std::vector<LocalBasis> build_all_bases(const RankOneSystem& sys, int order) {
    std::vector<std::future<LocalBasis>> jobs;
    for (int k = 0; k < sys.n; ++k)
        jobs.push_back(std::async(std::launch::async, [&sys, k, order] { return build_local_basis(sys, k, order); }));
    std::vector<LocalBasis> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

namespace {

struct Decomposition {
    cplx c;
    double cond;
    double xnorm;
};

Decomposition decompose(const LocalBasis& bj, const BranchPoint& p, const CVec& value) {
    CMat F = eval_fundamental(bj, p);
    Eigen::JacobiSVD<CMat> svd(F);
    auto sv = svd.singularValues();
    double cond = sv(0) / sv(sv.size() - 1);
    CVec x = F.partialPivLu().solve(value);
    return {x(bj.k), cond, x.cwiseAbs().maxCoeff()};
}

}  // namespace

CoefficientResult connection_coefficient(const RankOneSystem& sys, const DirectionFrame& fr,
                                         const std::vector<LocalBasis>& bases, int k, int j,
                                         double tol) {
    if (j == k) throw Error("continuation", "PreconditionViolation", "connection_coefficient needs j != k");
    const LocalBasis& bk = bases[k];
    const LocalBasis& bj = bases[j];
    if (bj.epsilon == 0 || bk.psi_k_zero) return {0.0, 0.0};
    ContinuationPath path = plan_path(sys, fr, k, j);
    const BranchPoint& s = path.waypoints.front();
    CVec v = eval_psi_k(bk, s);
    Continued cont = continue_vector(sys, s, v, path, tol);

    // alternative evaluation angles inside the disk of lambda_j
    const double offsets[] = {0.0, 0.6, -0.6, 1.2, -1.2};
    Decomposition first{};
    BranchPoint at = cont.end;
    CVec val = cont.value.col(0);
    int used = -1;
    for (int t = 0; t < 5; ++t) {
        BranchPoint p = at;
        CVec pv = val;
        if (offsets[t] != 0.0) {
            cplx target = start_point(sys, bj, fr.eta, offsets[t]);
            Continued chord = transport(sys, at, CMat(val), {target}, tol);
            p = chord.end;
            pv = chord.value.col(0);
        }
        Decomposition d = decompose(bj, p, pv);
        if (d.cond <= 1e10) {
            first = d;
            used = t;
            at = p;
            val = pv;
            break;
        }
    }
    if (used < 0) {
        std::ostringstream os;
        os << "pair (" << j << "," << k << "): local fundamental matrix condition number above 1e10";
        throw Error("continuation", "IllConditionedDecomposition", os.str());
    }
    // a-posteriori check at a second point
    cplx other = start_point(sys, bj, fr.eta, offsets[used] >= 0 ? offsets[used] - 0.4 : offsets[used] + 0.4);
    Continued chord = transport(sys, at, CMat(val), {other}, tol);
    Decomposition second = decompose(bj, chord.end, chord.value.col(0));
    double tail = tail_estimate(bj, 0.5 * bj.radius);
    double err = std::abs(first.c - second.c) +
                 10.0 * (cont.err + tail) * first.cond * std::max(1.0, first.xnorm);
    return {first.c, err};
}

ConnectionMatrix connection_matrix(const RankOneSystem& sys, const DirectionFrame& fr,
                                   const std::vector<LocalBasis>& bases, double tol) {
    int n = sys.n;
    ConnectionMatrix out;
    out.eta = fr.eta;
    out.c = CMat::Zero(n, n);
    out.err = Eigen::MatrixXd::Zero(n, n);
    out.zero_rows.assign(n, false);
    out.zero_cols.assign(n, false);
    std::vector<std::future<std::vector<CoefficientResult>>> jobs;
    for (int k = 0; k < n; ++k)
        jobs.push_back(std::async(std::launch::async, [&, k] {
            std::vector<CoefficientResult> col(n);
            for (int j = 0; j < n; ++j)
                if (j != k) col[j] = connection_coefficient(sys, fr, bases, k, j, tol);
            return col;
        }));
    for (int k = 0; k < n; ++k) {
        auto col = jobs[k].get();
        for (int j = 0; j < n; ++j) {
            if (j == k) {
                out.c(k, k) = is_integer(sys.lambda_prime[k]) ? 0.0 : 1.0;
            } else {
                out.c(j, k) = col[j].value;
                out.err(j, k) = col[j].err;
            }
        }
    }
    for (int k = 0; k < n; ++k) {
        out.zero_rows[k] = bases[k].epsilon == 0;
        out.zero_cols[k] = bases[k].psi_k_zero;
    }
    Eigen::ComplexEigenSolver<CMat> es(sys.a1);
    for (int i = 0; i < n; ++i) {
        cplx mu = es.eigenvalues()(i);
        if (std::abs(mu - std::round(mu.real())) < 1e-8) out.integer_eigenvalue = true;
    }
    return out;
}

}  // namespace mono
