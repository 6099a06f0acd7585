#include <gsl/gsl_integration.h>

#include <algorithm>
#include <limits>
#include <memory>
#include <sstream>

#include "monodromy/continuation.hpp"
#include "monodromy/oracle.hpp"

namespace mono::oracle {

namespace {

constexpr int kNodes = 20;

struct GaussTable {
    std::vector<double> x, w;
    GaussTable() {
        gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(kNodes);
        for (int i = 0; i < kNodes; ++i) {
            double xi, wi;
            gsl_integration_glfixed_point(-1.0, 1.0, i, &xi, &wi, t);
            x.push_back(xi);
            w.push_back(wi);
        }
        gsl_integration_glfixed_table_free(t);
    }
};

const GaussTable& gauss() {
    static const GaussTable t;
    return t;
}

// u runs over the circle rho e^{i alpha}, alpha from phi - 2 pi to phi
template <class F>
CVec circle_integral(int n, double rho, double phi, cplx z, int panels, F psi) {
    const auto& g = gauss();
    CVec sum = CVec::Zero(n);
    double width = kTwoPi / panels;
    for (int p = 0; p < panels; ++p) {
        double a0 = phi - kTwoPi + p * width;
        for (int i = 0; i < kNodes; ++i) {
            double alpha = a0 + 0.5 * width * (g.x[i] + 1.0);
            cplx u = std::polar(rho, alpha);
            sum += (0.5 * width * g.w[i]) * std::exp(z * u) * kI * u * psi(alpha);
        }
    }
    return sum;
}

// integral of e^{z u} G(lambda_k + u) du along u = s e^{i phi}, s from rho to infinity
CVec ray_tail(const RankOneSystem& sys, int k, double phi, double rho, cplx z, const CVec& start, double tol) {
    int n = sys.n;
    CVec sum = CVec::Zero(n);
    if (start.cwiseAbs().maxCoeff() == 0.0) return sum;
    cplx dir = std::polar(1.0, phi);
    double kappa = -(z * dir).real();
    double chunk = 10.0 / kappa;
    double max_step = 1.5 / std::abs(z);
    const auto& g = gauss();
    CMat value = start;
    double s = rho;
    for (int c = 0; c < 200; ++c) {
        cplx from = sys.lambda[k] + s * dir, to = sys.lambda[k] + (s + chunk) * dir;
        auto pieces = taylor_pieces(sys, from, value, to, tol, max_step);
        for (auto& p : pieces) {
            for (int i = 0; i < kNodes; ++i) {
                cplx t = 0.5 * p.h * (g.x[i] + 1.0);
                cplx u = p.center + t - sys.lambda[k];
                sum += (0.5 * g.w[i]) * p.h * std::exp(z * u) * p.eval(t).col(0);
            }
        }
        value = pieces.back().eval(pieces.back().h);
        s += chunk;
        double end = std::abs(std::exp(z * s * dir)) * value.cwiseAbs().maxCoeff() / kappa;
        if (end <= 1e-18 * std::max(sum.cwiseAbs().maxCoeff(), 1e-300)) return sum;
    }
    throw Error("oracle", "QuadratureNotConverged", "tail along the cut did not decay");
}

// integral of e^{z u} G(lambda_k + u) du along u = s e^{i phi}, s from 0 to rho
template <class F>
CVec segment_integral(int n, double rho, double phi, cplx z, int panels, F psi) {
    const auto& g = gauss();
    CVec sum = CVec::Zero(n);
    cplx dir = std::polar(1.0, phi);
    double width = rho / panels;
    for (int p = 0; p < panels; ++p)
        for (int i = 0; i < kNodes; ++i) {
            double s = p * width + 0.5 * width * (g.x[i] + 1.0);
            sum += (0.5 * width * g.w[i]) * dir * std::exp(z * s * dir) * psi(s);
        }
    return sum;
}

}  // namespace

CVec laplace_column(const RankOneSystem& sys, double eta, const std::vector<LocalBasis>& bases, int k, ZPoint z,
                    const LaplaceOptions& opt) {
    if (k < 0 || k >= sys.n) throw Error("oracle", "IndexOutOfRange", "column " + std::to_string(k));
    const LocalBasis& b = bases.at(k);
    int n = sys.n;
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        if (j == k) continue;
        double a = wrap_below(std::arg(sys.lambda[j] - sys.lambda[k]), eta);
        lo = std::max(lo, a);
        hi = std::min(hi, a + kTwoPi);
    }
    double margin = std::min(0.3, 0.25 * (hi - lo));
    double phi = std::clamp(kPi - z.theta, lo + margin, hi - margin);
    if (std::cos(z.theta + phi - kPi) < 0.05) {
        std::ostringstream os;
        os << "arg z = " << z.theta << " is outside the convergence sector of column " << k;
        throw Error("oracle", "PreconditionViolation", os.str());
    }
    cplx zc = z.value();
    double rho = 0.75 * b.radius;
    double lr = std::log(rho);
    bool log_case = b.tag.kind != CaseKind::Generic;
    bool negative = b.tag.kind == CaseKind::Jordan || b.tag.kind == CaseKind::ResonantNeg;
    bool ray = negative && (opt.ray_form || b.epsilon == 0);

    auto psi_k = [&](double lu, double au) -> CVec {
        if (b.psi_k_zero) return CVec::Zero(n);
        return b.psi_k.eval(lu, au);
    };
    auto sing = [&](double alpha) { return b.columns[k].eval(lr, alpha); };

    CVec result;
    if (ray) {
        auto seg = [&](int panels) {
            return segment_integral(n, rho, phi, zc, panels, [&](double s) { return psi_k(std::log(s), phi); });
        };
        CVec a = seg(4), c = seg(8);
        if ((a - c).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, c.cwiseAbs().maxCoeff()))
            throw Error("oracle", "QuadratureNotConverged", "segment near the pole");
        result = c + ray_tail(sys, k, phi, rho, zc, psi_k(lr, phi), opt.tol);
    } else {
        auto circ = [&](int panels) { return circle_integral(n, rho, phi, zc, panels, sing); };
        CVec a = circ(8), c = circ(16);
        if ((a - c).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, c.cwiseAbs().maxCoeff()))
            throw Error("oracle", "QuadratureNotConverged", "loop around the pole");
        if (log_case) {
            result = c / (kTwoPi * kI) + ray_tail(sys, k, phi, rho, zc, psi_k(lr, phi), opt.tol);
        } else {
            cplx jump = 1.0 - std::exp(kTwoPi * kI * sys.lambda_prime[k]);
            CVec edges = jump * ray_tail(sys, k, phi, rho, zc, sing(phi), opt.tol);
            result = (c + edges) / (kTwoPi * kI);
        }
    }
    return std::exp(sys.lambda[k] * zc) * result;
}

}  // namespace mono::oracle
