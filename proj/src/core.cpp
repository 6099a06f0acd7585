#include "monodromy/core.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace mono {

namespace {

constexpr double kAdmissibleTol = 1e-12;

double fmod_pos(double x, double p) {
    double r = std::fmod(x, p);
    if (r < 0) r += p;
    return r;
}

// representative of angle in (-pi/2, 3pi/2]
double to_window(double a) {
    double r = fmod_pos(a + 0.5 * kPi, kTwoPi);  // [0, 2pi)
    if (r == 0.0) r = kTwoPi;
    return r - 0.5 * kPi;
}

double angular_distance(double a, double b) {
    double d = fmod_pos(a - b, kTwoPi);
    return std::min(d, kTwoPi - d);
}

}  // namespace

double RankOneSystem::min_separation() const {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) best = std::min(best, std::abs(lambda[i] - lambda[j]));
    return best;
}

double RankOneSystem::min_separation(int k) const {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
        if (j != k) best = std::min(best, std::abs(lambda[j] - lambda[k]));
    return best;
}

RankOneSystem validate_system(int n, const std::vector<cplx>& lambda, const CMat& a1) {
    if (n < 2) throw Error("core", "DimensionMismatch", "n must be at least 2");
    if (static_cast<int>(lambda.size()) != n || a1.rows() != n || a1.cols() != n) {
        std::ostringstream os;
        os << "n=" << n << ", eigenvalues=" << lambda.size() << ", matrix " << a1.rows() << "x"
           << a1.cols();
        throw Error("core", "DimensionMismatch", os.str());
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (lambda[i] == lambda[j]) {
                std::ostringstream os;
                os << "lambda[" << i << "] == lambda[" << j << "]";
                throw Error("core", "DuplicateEigenvalue", os.str());
            }
    RankOneSystem sys;
    sys.n = n;
    sys.lambda = lambda;
    sys.a1 = a1;
    sys.lambda_prime.resize(n);
    for (int i = 0; i < n; ++i) sys.lambda_prime[i] = a1(i, i);
    return sys;
}

double DirectionFrame::critical(int index) const {
    int h = index >= 0 ? index / m : -((-index + m - 1) / m);
    int base = index - h * m;
    return criticals[base] - kTwoPi * h;
}

std::vector<int> DirectionFrame::dominance_order() const {
    int n = static_cast<int>(prec.rows());
    std::vector<int> preds(n, 0), order(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (prec(i, j)) ++preds[j];
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return preds[a] < preds[b]; });
    return order;
}

DirectionFrame critical_directions(const RankOneSystem& sys) {
    std::vector<double> all;
    for (int j = 0; j < sys.n; ++j)
        for (int k = 0; k < sys.n; ++k)
            if (j != k) all.push_back(to_window(std::arg(sys.lambda[j] - sys.lambda[k])));
    std::sort(all.begin(), all.end(), std::greater<double>());
    DirectionFrame f;
    for (double a : all)
        if (f.criticals.empty() || f.criticals.back() - a > kAdmissibleTol) f.criticals.push_back(a);
    f.m = static_cast<int>(f.criticals.size());
    f.mu = f.m / 2;
    for (double c : f.criticals) f.tau.push_back(1.5 * kPi - c);
    return f;
}

int critical_index(const DirectionFrame& s, double eta) {
    for (double c : s.criticals)
        if (angular_distance(eta, c) < kAdmissibleTol) {
            std::ostringstream os;
            os << "eta=" << eta << " is within " << angular_distance(eta, c) << " of critical value "
               << c;
            throw Error("core", "InadmissibleDirection", os.str());
        }
    // shift eta into the window by whole turns
    int h = static_cast<int>(std::floor((1.5 * kPi - eta) / kTwoPi));
    double e = eta + kTwoPi * h;
    if (e <= -0.5 * kPi) {
        e += kTwoPi;
        ++h;
    }
    int local;
    if (e > s.criticals[0]) {
        local = -1;
    } else {
        local = s.m - 1;
        for (int i = 0; i < s.m; ++i) {
            double next = (i + 1 < s.m) ? s.criticals[i + 1] : s.criticals[0] - kTwoPi;
            if (s.criticals[i] > e && e > next) {
                local = i;
                break;
            }
        }
    }
    return local + h * s.m;
}

double interval_midpoint(const DirectionFrame& s, int index) {
    return 0.5 * (s.critical(index) + s.critical(index + 1));
}

double default_eta(const RankOneSystem& sys) {
    DirectionFrame s = critical_directions(sys);
    int best = 0;
    double width = -1;
    for (int i = 0; i < s.m; ++i) {
        double w = s.critical(i) - s.critical(i + 1);
        if (w > width + 1e-14) {
            width = w;
            best = i;
        }
    }
    return interval_midpoint(s, best);
}

DirectionFrame frame(const RankOneSystem& sys, double eta) {
    DirectionFrame f = critical_directions(sys);
    f.nu = critical_index(f, eta);
    f.eta = eta;
    int n = sys.n;
    f.eta_jk = Eigen::MatrixXd::Zero(n, n);
    f.prec.setConstant(n, n, false);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (j == k) continue;
            double a = wrap_below(std::arg(sys.lambda[j] - sys.lambda[k]), eta);
            f.eta_jk(j, k) = a;
            f.prec(j, k) = a > eta - kPi;
        }
    return f;
}

double wrap_below(double angle, double eta) {
    double r = fmod_pos(angle - eta, kTwoPi);  // [0, 2pi)
    if (r == 0.0) return eta;
    return eta - kTwoPi + r;
}

BranchPoint branch_point(const RankOneSystem& sys, double eta, cplx value) {
    BranchPoint p;
    p.value = value;
    p.args.resize(sys.n);
    for (int k = 0; k < sys.n; ++k) p.args[k] = wrap_below(std::arg(value - sys.lambda[k]), eta);
    return p;
}

}  // namespace mono
