#pragma once

#include <memory>

#include "monodromy/local.hpp"

namespace mono::oracle {

struct FormalSeries {
    int K = 0;
    // F[0] = I, F[1..K]
    std::vector<CMat> F;
    double optimal_radius = 0.0;
};

FormalSeries formal_series(const RankOneSystem& sys, int K);

// a point of the universal cover of C \ {0}
struct ZPoint {
    double r;
    double theta;
    cplx value() const { return std::polar(r, theta); }
};

struct AnchorInfo {
    int column = 0;
    double R = 0.0;
    double theta = 0.0;
    int terms = 0;
    double smallest_term = 0.0;
    double predicted_error = 0.0;
};

class SectorSolutionImpl;

// Y_nu(z) = (I + O(1/z)) exp(A0 z + Lambda' ln z) for z in S(tau_nu - pi, tau_{nu+1}).
// Along a ray in the sector the solutions no larger than e^{lambda_k z} form a subspace that can be
// carried inward stably from the truncated series. Column k is the line shared by these subspaces
// on rays where each other exponential outgrows e^{lambda_k z}. Everything runs in quad precision.
class SectorSolution {
public:
    SectorSolution(std::shared_ptr<const SectorSolutionImpl> impl) : impl_(std::move(impl)) {}

    int nu() const;
    double eta() const;
    // sector bounds in arg z
    double arg_lo() const;
    double arg_hi() const;
    const std::vector<AnchorInfo>& anchors() const;
    double predicted_error() const;

    CMat eval(ZPoint z) const;
    CVec column(int k, ZPoint z) const;
    // residual of Y' - (A0 + A1/z) Y relative to |Y| at z
    double residual(ZPoint z) const;

    const SectorSolutionImpl& impl() const { return *impl_; }

private:
    std::shared_ptr<const SectorSolutionImpl> impl_;
};

// eta selects the sector: nu with eta_{nu+1} < eta < eta_nu
SectorSolution sector_solution(const RankOneSystem& sys, double eta, double tol = 1e-13, double radius_scale = 1.0);
SectorSolution sector_solution(const RankOneSystem& sys, const DirectionFrame& skeleton, int nu, double tol = 1e-13);

struct StokesEstimate {
    CMat S;
    double spread = 0.0;
    int nu = 0;
    std::vector<CMat> samples;
};

// S_nu = Y_nu^{-1} Y_{nu+mu} sampled on the bisector of S(tau_nu, tau_{nu+1})
StokesEstimate stokes_direct(const RankOneSystem& sys, double eta, double tol = 1e-13);
StokesEstimate stokes_direct(const SectorSolution& a, const SectorSolution& b);

// normalization e^{lambda_k z} z^{lambda'_k} on the cover
cplx column_scale(const RankOneSystem& sys, int k, ZPoint z);

struct LaplaceOptions {
    // use the ray form along L_k for lambda'_k in Z_{<0}, otherwise the loop form
    bool ray_form = true;
    double tol = 1e-12;
};

CVec laplace_column(const RankOneSystem& sys, double eta, const std::vector<LocalBasis>& bases, int k,
                    ZPoint z, const LaplaceOptions& opt = {});

}  // namespace mono::oracle
