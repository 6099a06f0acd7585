#pragma once

#include "monodromy/local.hpp"

namespace mono {

struct ContinuationPath {
    double eta = 0.0;
    std::vector<BranchPoint> waypoints;
    double clearance = 0.0;
};

ContinuationPath plan_path(const RankOneSystem& sys, const DirectionFrame& fr, int k, int j);
double path_clearance(const RankOneSystem& sys, double eta, const std::vector<cplx>& points,
                      int skip_start_pole, int skip_end_pole);

struct Continued {
    CMat value;
    double err = 0.0;
    BranchPoint end;
};

// Taylor stepping of (A0 - lambda) Psi' = (A1 + I) Psi along straight segments.
// Args are carried continuously, so a closed loop around a pole shifts its arg by 2 pi.
Continued transport(const RankOneSystem& sys, const BranchPoint& start, const CMat& value,
                    const std::vector<cplx>& polyline, double tol);

Continued continue_vector(const RankOneSystem& sys, const BranchPoint& start, const CVec& value,
                          const ContinuationPath& path, double tol);

// local Taylor data of one step: Psi(center + t) = sum coef[m] t^m for |t| <= |h|
struct TaylorPiece {
    cplx center;
    cplx h;
    std::vector<CMat> coef;
    CMat eval(cplx t) const;
};

std::vector<TaylorPiece> taylor_pieces(const RankOneSystem& sys, cplx from, const CMat& value,
                                       cplx to, double tol, double max_step);

struct ConnectionMatrix {
    CMat c;
    double eta = 0.0;
    Eigen::MatrixXd err;
    std::vector<bool> zero_rows;
    std::vector<bool> zero_cols;
    // A1 has an eigenvalue within 1e-8 of an integer
    bool integer_eigenvalue = false;
};

struct CoefficientResult {
    cplx value;
    double err = 0.0;
};

CoefficientResult connection_coefficient(const RankOneSystem& sys, const DirectionFrame& fr,
                                         const std::vector<LocalBasis>& bases, int k, int j,
                                         double tol = 1e-12);

ConnectionMatrix connection_matrix(const RankOneSystem& sys, const DirectionFrame& fr,
                                   const std::vector<LocalBasis>& bases, double tol = 1e-12);

std::vector<LocalBasis> build_all_bases(const RankOneSystem& sys, int order = 80);

// starting point of Psi_k: half radius from lambda_k in the direction eta - pi
cplx start_point(const RankOneSystem& sys, const LocalBasis& b, double eta, double offset = 0.0);

}  // namespace mono
