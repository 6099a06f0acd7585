#pragma once

#include <map>

#include "monodromy/continuation.hpp"

namespace mono {

cplx alpha(cplx lp);
cplx beta(cplx lp);

struct MonodromyMatrices {
    std::vector<CMat> M;
    std::vector<CMat> M_inv;
};

MonodromyMatrices monodromy_matrices(const CMat& C, const std::vector<cplx>& lp);

// throws Unavailable when A1 has an eigenvalue within 1e-8 of a negative integer
std::vector<CMat> mstar_matrices(const CMat& C, const std::vector<cplx>& lp,
                                 const std::vector<cplx>& a1_eigs);

CMat stokes_plus(const CMat& C, const std::vector<cplx>& lp, const DirectionFrame& fr);
CMat stokes_minus_inv(const CMat& C, const std::vector<cplx>& lp, const DirectionFrame& fr);

// C_nu must be computed in a frame whose eta lies in (eta_{nu+1}, eta_nu)
CMat stokes_factor(const RankOneSystem& sys, const CMat& C_nu, const DirectionFrame& fr_nu, int nu);

struct TraceTable {
    CVec tr;
    CVec tr_closed;
    CMat tr_pair;
    CMat tr_pair_closed;
    double max_diff = 0.0;
};

TraceTable trace_invariants(const std::vector<CMat>& M, const std::vector<cplx>& lp,
                            const CMat& S_plus, const CMat& S_minus_inv, const DirectionFrame& fr);

CMat eta_shift(const CMat& C, const std::vector<cplx>& lp);

struct InfinityReport {
    CMat M_inf;
    std::vector<cplx> eigenvalues;
    std::vector<cplx> expected;
    double mismatch = 0.0;
    bool fundamental = true;
};

// product M_{o_n} ... M_{o_1} with o_1 the pole whose cut lies furthest to the right
InfinityReport monodromy_at_infinity(const std::vector<CMat>& M, const DirectionFrame& fr, const CMat& a1);

// smallest total distance matching of two small spectra
double spectrum_mismatch(const std::vector<cplx>& a, const std::vector<cplx>& b);

struct MonodromyData {
    std::vector<CMat> M;
    std::vector<CMat> M_inv;
    bool has_M_star = false;
    std::string M_star_note;
    std::vector<CMat> M_star;
    CMat S_plus;
    CMat S_minus_inv;
    std::map<int, CMat> W;
    std::vector<cplx> lambda_prime;
    std::vector<cplx> alpha;
    std::vector<cplx> beta;
    TraceTable traces;
    InfinityReport infinity;
    std::vector<bool> zero_rows;
    std::vector<bool> zero_cols;
    bool integer_eigenvalue = false;
};

MonodromyData assemble_monodromy(const RankOneSystem& sys, const DirectionFrame& fr, const ConnectionMatrix& C);

}  // namespace mono
