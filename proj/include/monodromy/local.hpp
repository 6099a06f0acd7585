#pragma once

#include <optional>

#include "monodromy/core.hpp"

namespace mono {

enum class CaseKind { Generic, Jordan, ResonantNonneg, ResonantNeg };

struct CaseTag {
    CaseKind kind = CaseKind::Generic;
    int N = 0;  // integer value of lambda' for the resonant kinds
};

CaseTag classify(cplx lambda_prime_k);
std::string to_string(const CaseTag& tag);

// u^rho * sum_i coef[i] * u^(m0 + i)
struct PowerSeries {
    cplx rho = 0.0;
    int m0 = 0;
    std::vector<CVec> coef;

    CVec eval(double log_abs_u, double arg_u) const;
    CVec eval_derivative(double log_abs_u, double arg_u) const;
};

// main(u) + ln(u) * log_factor(u)
struct LocalColumn {
    PowerSeries main;
    bool has_log = false;
    PowerSeries log_factor;

    CVec eval(double log_abs_u, double arg_u) const;
    CVec eval_derivative(double log_abs_u, double arg_u) const;
};

struct LocalBasis {
    int k = 0;
    CaseTag tag;
    int order = 0;
    cplx center;
    // columns of the local fundamental matrix; column k is the singular one when epsilon = 1
    std::vector<LocalColumn> columns;
    // Psi_k as a series (empty coefficients when Psi_k vanishes)
    PowerSeries psi_k;
    bool psi_k_zero = false;
    // ResonantNonneg: Psi_k = sum_j r_vec[j] psi_j; ResonantNeg: log coefficients r_row
    CVec r_vec;
    CVec r_row;
    std::vector<CVec> poly_P;
    std::vector<CVec> d_series;
    int epsilon = 1;
    double radius = 0.0;
    double tail_bound = 0.0;
    bool near_resonance = false;
};

LocalBasis build_local_basis(const RankOneSystem& sys, int k, int order = 80);

// throws OutOfRadius
CMat eval_fundamental(const LocalBasis& basis, const BranchPoint& p);
CMat eval_fundamental_derivative(const LocalBasis& basis, const BranchPoint& p);
CVec eval_psi_k(const LocalBasis& basis, const BranchPoint& p);
std::optional<CVec> eval_psi_sing(const LocalBasis& basis, const BranchPoint& p);

// tail estimate of the truncated series at distance r from the pole
double tail_estimate(const LocalBasis& basis, double r);

}  // namespace mono
