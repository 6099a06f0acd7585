#pragma once

#include "monodromy/types.hpp"

namespace mono {

struct RankOneSystem {
    int n = 0;
    std::vector<cplx> lambda;
    CMat a1;
    std::vector<cplx> lambda_prime;

    double min_separation() const;
    double min_separation(int k) const;
};

RankOneSystem validate_system(int n, const std::vector<cplx>& lambda, const CMat& a1);

struct DirectionFrame {
    double eta = 0.0;
    // fundamental window (-pi/2, 3pi/2], decreasing
    std::vector<double> criticals;
    int m = 0;
    int mu = 0;
    std::vector<double> tau;
    // eta lies in (eta_{nu+1}, eta_nu)
    int nu = 0;
    Eigen::MatrixXd eta_jk;
    // prec(j,k) true iff j precedes k
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> prec;

    double critical(int index) const;
    double tau_at(int index) const { return 1.5 * kPi - critical(index); }
    bool precedes(int j, int k) const { return prec(j, k); }
    // poles sorted so that earlier entries precede later ones; ties by index
    std::vector<int> dominance_order() const;
};

DirectionFrame critical_directions(const RankOneSystem& sys);
DirectionFrame frame(const RankOneSystem& sys, double eta);

// index nu with eta_{nu+1} < eta < eta_nu; eta must not be critical
int critical_index(const DirectionFrame& skeleton, double eta);
// midpoint of the widest gap between consecutive critical values
double default_eta(const RankOneSystem& sys);
// midpoint of (eta_{index+1}, eta_index)
double interval_midpoint(const DirectionFrame& skeleton, int index);

struct BranchPoint {
    cplx value;
    std::vector<double> args;
};

// determination of an angle in (eta - 2pi, eta]
double wrap_below(double angle, double eta);
BranchPoint branch_point(const RankOneSystem& sys, double eta, cplx value);

}  // namespace mono
