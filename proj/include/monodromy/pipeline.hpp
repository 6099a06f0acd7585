#pragma once

#include "monodromy/monodromy.hpp"

namespace mono {

struct Analysis {
    RankOneSystem sys;
    DirectionFrame fr;
    std::vector<LocalBasis> bases;
    ConnectionMatrix C;
    MonodromyData data;
};

ConnectionMatrix connection_at(const RankOneSystem& sys, const std::vector<LocalBasis>& bases, double eta,
                               double tol = 1e-12);

// W_{nu'} for nu' = first .. last, each from C recomputed inside its own interval
std::map<int, CMat> stokes_factors(const RankOneSystem& sys, const std::vector<LocalBasis>& bases,
                                   const DirectionFrame& fr, int first, int last, double tol = 1e-12);

// product (W_{nu+mu} ... W_{nu+1})^{-1}
CMat factor_product_inverse(const std::map<int, CMat>& W, int nu, int mu);

Analysis analyze(const RankOneSystem& sys, double eta, int order = 80, double tol = 1e-12,
                 bool with_factors = true);

}  // namespace mono
