#pragma once

#include "monodromy/oracle.hpp"
#include "quad.hpp"

namespace mono::oracle {

class SectorSolutionImpl {
public:
    RankOneSystem sys;
    quad::QSystem qs;
    int nu = 0;
    double eta = 0.0;
    double lo = 0.0, hi = 0.0;
    std::vector<AnchorInfo> anchors;
    double rb = 1.0, theta_b = 0.0;
    quad::qcplx shift;
    // Y at the base point with e^{shift z} removed
    quad::QMat base;
    double predicted = 0.0;

    quad::QMat eval_q(ZPoint z) const;
};

}  // namespace mono::oracle
