#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mono {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
inline const cplx kI{0.0, 1.0};

// Every failure carries a short kind tag (DuplicateEigenvalue, OutOfRadius, ...)
// and the module that raised it.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string kind, const std::string& detail)
        : std::runtime_error(module + "/" + kind + ": " + detail),
          module_(std::move(module)), kind_(std::move(kind)) {}

    const std::string& module() const { return module_; }
    const std::string& kind() const { return kind_; }

private:
    std::string module_;
    std::string kind_;
};

inline bool is_integer(cplx v) {
    return v.imag() == 0.0 && v.real() == std::floor(v.real());
}

}  // namespace mono
