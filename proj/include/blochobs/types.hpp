#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace blochobs {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Crystal momentum in lattice coordinates, k = k1 e1 + k2 e2.
struct Momentum {
    double k1 = 0.0;
    double k2 = 0.0;

    friend Momentum operator+(Momentum a, Momentum b) { return {a.k1 + b.k1, a.k2 + b.k2}; }
    friend Momentum operator-(Momentum a, Momentum b) { return {a.k1 - b.k1, a.k2 - b.k2}; }
    friend Momentum operator-(Momentum a) { return {-a.k1, -a.k2}; }
    friend bool operator==(const Momentum&, const Momentum&) = default;
};

/// Integer lattice vector (coefficients on the generators).
struct LatticeVector {
    int l1 = 0;
    int l2 = 0;

    friend bool operator==(const LatticeVector&, const LatticeVector&) = default;
};

}  // namespace blochobs
