#pragma once

// Independent reference computations for the test suite. Nothing here calls
// into the frame or invariant code.

#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "blochobs/types.hpp"

namespace oracle {

using blochobs::CMatrix;
using blochobs::cplx;

// Signed solid angle of the spherical triangle (a, b, c), unit vectors.
inline double solid_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
    const double num = a.dot(b.cross(c));
    const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    return 2.0 * std::atan2(num, den);
}

// Degree of k -> d(k)/|d(k)| on the torus, triangulated on an N x N grid with
// counterclockwise triangles.
template <class D>
double sphere_degree(D&& d, int n) {
    const auto unit = [&](int i, int j) {
        const Eigen::Vector3d v = d(static_cast<double>(i) / n, static_cast<double>(j) / n);
        return Eigen::Vector3d(v.normalized());
    };
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto p00 = unit(i, j), p10 = unit(i + 1, j), p11 = unit(i + 1, j + 1), p01 = unit(i, j + 1);
            total += solid_angle(p00, p10, p11) + solid_angle(p00, p11, p01);
        }
    }
    return total / (4.0 * blochobs::kPi);
}

inline CMatrix random_unitary(std::mt19937_64& rng, int m) {
    std::normal_distribution<double> g;
    CMatrix a(m, m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) a(r, c) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<CMatrix> qr(a);
    return qr.householderQ() * CMatrix::Identity(m, m);
}

inline CMatrix random_hermitian(std::mt19937_64& rng, int m, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    CMatrix a(m, m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) a(r, c) = cplx(g(rng), g(rng));
    return 0.5 * (a + a.adjoint());
}

inline nlohmann::json complex_json(const CMatrix& x) {
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        nlohmann::json rr = nlohmann::json::array(), ir = nlohmann::json::array();
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            rr.push_back(x(r, c).real());
            ir.push_back(x(r, c).imag());
        }
        re.push_back(rr);
        im.push_back(ir);
    }
    return {{"re", re}, {"im", im}};
}

// Square-lattice BHZ hopping file, basis (s up, p up, s down, p down):
// h(k) = A sin k1 sx + A sin k2 sy + (M - 2B (2 - cos k1 - cos k2)) sz, lower
// block conj(h(-k)). Band inversion for 0 < M / B < 4.
inline nlohmann::json bhz_file(double mass, double a = 1.0, double b = 1.0) {
    const cplx i1(0.0, 1.0);
    CMatrix sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sy << 0, -i1, i1, 0;
    sz << 1, 0, 0, -1;
    const auto block = [](const CMatrix& h) {
        CMatrix out = CMatrix::Zero(4, 4);
        out.topLeftCorner(2, 2) = h;
        out.bottomRightCorner(2, 2) = h.conjugate();
        return out;
    };
    nlohmann::json hops = nlohmann::json::array();
    const auto add = [&](int l1, int l2, const CMatrix& h) {
        nlohmann::json e = complex_json(block(h));
        e["R"] = {l1, l2};
        hops.push_back(e);
    };
    add(0, 0, (mass - 4.0 * b) * sz);
    add(1, 0, a / (2.0 * i1) * sx + b * sz);
    add(-1, 0, -a / (2.0 * i1) * sx + b * sz);
    add(0, 1, a / (2.0 * i1) * sy + b * sz);
    add(0, -1, -a / (2.0 * i1) * sy + b * sz);

    CMatrix u = CMatrix::Zero(4, 4);
    u(2, 0) = 1.0;
    u(3, 1) = 1.0;
    u(0, 2) = -1.0;
    u(1, 3) = -1.0;
    CMatrix eps(2, 2);
    eps << 0, 1, -1, 0;
    nlohmann::json lattice = {{1.0, 0.0}, {0.0, 1.0}};
    return {{"n", 4}, {"m", 2}, {"lattice", lattice}, {"hoppings", hops},
            {"trs", {{"u_theta", complex_json(u)}, {"epsilon", complex_json(eps)}}}};
}

}  // namespace oracle
