#include "blochobs/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "blochobs/error.hpp"
#include "blochobs/numeric.hpp"

namespace blochobs {

namespace {

constexpr double kStructTol = 1e-10;

CMatrix pauli(int which) {
    CMatrix s = CMatrix::Zero(2, 2);
    const cplx i{0.0, 1.0};
    switch (which) {
        case 0: s(0, 0) = 1.0; s(1, 1) = 1.0; break;
        case 1: s(0, 1) = 1.0; s(1, 0) = 1.0; break;
        case 2: s(0, 1) = -i; s(1, 0) = i; break;
        case 3: s(0, 0) = 1.0; s(1, 1) = -1.0; break;
    }
    return s;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Kramers partner map on one spin-1/2: [[0, -1], [1, 0]].
CMatrix spin_time_reversal() {
    CMatrix u = CMatrix::Zero(2, 2);
    u(0, 1) = -1.0;
    u(1, 0) = 1.0;
    return u;
}

using HoppingMap = std::map<std::pair<int, int>, CMatrix>;

void add_term(HoppingMap& terms, int n, LatticeVector r, int a, int b, cplx amp) {
    auto [it, inserted] = terms.try_emplace({r.l1, r.l2}, CMatrix::Zero(n, n));
    if (r.l1 == 0 && r.l2 == 0 && a == b) {
        it->second(a, a) += std::real(amp);
        return;
    }
    it->second(a, b) += amp;
    auto [jt, _] = terms.try_emplace({-r.l1, -r.l2}, CMatrix::Zero(n, n));
    jt->second(b, a) += std::conj(amp);
}

std::vector<Hopping> to_hoppings(const HoppingMap& terms) {
    std::vector<Hopping> out;
    for (const auto& [r, h] : terms) {
        if (h.cwiseAbs().maxCoeff() == 0.0) continue;
        out.push_back({{r.first, r.second}, h});
    }
    return out;
}

// Honeycomb geometry in lattice coordinates. A(0) has B neighbours in cells
// (0,0), (-1,0), (0,1); the A-A next-nearest vectors a1, a2, a3 = -a1-a2 sit at
// mutual 120 degrees and share one sense of rotation.
constexpr std::array<LatticeVector, 3> kNearestCells{{{0, 0}, {-1, 0}, {0, 1}}};
constexpr std::array<LatticeVector, 3> kNextNearest{{{1, 0}, {0, 1}, {-1, -1}}};

// Real-space bond directions for the nearest-neighbour cells above, with
// a1 = (1, 0), a2 = (-1/2, sqrt 3/2) and B(0) = A(0) + (a1 - a2)/3.
std::array<Eigen::Vector2d, 3> nearest_bond_directions() {
    const Eigen::Vector2d a1(1.0, 0.0);
    const Eigen::Vector2d a2(-0.5, std::sqrt(3.0) / 2.0);
    const Eigen::Vector2d d0 = (a1 - a2) / 3.0;
    std::array<Eigen::Vector2d, 3> d{d0, d0 - a1, d0 + a2};
    for (auto& v : d) v.normalize();
    return d;
}

Eigen::Matrix2d honeycomb_reciprocal() {
    // rows are e1, e2 with e_i . a_j = delta_ij
    Eigen::Matrix2d a;
    a << 1.0, 0.0, -0.5, std::sqrt(3.0) / 2.0;
    return a.inverse().transpose();
}

}  // namespace

CMatrix symplectic_normal_form(int m) {
    CMatrix eps = CMatrix::Zero(m, m);
    for (int a = 0; a + 1 < m; a += 2) {
        eps(a, a + 1) = 1.0;
        eps(a + 1, a) = -1.0;
    }
    return eps;
}

BlochModel::BlochModel(int n, int m, std::vector<Hopping> hoppings, Eigen::Matrix2d lattice,
                       std::optional<std::array<CMatrix, 2>> tau, std::optional<TimeReversal> trs)
    : n_(n), m_(m), hoppings_(std::move(hoppings)), lattice_(lattice), tau_(std::move(tau)),
      trs_(std::move(trs)) {
    if (n_ <= 0 || m_ <= 0 || m_ >= n_) {
        throw Error(ErrorKind::InvalidArgument, "need 0 < m < n");
    }
    if (tau_) {
        Tolerances loose;
        loose.unitary = 1e-6;
        for (int j = 0; j < 2; ++j) {
            if ((*tau_)[j].rows() != n_ || (*tau_)[j].cols() != n_) {
                throw Error(ErrorKind::InvalidArgument, "tau has wrong shape");
            }
            tau_log_[j] = principal_log_unitary((*tau_)[j], loose).T;
        }
    }
}

CMatrix BlochModel::tau_generator(int j) const {
    if (!tau_) return CMatrix::Identity(n_, n_);
    return (*tau_)[j];
}

CMatrix BlochModel::tau(LatticeVector lambda) const {
    CMatrix out = CMatrix::Identity(n_, n_);
    if (!tau_) return out;
    const std::array<int, 2> powers{lambda.l1, lambda.l2};
    for (int j = 0; j < 2; ++j) {
        const CMatrix step = powers[j] >= 0 ? (*tau_)[j] : CMatrix((*tau_)[j].adjoint());
        for (int p = 0; p < std::abs(powers[j]); ++p) out = out * step;
    }
    return out;
}

CMatrix BlochModel::hamiltonian(Momentum k) const {
    CMatrix h = CMatrix::Zero(n_, n_);
    for (const auto& hop : hoppings_) {
        const double phase = kTwoPi * (k.k1 * hop.r.l1 + k.k2 * hop.r.l2);
        h += std::polar(1.0, phase) * hop.h;
    }
    if (tau_) {
        const CMatrix d = expi_hermitian(k.k1 * tau_log_[0] + k.k2 * tau_log_[1]);
        h = d * h * d.adjoint();
    }
    return h;
}

CMatrix BlochModel::apply_theta(const CMatrix& frame) const {
    if (!trs_) throw Error(ErrorKind::NoTrs, "model has no time-reversal data");
    return trs_->u_theta * frame.conjugate();
}

BlochModel BlochModel::with_trs(std::optional<TimeReversal> trs) const {
    return BlochModel(n_, m_, hoppings_, lattice_, tau_, std::move(trs));
}

void BlochModel::validate(bool check_epsilon) const {
    if (hoppings_.empty()) throw Error(ErrorKind::InvalidArgument, "empty hopping list");
    HoppingMap terms;
    for (std::size_t idx = 0; idx < hoppings_.size(); ++idx) {
        const auto& hop = hoppings_[idx];
        if (hop.h.rows() != n_ || hop.h.cols() != n_) {
            throw Error(ErrorKind::InvalidArgument,
                        "hopping " + std::to_string(idx) + " is not n x n");
        }
        if (!hop.h.allFinite()) {
            throw Error(ErrorKind::InvalidArgument,
                        "hopping " + std::to_string(idx) + " has non-finite entries");
        }
        auto [it, inserted] = terms.try_emplace({hop.r.l1, hop.r.l2}, CMatrix::Zero(n_, n_));
        it->second += hop.h;
    }
    for (const auto& [r, h] : terms) {
        const auto partner = terms.find({-r.first, -r.second});
        const double scale = std::max(1.0, h.norm());
        const CMatrix expected = h.adjoint();
        const double res = partner == terms.end() ? expected.norm()
                                                  : (partner->second - expected).norm();
        if (res > kStructTol * scale) {
            throw Error(ErrorKind::HermiticityViolation,
                        "H_{-R} != H_R^dag at R = (" + std::to_string(r.first) + ", " +
                            std::to_string(r.second) + ")");
        }
    }
    if (tau_) {
        const CMatrix& t1 = (*tau_)[0];
        const CMatrix& t2 = (*tau_)[1];
        if (unitarity_residual(t1) > kStructTol || unitarity_residual(t2) > kStructTol) {
            throw Error(ErrorKind::InvalidArgument, "tau is not unitary");
        }
        if ((t1 * t2 - t2 * t1).norm() > kStructTol) {
            throw Error(ErrorKind::InvalidArgument, "tau generators do not commute");
        }
    }
    if (trs_) {
        const CMatrix& u = trs_->u_theta;
        const CMatrix& eps = trs_->epsilon;
        if (u.rows() != n_ || u.cols() != n_) {
            throw Error(ErrorKind::TrsInconsistent, "u_theta is not n x n");
        }
        if (unitarity_residual(u) > kStructTol) {
            throw Error(ErrorKind::TrsInconsistent, "u_theta is not unitary");
        }
        if ((u * u.conjugate() + CMatrix::Identity(n_, n_)).norm() > kStructTol) {
            throw Error(ErrorKind::TrsInconsistent, "Theta^2 != -1");
        }
        if (m_ % 2 != 0) {
            throw Error(ErrorKind::TrsInconsistent, "odd occupied rank with fermionic time reversal");
        }
        if (eps.rows() != m_ || eps.cols() != m_) {
            throw Error(ErrorKind::TrsInconsistent, "epsilon is not m x m");
        }
        if (check_epsilon &&
            (unitarity_residual(eps) > kStructTol || (eps + eps.transpose()).norm() > kStructTol)) {
            throw Error(ErrorKind::TrsInconsistent, "epsilon is not unitary skew-symmetric");
        }
        for (int j = 0; j < 2; ++j) {
            const CMatrix t = tau_generator(j);
            if ((u * t.conjugate() * u.adjoint() - t.adjoint()).norm() > kStructTol) {
                throw Error(ErrorKind::TrsInconsistent, "Theta tau != tau^{-1} Theta");
            }
        }
    }
}

BlochModel haldane(double t1, double t2, double phi, double mass) {
    if (t1 == 0.0) throw Error(ErrorKind::InvalidArgument, "haldane: t1 must be non-zero");
    constexpr int A = 0, B = 1;
    HoppingMap terms;
    for (auto r : kNearestCells) add_term(terms, 2, r, A, B, t1);
    for (auto r : kNextNearest) {
        add_term(terms, 2, r, A, A, t2 * std::polar(1.0, phi));
        add_term(terms, 2, r, B, B, t2 * std::polar(1.0, -phi));
    }
    add_term(terms, 2, {0, 0}, A, A, mass);
    add_term(terms, 2, {0, 0}, B, B, -mass);
    BlochModel model(2, 1, to_hoppings(terms), honeycomb_reciprocal());
    model.validate();
    return model;
}

BlochModel kane_mele(double t, double lso, double lr, double lv) {
    if (t == 0.0) throw Error(ErrorKind::InvalidArgument, "kane_mele: t must be non-zero");
    const cplx i{0.0, 1.0};
    const auto dirs = nearest_bond_directions();
    HoppingMap terms;
    auto add_block = [&](LatticeVector r, int sa, int sb, const CMatrix& blk) {
        for (int s = 0; s < 2; ++s)
            for (int q = 0; q < 2; ++q)
                if (blk(s, q) != 0.0) add_term(terms, 4, r, 2 * sa + s, 2 * sb + q, blk(s, q));
    };
    for (std::size_t b = 0; b < kNearestCells.size(); ++b) {
        const CMatrix rashba =
            i * lr * (pauli(1) * dirs[b].y() - pauli(2) * dirs[b].x());
        add_block(kNearestCells[b], 0, 1, t * pauli(0) + rashba);
    }
    for (auto r : kNextNearest) {
        add_block(r, 0, 0, i * lso * pauli(3));
        add_block(r, 1, 1, -i * lso * pauli(3));
    }
    for (int s = 0; s < 2; ++s) {
        add_term(terms, 4, {0, 0}, s, s, lv);
        add_term(terms, 4, {0, 0}, 2 + s, 2 + s, -lv);
    }
    TimeReversal trs{kron(pauli(0), spin_time_reversal()), symplectic_normal_form(2)};
    BlochModel model(4, 2, to_hoppings(terms), honeycomb_reciprocal(), std::nullopt, trs);
    model.validate();
    return model;
}

BlochModel atomic_insulator(int n, int m, bool with_trs) {
    if (m <= 0 || m >= n) throw Error(ErrorKind::InvalidArgument, "atomic_insulator: need 0 < m < n");
    CMatrix h = CMatrix::Zero(n, n);
    for (int a = 0; a < n; ++a) h(a, a) = a < m ? -1.0 : 1.0;
    std::optional<TimeReversal> trs;
    if (with_trs) {
        if (n % 2 != 0 || m % 2 != 0) {
            throw Error(ErrorKind::InvalidArgument, "atomic_insulator: trs needs even n and m");
        }
        trs = TimeReversal{kron(CMatrix::Identity(n / 2, n / 2), spin_time_reversal()),
                           symplectic_normal_form(m)};
    }
    BlochModel model(n, m, {{{0, 0}, h}}, Eigen::Matrix2d::Identity(), std::nullopt, trs);
    model.validate();
    return model;
}

Eigen::Vector3d two_band_winding_d(int w, Momentum k) {
    const int p = w == 0 ? 1 : std::abs(w);
    const double sense = w < 0 ? -1.0 : 1.0;
    const double mu = w == 0 ? 3.0 : 1.0;
    const double x = kTwoPi * k.k1;
    const double y = kTwoPi * k.k2;
    const cplx f = std::pow(cplx(std::sin(x), sense * std::sin(y)), p);
    return {f.real(), f.imag(), mu + std::cos(x) + std::cos(y)};
}

BlochModel two_band_winding(int w) {
    if (w < -2 || w > 2) throw Error(ErrorKind::InvalidArgument, "two_band_winding: |w| <= 2");
    // d is a trigonometric polynomial of degree <= 2 in each direction; an
    // 8 x 8 discrete Fourier transform recovers its coefficients exactly.
    constexpr int grid = 8;
    constexpr int reach = 2;
    const std::array<CMatrix, 3> sigma{pauli(1), pauli(2), pauli(3)};
    std::vector<CMatrix> samples;
    samples.reserve(grid * grid);
    for (int a = 0; a < grid; ++a) {
        for (int b = 0; b < grid; ++b) {
            const auto d = two_band_winding_d(w, {double(a) / grid, double(b) / grid});
            samples.push_back(d(0) * sigma[0] + d(1) * sigma[1] + d(2) * sigma[2]);
        }
    }
    std::vector<Hopping> hops;
    for (int r1 = -reach; r1 <= reach; ++r1) {
        for (int r2 = -reach; r2 <= reach; ++r2) {
            CMatrix h = CMatrix::Zero(2, 2);
            for (int a = 0; a < grid; ++a)
                for (int b = 0; b < grid; ++b)
                    h += std::polar(1.0, -kTwoPi * (a * r1 + b * r2) / grid) * samples[a * grid + b];
            h /= double(grid * grid);
            h = h.unaryExpr([](cplx z) {
                return cplx(std::abs(z.real()) < 1e-14 ? 0.0 : z.real(),
                            std::abs(z.imag()) < 1e-14 ? 0.0 : z.imag());
            });
            if (h.cwiseAbs().maxCoeff() > 0.0) hops.push_back({{r1, r2}, h});
        }
    }
    BlochModel model(2, 1, std::move(hops));
    model.validate();
    return model;
}

ProjectorSample fermi_projector(const BlochModel& model, Momentum k, const Tolerances& tol) {
    const auto es = hermitian_eig(model.hamiltonian(k), tol);
    const int m = model.occupied();
    const double gap = es.values(m) - es.values(m - 1);
    if (!(gap > tol.gap)) {
        throw Error(ErrorKind::GapClosed,
                    "direct gap " + std::to_string(gap) + " at k = (" + std::to_string(k.k1) +
                        ", " + std::to_string(k.k2) + ")",
                    k);
    }
    ProjectorSample s;
    s.k = k;
    s.states = es.vectors.leftCols(m);
    s.p = s.states * s.states.adjoint();
    s.gap = gap;
    s.occupied_energies = es.values.head(m);
    return s;
}

SymmetryReport verify_symmetries(const BlochModel& model, int grid_n, const Tolerances& tol) {
    if (grid_n < 1) throw Error(ErrorKind::InvalidArgument, "grid must be positive");
    SymmetryReport rep{grid_n, 0.0, 0.0, std::nullopt, std::nullopt, 1e-8, false};
    const auto& trs = model.trs();
    const CMatrix t1 = model.tau_generator(0);
    const CMatrix t2 = model.tau_generator(1);
    // Hermiticity is checked here directly; relax the eigensolver guard so a
    // broken model still yields a report instead of an exception.
    Tolerances loose = tol;
    loose.herm = 1e300;
    double trs_res = 0.0;
    for (int a = 0; a < grid_n; ++a) {
        for (int b = 0; b < grid_n; ++b) {
            const Momentum k{double(a) / grid_n - 0.5, double(b) / grid_n - 0.5};
            const CMatrix h = model.hamiltonian(k);
            rep.hermiticity_residual = std::max(rep.hermiticity_residual, (h - h.adjoint()).norm());
            const CMatrix p = fermi_projector(model, k, loose).p;
            const CMatrix p1 = fermi_projector(model, k + Momentum{1.0, 0.0}, loose).p;
            const CMatrix p2 = fermi_projector(model, k + Momentum{0.0, 1.0}, loose).p;
            rep.covariance_residual = std::max(
                {rep.covariance_residual, (p1 - t1 * p * t1.adjoint()).norm(),
                 (p2 - t2 * p * t2.adjoint()).norm()});
            if (trs) {
                const CMatrix pm = fermi_projector(model, -k, loose).p;
                const CMatrix img = trs->u_theta * p.conjugate() * trs->u_theta.adjoint();
                trs_res = std::max(trs_res, (pm - img).norm());
            }
        }
    }
    bool pass = rep.hermiticity_residual < rep.threshold && rep.covariance_residual < rep.threshold;
    if (trs) {
        rep.trs_residual = trs_res;
        const CMatrix& u = trs->u_theta;
        rep.fermionic_residual =
            (u * u.conjugate() + CMatrix::Identity(u.rows(), u.cols())).norm();
        pass = pass && trs_res < rep.threshold && *rep.fermionic_residual < rep.threshold;
    }
    rep.pass = pass;
    return rep;
}

}  // namespace blochobs
