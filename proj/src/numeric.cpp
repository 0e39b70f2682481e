#include "blochobs/numeric.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "blochobs/error.hpp"

namespace blochobs {

namespace {

// Eigenvalues of -1 computed as exp(-i(pi - delta)) with delta at roundoff
// level are the cut point itself and belong to +pi.
constexpr double kCutRoundoff = 1e-12;

}  // namespace

EigenSystem hermitian_eig(const CMatrix& h, const Tolerances& tol) {
    if (h.rows() != h.cols() || h.rows() == 0) {
        throw Error(ErrorKind::InvalidArgument, "hermitian_eig expects a non-empty square matrix");
    }
    const double scale = std::max(1.0, h.norm());
    const double asym = (h - h.adjoint()).norm();
    if (asym > tol.herm * scale) {
        throw Error(ErrorKind::NotHermitian,
                    "anti-Hermitian residual " + std::to_string(asym / scale));
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::NoConvergence, "Hermitian eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix loewdin_frame(const CMatrix& w, const Tolerances& tol) {
    if (w.cols() == 0 || w.rows() < w.cols()) {
        throw Error(ErrorKind::InvalidArgument, "loewdin_frame expects n x m with n >= m > 0");
    }
    const CMatrix s = w.adjoint() * w;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(s);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::NoConvergence, "overlap eigensolver did not converge");
    }
    const RVector& sv2 = solver.eigenvalues();
    const double smallest = std::sqrt(std::max(sv2.minCoeff(), 0.0));
    if (smallest <= tol.rank) {
        throw Error(ErrorKind::RankDeficient,
                    "smallest singular value " + std::to_string(smallest));
    }
    const RVector inv_sqrt = sv2.cwiseSqrt().cwiseInverse();
    const CMatrix& q = solver.eigenvectors();
    return w * (q * inv_sqrt.asDiagonal() * q.adjoint());
}

double unitarity_residual(const CMatrix& u) {
    return (u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols())).norm();
}

CMatrix HermitianLog::exp_i(double alpha) const {
    CVector d(phases.size());
    for (Eigen::Index j = 0; j < phases.size(); ++j) {
        d(j) = std::polar(1.0, alpha * phases(j));
    }
    return basis * d.asDiagonal() * basis.adjoint();
}

HermitianLog principal_log_unitary(const CMatrix& u, const Tolerances& tol) {
    if (u.rows() != u.cols() || u.rows() == 0) {
        throw Error(ErrorKind::InvalidArgument, "principal_log_unitary expects a square matrix");
    }
    const double res = unitarity_residual(u);
    if (res > tol.unitary) {
        throw Error(ErrorKind::NotUnitary, "unitarity residual " + std::to_string(res));
    }
    // A unitary matrix is normal, so its Schur form is diagonal up to roundoff
    // and the Schur vectors diagonalize it.
    Eigen::ComplexSchur<CMatrix> schur(u);
    if (schur.info() != Eigen::Success) {
        throw Error(ErrorKind::NoConvergence, "Schur decomposition did not converge");
    }
    const CMatrix& q = schur.matrixU();
    const CMatrix& r = schur.matrixT();

    HermitianLog out;
    out.basis = q;
    out.phases.resize(u.rows());
    out.branch_margin = kPi;
    for (Eigen::Index j = 0; j < u.rows(); ++j) {
        double theta = std::arg(r(j, j));
        if (theta < -kPi + kCutRoundoff) {
            theta = kPi;
        } else if (theta < -kPi + tol.branch) {
            throw Error(ErrorKind::BranchAmbiguous,
                        "eigenphase " + std::to_string(theta) + " lies inside the branch band");
        }
        out.phases(j) = theta;
        out.branch_margin = std::min(out.branch_margin, kPi - std::abs(theta));
    }
    out.T = q * out.phases.asDiagonal() * q.adjoint();
    out.T = 0.5 * (out.T + out.T.adjoint()).eval();

    const double err = (out.exp_i(1.0) - u).norm();
    if (err > std::max(tol.exp, 10.0 * res)) {
        throw Error(ErrorKind::NoConvergence, "exp(iT) mismatch " + std::to_string(err));
    }
    return out;
}

CMatrix expi_hermitian(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (h + h.adjoint()));
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::NoConvergence, "Hermitian eigensolver did not converge");
    }
    const RVector& e = solver.eigenvalues();
    CVector d(e.size());
    for (Eigen::Index j = 0; j < e.size(); ++j) d(j) = std::polar(1.0, e(j));
    const CMatrix& v = solver.eigenvectors();
    return v * d.asDiagonal() * v.adjoint();
}

GaugeOverlap overlap_gauge(const CMatrix& a, const CMatrix& b, const Tolerances& tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorKind::InvalidArgument, "overlap_gauge: frame shapes differ");
    }
    GaugeOverlap g{a.adjoint() * b, 0.0};
    g.residual = unitarity_residual(g.u);
    if (g.residual > tol.gauge) {
        throw Error(ErrorKind::SubspaceMismatch,
                    "overlap unitarity residual " + std::to_string(g.residual));
    }
    return g;
}

double det_phase_step(const CMatrix& a, const CMatrix& b) {
    return std::arg(b.determinant() * std::conj(a.determinant()));
}

Winding det_phase_winding(std::span<const CMatrix> loop, const Tolerances& tol) {
    if (loop.size() < 2) {
        throw Error(ErrorKind::InvalidArgument, "winding needs at least two nodes");
    }
    if ((loop.front() - loop.back()).norm() > tol.loop) {
        throw Error(ErrorKind::InvalidArgument, "loop is not closed");
    }
    Winding w{0, 0.0, 0.0};
    for (std::size_t j = 0; j + 1 < loop.size(); ++j) {
        const double step = det_phase_step(loop[j], loop[j + 1]);
        w.raw += step;
        w.max_step = std::max(w.max_step, std::abs(step));
    }
    w.raw /= kTwoPi;
    if (w.max_step >= kPi / 2) {
        throw Error(ErrorKind::StepTooLarge,
                    "det phase step " + std::to_string(w.max_step) + " >= pi/2");
    }
    const double nearest = std::round(w.raw);
    if (std::abs(w.raw - nearest) >= tol.snap) {
        throw Error(ErrorKind::SnapFailed, "winding " + std::to_string(w.raw) + " not integral");
    }
    w.degree = static_cast<int>(nearest);
    return w;
}

}  // namespace blochobs
