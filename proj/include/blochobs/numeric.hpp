#pragma once

#include <span>

#include "blochobs/tolerances.hpp"
#include "blochobs/types.hpp"

// Dense complex linear algebra for the small matrices that appear in Bloch
// Hamiltonians and frame gauges.

namespace blochobs {

struct EigenSystem {
    RVector values;   // ascending
    CMatrix vectors;  // columns, orthonormal
};

/// Eigen-decomposition of a Hermitian matrix. Throws NotHermitian when the
/// relative anti-Hermitian part exceeds tol.herm, NoConvergence otherwise.
EigenSystem hermitian_eig(const CMatrix& h, const Tolerances& tol = {});

/// Closest orthonormal frame to w in Frobenius norm (polar factor w (w^dag w)^{-1/2}).
/// Throws RankDeficient when the smallest singular value is below tol.rank.
CMatrix loewdin_frame(const CMatrix& w, const Tolerances& tol = {});

/// Principal logarithm U = exp(iT) of a unitary matrix.
///
/// Eigenphases are taken in (-pi, pi]. Eigenvalues that are numerically -1
/// (phase within 1e-12 of the cut) are assigned +pi; a phase further inside
/// the band [-pi, -pi + tol.branch) raises BranchAmbiguous.
struct HermitianLog {
    CMatrix T;            // Hermitian generator
    RVector phases;       // eigenvalues of T
    CMatrix basis;        // eigenvectors of T (and of U)
    double branch_margin; // distance of the closest eigenphase to -pi

    /// exp(i * alpha * T), evaluated in the eigenbasis.
    CMatrix exp_i(double alpha) const;
};

HermitianLog principal_log_unitary(const CMatrix& u, const Tolerances& tol = {});

/// exp(i H) for Hermitian H.
CMatrix expi_hermitian(const CMatrix& h);

/// ||U^dag U - 1|| in Frobenius norm.
double unitarity_residual(const CMatrix& u);

struct GaugeOverlap {
    CMatrix u;         // u_ab = <a_a, b_b>, so that b = a * u when spans agree
    double residual;   // ||u^dag u - 1||
};

/// Gauge relating two orthonormal frames. Throws SubspaceMismatch when the
/// frames do not span the same subspace (residual above tol.gauge).
GaugeOverlap overlap_gauge(const CMatrix& a, const CMatrix& b, const Tolerances& tol = {});

struct Winding {
    int degree;       // (1/2pi) * sum of principal det-phase increments
    double raw;       // unsnapped sum
    double max_step;  // largest |increment|
};

/// Winding number of det U along a closed discrete loop (first == last).
/// Counterclockwise phase increase counts positive.
/// Throws StepTooLarge when an increment reaches pi/2 and SnapFailed when the
/// sum is not within 0.1 of an integer.
Winding det_phase_winding(std::span<const CMatrix> loop, const Tolerances& tol = {});

/// Principal argument of the determinant ratio det(b)/det(a) for unitaries.
double det_phase_step(const CMatrix& a, const CMatrix& b);

}  // namespace blochobs
