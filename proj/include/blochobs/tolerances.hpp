#pragma once

namespace blochobs {

/// Numerical thresholds shared by all modules. Every field can be overridden
/// from the command line (--tol-<name>).
struct Tolerances {
    double herm = 1e-10;     // relative Hermiticity residual accepted by hermitian_eig
    double eig = 1e-9;       // eigen-decomposition reconstruction check
    double rank = 1e-8;      // smallest singular value accepted by loewdin_frame
    double unitary = 1e-8;   // ||U^dag U - 1|| accepted by principal_log_unitary
    double exp = 1e-8;       // ||exp(iT) - U|| required of a computed logarithm
    double branch = 1e-6;    // width of the ambiguous band above the -pi cut
    double gauge = 1e-6;     // unitarity residual of an overlap gauge
    double gap = 1e-8;       // minimal direct gap E_{m+1} - E_m
    double cont = 0.5;       // max adjacent-node frame distance in a sweep
    double compat = 1e-6;    // ||U^T eps - eps U|| at time-reversal invariant momenta
    double snap = 0.1;       // accepted distance of a raw invariant to an integer
    double loop = 1e-6;      // first/last mismatch accepted for a closed loop
};

}  // namespace blochobs
