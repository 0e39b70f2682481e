#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "blochobs/frames.hpp"
#include "blochobs/model.hpp"

namespace blochobs {

enum class Method { Obstruction, Curvature, Plaquette, FkmObstruction, FkmConnection, FkmLattice };

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);
bool is_z2(Method method);

struct InvariantResult {
    Method method = Method::Plaquette;
    double raw = 0.0;
    int value = 0;             // integer, or Z2 class in {0, 1}
    double snap_residual = 0.0;
    int grid_n = 0;
    int refinements = 0;
};

struct RunOptions {
    Tolerances tol;
    int max_grid = 4096;
};

/// Runs a method with automatic grid doubling on refinable failures.
InvariantResult compute_invariant(Method method, const BlochModel& model, int n,
                                  const RunOptions& opts = {});

/// Lattice plaquette sum over the full torus (counterclockwise plaquettes).
InvariantResult chern_plaquette(const BlochModel& model, int n, const RunOptions& opts = {});

/// (1/2 pi) sum of Im Tr(P [d1 P, d2 P]) h^2 with central differences of P.
InvariantResult chern_curvature(const BlochModel& model, int n, const RunOptions& opts = {});

/// Winding of the residual gauge U_hat of the symmetric boundary frame.
InvariantResult chern_obstruction(const BlochModel& model, int n, const RunOptions& opts = {});

/// Obstruction degree for a caller-supplied continuous frame on B (no refinement).
InvariantResult chern_obstruction_from_frames(const BlochModel& model, const GridFrames& psi,
                                              const Tolerances& tol = {});

/// Winding of U_hat around the half-cell boundary, mod 2.
InvariantResult fkm_obstruction(const BlochModel& model, int n, const RunOptions& opts = {});

InvariantResult fkm_obstruction_from_frames(const BlochModel& model, const GridFrames& psi,
                                            const Tolerances& tol = {});

/// (1/2 pi) [ sum of plaquette curvature over B_eff - boundary holonomy phase of
/// the symmetric boundary frame ], mod 2.
InvariantResult fkm_connection_curvature(const BlochModel& model, int n, const RunOptions& opts = {});

InvariantResult fkm_connection_from_frames(const BlochModel& model, const GridFrames& psi,
                                           const Tolerances& tol = {});

/// Lattice Z2 from eigenvectors alone: time-reversal constrained gauge on the
/// two time-reversal invariant lines of B_eff, plaquette field minus boundary
/// link phases, mod 2.
InvariantResult fkm_lattice_oracle(const BlochModel& model, int n, const RunOptions& opts = {});

/// Sum of the plaquette phases of a frame grid (any gauge; counterclockwise).
double plaquette_flux(const GridFrames& grid);

struct BerryField {
    Cell cell = Cell::B;
    int n = 0;
    int columns = 0;
    int rows = 0;
    std::vector<std::array<CMatrix, 2>> a;   // -i Psi^dag d_mu Psi per node
    std::vector<Eigen::Vector2d> abelian_a;  // traces of a
    std::vector<double> abelian_f;           // per plaquette, circulation of abelian_a
    std::vector<double> abelian_f_projector; // per plaquette, Im Tr(P [d1 P, d2 P]) h^2
    double discrepancy = 0.0;                // max |abelian_f - abelian_f_projector|

    double total_f() const;
    double total_f_projector() const;
    const Eigen::Vector2d& abelian_a_at(int i, int j) const {
        return abelian_a[static_cast<std::size_t>(i) * rows + j];
    }
    double f_at(int i, int j) const { return abelian_f[static_cast<std::size_t>(i) * (rows - 1) + j]; }
};

BerryField berry_field(const GridFrames& frames, const BlochModel& model, const Tolerances& tol = {});

}  // namespace blochobs
