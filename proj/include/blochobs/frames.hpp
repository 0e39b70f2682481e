#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blochobs/model.hpp"
#include "blochobs/numeric.hpp"

namespace blochobs {

/// Full cell B = [-1/2, 1/2]^2 or half cell B_eff = [0, 1/2] x [-1/2, 1/2].
enum class Cell { B, Beff };

std::string_view to_string(Cell cell);
Cell cell_from_string(std::string_view name);

struct DiscretePath {
    std::vector<Momentum> nodes;
    bool closed = false;
    std::map<std::string, std::size_t> markers;
};

/// Counterclockwise loop around B starting at v1 = (-1/2, -1/2); 4N + 1 nodes,
/// markers v1..v4 at the corners.
DiscretePath chern_boundary_path(int n);

/// Counterclockwise loop around B_eff starting at (0, 0): down the left edge,
/// along k2 = -1/2, up k1 = 1/2, back along k2 = 1/2, down to (0, 0).
/// N must be even; 3N + 1 nodes. Markers name the six TRIM on the boundary.
DiscretePath trs_boundary_path(int n);

/// Frames on the nodes of a cell grid. Node (i, j) sits at
///   B:     (-1/2 + i/N, -1/2 + j/N),  i, j = 0..N
///   Beff:  (i/N, -1/2 + j/N),         i = 0..N/2, j = 0..N
struct GridFrames {
    Cell cell = Cell::B;
    int n = 0;
    int columns = 0;
    int rows = 0;
    std::vector<CMatrix> frames;
    double max_adjacent_distance = 0.0;

    Momentum node(int i, int j) const;
    const CMatrix& at(int i, int j) const { return frames[static_cast<std::size_t>(i) * rows + j]; }
    CMatrix& at(int i, int j) { return frames[static_cast<std::size_t>(i) * rows + j]; }
};

struct PathFrames {
    DiscretePath path;
    std::vector<CMatrix> frames;
};

/// Occupied eigenvectors at k (n x m), in the eigensolver's gauge.
CMatrix occupied_frame(const BlochModel& model, Momentum k, const Tolerances& tol = {});

/// One parallel-transport step: Loewdin-orthonormalized P(k) * previous.
CMatrix transport_step(const BlochModel& model, Momentum k, const CMatrix& previous,
                       const Tolerances& tol = {});

PathFrames transport_frame(const BlochModel& model, const DiscretePath& path,
                           const CMatrix& initial_frame, const Tolerances& tol = {});

/// Continuous frame on a cell grid: eigenvectors at node (0, 0), transport
/// along the bottom row, then up every column. Throws Discontinuous when two
/// adjacent frames differ by more than tol.cont.
GridFrames sweep_frame(const BlochModel& model, int n, Cell cell, const Tolerances& tol = {});

/// Max Frobenius distance between horizontally or vertically adjacent frames.
double max_adjacent_distance(const GridFrames& grid);

struct ObstructionPoint {
    std::string name;
    Momentum k;
    CMatrix u_obs;
    HermitianLog log;
    double compat_residual = 0.0;      // TRS: ||U^T eps - eps U||
    double log_compat_residual = 0.0;  // TRS: ||T^T eps - eps T||
};

struct ObstructionSet {
    std::vector<ObstructionPoint> points;
    const ObstructionPoint& at(std::string_view name) const;
};

/// U_obs(v2) and U_obs(v4) from tau_{e1} Psi(v1) = Psi(v2) U_obs(v2) and
/// tau_{e2} Psi(v1) = Psi(v4) U_obs(v4).
ObstructionSet obstruction_chern(const BlochModel& model, const GridFrames& psi,
                                 const Tolerances& tol = {});

/// U_obs at the TRIM k on S from tau_mu Psi(k) U_obs = Theta Psi(k) eps with
/// -k = k + mu. Points are named v1 (0,0), v2 (0,-1/2), v3 (1/2,-1/2), v4 (1/2,0).
/// epsilon overrides the model's reshuffling matrix. Throws CompatViolated when
/// ||U^T eps - eps U|| > tol.compat.
ObstructionSet obstruction_trs(const BlochModel& model, const GridFrames& psi,
                               const std::optional<CMatrix>& epsilon = std::nullopt,
                               const Tolerances& tol = {});

struct BoundaryFrame {
    DiscretePath path;
    std::vector<CMatrix> phi_hat;
    std::vector<CMatrix> u_hat;   // Psi(k)^dag Phi_hat(k)
    double f2_residual = 0.0;     // max ||Phi_hat(k + lambda) - tau_lambda Phi_hat(k)||
    double f3_residual = 0.0;     // max ||Phi_hat(-k) - Theta Phi_hat(k) eps|| (TRS only)
    double vertex_residual = 0.0; // max mismatch of the branch formulas meeting at a corner
};

BoundaryFrame boundary_frame_chern(const BlochModel& model, const GridFrames& psi,
                                   const ObstructionSet& obs, const Tolerances& tol = {});

BoundaryFrame boundary_frame_trs(const BlochModel& model, const GridFrames& psi,
                                 const ObstructionSet& obs,
                                 const std::optional<CMatrix>& epsilon = std::nullopt,
                                 const Tolerances& tol = {});

/// Sum of arg det(Phi_hat_j^dag Phi_hat_{j+1}) over the links of one stretch of
/// the TRS boundary loop; stretch in {"E1", ..., "E6"}.
double boundary_link_phase(const BoundaryFrame& frame, std::string_view stretch);

/// X = exp(-2 pi i r (k2 + 1/2)) 1_2 (+) 1_{m-2} on the edge k1 = 1/2 of the
/// TRS boundary loop, identity elsewhere. Its det-phase winding is -2r.
std::vector<CMatrix> unwind_map(int r, const DiscretePath& boundary, int m);

/// Pointwise product loop[j] * gauge[j].
std::vector<CMatrix> compose(const std::vector<CMatrix>& loop, const std::vector<CMatrix>& gauge);

/// Random periodic gauge on the nodes of a loop around B: a torus-periodic
/// unitary field exp(i H(k)) times diag(exp(2 pi i (p k1 + q k2)), 1, ...).
std::vector<CMatrix> random_periodic_gauge(const DiscretePath& boundary, int m, std::uint64_t seed);

struct SymmetricGauge {
    std::vector<CMatrix> x;
    int expected_degree = 0;
};

/// Random gauge on the TRS boundary loop with X(k + lambda) = X(k) and
/// X(-k) = eps^{-1} conj(X(k)) eps. Built on E1, E2, E3 with symplectic values at
/// the TRIM and U(1) windings n1, n2, n3, then reflected; degree 2 (n1 + n3).
SymmetricGauge random_symmetric_gauge(const DiscretePath& boundary, const CMatrix& epsilon,
                                      std::uint64_t seed);

// Frame files.

nlohmann::json grid_frames_to_json(const GridFrames& grid);
GridFrames grid_frames_from_json(const nlohmann::json& doc);

nlohmann::json boundary_to_json(const BoundaryFrame& frame);
nlohmann::json obstructions_to_json(const ObstructionSet& obs);

}  // namespace blochobs
