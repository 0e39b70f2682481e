#include "blochobs/invariants.hpp"

#include <cmath>

#include "blochobs/error.hpp"

namespace blochobs {

std::string_view to_string(Method method) {
    switch (method) {
        case Method::Obstruction: return "obstruction";
        case Method::Curvature: return "curvature";
        case Method::Plaquette: return "plaquette";
        case Method::FkmObstruction: return "fkm_obstruction";
        case Method::FkmConnection: return "fkm_connection";
        case Method::FkmLattice: return "fkm_lattice";
    }
    return "unknown";
}

Method method_from_string(std::string_view name) {
    for (Method m : {Method::Obstruction, Method::Curvature, Method::Plaquette, Method::FkmObstruction,
                     Method::FkmConnection, Method::FkmLattice}) {
        if (to_string(m) == name) return m;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown method " + std::string(name));
}

bool is_z2(Method method) {
    return method == Method::FkmObstruction || method == Method::FkmConnection ||
           method == Method::FkmLattice;
}

namespace {

void require_min_grid(int n, bool even) {
    if (n < 8 || (even && n % 2 != 0)) {
        throw Error(ErrorKind::InvalidArgument,
                    "grid N = " + std::to_string(n) + (even ? " must be even and >= 8" : " must be >= 8"));
    }
}

void require_trs(const BlochModel& model) {
    if (!model.trs()) throw Error(ErrorKind::NoTrs, "model has no time-reversal data");
}

InvariantResult integer_result(Method method, double raw, int n, const Tolerances& tol) {
    InvariantResult r;
    r.method = method;
    r.raw = raw;
    const double nearest = std::round(raw);
    r.snap_residual = std::abs(raw - nearest);
    if (r.snap_residual >= tol.snap) {
        throw Error(ErrorKind::SnapFailed, std::string(to_string(method)) + " raw value " +
                                               std::to_string(raw) + " is not near an integer");
    }
    r.value = static_cast<int>(nearest);
    if (is_z2(method)) r.value = ((r.value % 2) + 2) % 2;
    r.grid_n = n;
    return r;
}

cplx link(const CMatrix& a, const CMatrix& b) { return (a.adjoint() * b).determinant(); }

double plaquette_phase(const CMatrix& f00, const CMatrix& f10, const CMatrix& f11, const CMatrix& f01) {
    return std::arg(link(f00, f10) * link(f10, f11) * link(f11, f01) * link(f01, f00));
}

template <class Fn>
InvariantResult with_refinement(Method method, int n, const RunOptions& opts, Fn&& run) {
    int refinements = 0;
    for (;;) {
        try {
            InvariantResult r = run(n);
            r.method = method;
            r.grid_n = n;
            r.refinements = refinements;
            return r;
        } catch (const Error& e) {
            if (!e.refinable() || 2 * n > opts.max_grid) throw;
            n *= 2;
            ++refinements;
        }
    }
}

}  // namespace

double plaquette_flux(const GridFrames& grid) {
    double sum = 0.0;
    for (int i = 0; i + 1 < grid.columns; ++i) {
        for (int j = 0; j + 1 < grid.rows; ++j) {
            sum += plaquette_phase(grid.at(i, j), grid.at(i + 1, j), grid.at(i + 1, j + 1), grid.at(i, j + 1));
        }
    }
    return sum;
}

InvariantResult chern_plaquette(const BlochModel& model, int n, const RunOptions& opts) {
    require_min_grid(n, false);
    return with_refinement(Method::Plaquette, n, opts, [&](int grid_n) {
        // Torus grid with the tau identification across the cell boundary.
        GridFrames grid;
        grid.n = grid_n;
        grid.columns = grid.rows = grid_n + 1;
        grid.frames.resize(static_cast<std::size_t>(grid.columns) * grid.rows);
        for (int i = 0; i < grid_n; ++i)
            for (int j = 0; j < grid_n; ++j) grid.at(i, j) = occupied_frame(model, grid.node(i, j), opts.tol);
        const CMatrix tau1 = model.tau_generator(0);
        const CMatrix tau2 = model.tau_generator(1);
        for (int j = 0; j < grid_n; ++j) grid.at(grid_n, j) = tau1 * grid.at(0, j);
        for (int i = 0; i <= grid_n; ++i) grid.at(i, grid_n) = tau2 * grid.at(i, 0);
        return integer_result(Method::Plaquette, plaquette_flux(grid) / kTwoPi, grid_n, opts.tol);
    });
}

InvariantResult chern_curvature(const BlochModel& model, int n, const RunOptions& opts) {
    require_min_grid(n, false);
    return with_refinement(Method::Curvature, n, opts, [&](int grid_n) {
        const int side = grid_n + 2;
        const double h = 1.0 / grid_n;
        std::vector<CMatrix> p(static_cast<std::size_t>(side) * side);
        const auto at = [&](int i, int j) -> CMatrix& {
            return p[static_cast<std::size_t>(i + 1) * side + (j + 1)];
        };
        for (int i = -1; i <= grid_n; ++i)
            for (int j = -1; j <= grid_n; ++j)
                at(i, j) = fermi_projector(model, {-0.5 + i * h, -0.5 + j * h}, opts.tol).p;
        double sum = 0.0;
        for (int i = 0; i < grid_n; ++i) {
            for (int j = 0; j < grid_n; ++j) {
                const CMatrix d1 = (at(i + 1, j) - at(i - 1, j)) * (0.5 * grid_n);
                const CMatrix d2 = (at(i, j + 1) - at(i, j - 1)) * (0.5 * grid_n);
                sum += (at(i, j) * (d1 * d2 - d2 * d1)).trace().imag();
            }
        }
        return integer_result(Method::Curvature, sum * h * h / kTwoPi, grid_n, opts.tol);
    });
}

InvariantResult chern_obstruction_from_frames(const BlochModel& model, const GridFrames& psi,
                                              const Tolerances& tol) {
    const ObstructionSet obs = obstruction_chern(model, psi, tol);
    const BoundaryFrame frame = boundary_frame_chern(model, psi, obs, tol);
    const Winding w = det_phase_winding(frame.u_hat, tol);
    // The degree (i / 2 pi) \oint Tr(U^-1 dU) is minus the counterclockwise
    // winding of det U.
    InvariantResult r;
    r.method = Method::Obstruction;
    r.raw = -w.raw;
    r.value = -w.degree;
    r.snap_residual = std::abs(w.raw - w.degree);
    r.grid_n = psi.n;
    return r;
}

InvariantResult chern_obstruction(const BlochModel& model, int n, const RunOptions& opts) {
    require_min_grid(n, false);
    return with_refinement(Method::Obstruction, n, opts, [&](int grid_n) {
        return chern_obstruction_from_frames(model, sweep_frame(model, grid_n, Cell::B, opts.tol), opts.tol);
    });
}

InvariantResult fkm_obstruction_from_frames(const BlochModel& model, const GridFrames& psi,
                                            const Tolerances& tol) {
    require_trs(model);
    const ObstructionSet obs = obstruction_trs(model, psi, std::nullopt, tol);
    const BoundaryFrame frame = boundary_frame_trs(model, psi, obs, std::nullopt, tol);
    const Winding w = det_phase_winding(frame.u_hat, tol);
    InvariantResult r;
    r.method = Method::FkmObstruction;
    r.raw = -w.raw;
    r.value = ((w.degree % 2) + 2) % 2;
    r.snap_residual = std::abs(w.raw - w.degree);
    r.grid_n = psi.n;
    return r;
}

InvariantResult fkm_obstruction(const BlochModel& model, int n, const RunOptions& opts) {
    require_trs(model);
    require_min_grid(n, true);
    return with_refinement(Method::FkmObstruction, n, opts, [&](int grid_n) {
        return fkm_obstruction_from_frames(model, sweep_frame(model, grid_n, Cell::Beff, opts.tol), opts.tol);
    });
}

InvariantResult fkm_connection_from_frames(const BlochModel& model, const GridFrames& psi,
                                           const Tolerances& tol) {
    require_trs(model);
    const ObstructionSet obs = obstruction_trs(model, psi, std::nullopt, tol);
    const BoundaryFrame frame = boundary_frame_trs(model, psi, obs, std::nullopt, tol);
    double holonomy = 0.0;
    for (const char* e : {"E1", "E2", "E3", "E4", "E5", "E6"}) holonomy += boundary_link_phase(frame, e);
    return integer_result(Method::FkmConnection, (plaquette_flux(psi) - holonomy) / kTwoPi, psi.n, tol);
}

InvariantResult fkm_connection_curvature(const BlochModel& model, int n, const RunOptions& opts) {
    require_trs(model);
    require_min_grid(n, true);
    return with_refinement(Method::FkmConnection, n, opts, [&](int grid_n) {
        return fkm_connection_from_frames(model, sweep_frame(model, grid_n, Cell::Beff, opts.tol), opts.tol);
    });
}

namespace {

// Orthonormal basis (psi1, A psi1, psi3, A psi3, ...) of Ran P for an
// antiunitary A = t * u_theta * conj with A^2 = -1 that preserves Ran P.
CMatrix kramers_basis(const CMatrix& states, const CMatrix& t_u, Momentum k, const Tolerances& tol) {
    const Eigen::Index m = states.cols();
    CMatrix basis(states.rows(), m);
    Eigen::Index filled = 0;
    while (filled < m) {
        Eigen::Index best = -1;
        double best_norm = 0.0;
        CVector best_vec;
        for (Eigen::Index c = 0; c < m; ++c) {
            CVector v = states.col(c);
            if (filled > 0) v -= basis.leftCols(filled) * (basis.leftCols(filled).adjoint() * v);
            if (v.norm() > best_norm) {
                best_norm = v.norm();
                best = c;
                best_vec = v;
            }
        }
        if (best < 0 || best_norm <= tol.rank) {
            throw Error(ErrorKind::RankDeficient, "Kramers basis construction failed", k);
        }
        const CVector first = best_vec / best_norm;
        basis.col(filled) = first;
        basis.col(filled + 1) = t_u * first.conjugate();
        filled += 2;
    }
    return basis;
}

}  // namespace

InvariantResult fkm_lattice_oracle(const BlochModel& model, int n, const RunOptions& opts) {
    require_trs(model);
    require_min_grid(n, true);
    const CMatrix& u_theta = model.trs()->u_theta;
    return with_refinement(Method::FkmLattice, n, opts, [&](int grid_n) {
        const int half = grid_n / 2;
        const int m = model.occupied();
        const CMatrix eps = symplectic_normal_form(m);
        const CMatrix tau1 = model.tau_generator(0);
        const CMatrix tau2 = model.tau_generator(1);
        GridFrames grid;
        grid.cell = Cell::Beff;
        grid.n = grid_n;
        grid.columns = half + 1;
        grid.rows = grid_n + 1;
        grid.frames.resize(static_cast<std::size_t>(grid.columns) * grid.rows);
        const auto theta = [&](const CMatrix& f) { return CMatrix(u_theta * f.conjugate() * eps); };

        for (int i = 1; i < half; ++i)
            for (int j = 0; j < grid_n; ++j) grid.at(i, j) = occupied_frame(model, grid.node(i, j), opts.tol);

        // Time-reversal invariant lines k1 = 0 and k1 = 1/2. With -k = k' + mu
        // the gauge obeys Psi(k') = tau_mu^-1 Theta Psi(k) eps.
        for (int i : {0, half}) {
            const CMatrix back = i == 0 ? CMatrix::Identity(model.bands(), model.bands()) : tau1;
            for (int j = 1; j < half; ++j) {
                grid.at(i, j) = occupied_frame(model, grid.node(i, j), opts.tol);
                grid.at(i, grid_n - j) = back * theta(grid.at(i, j));
            }
            // TRIM at k2 = -1/2 and k2 = 0: Psi = tau_{2k} Theta Psi eps.
            for (int j : {0, half}) {
                const LatticeVector two_k{i == 0 ? 0 : 1, j == 0 ? -1 : 0};
                const Momentum k = grid.node(i, j);
                grid.at(i, j) = kramers_basis(occupied_frame(model, k, opts.tol),
                                              model.tau(two_k) * u_theta, k, opts.tol);
            }
        }
        for (int i = 0; i <= half; ++i) grid.at(i, grid_n) = tau2 * grid.at(i, 0);

        // Counterclockwise boundary links. The rows k2 = -1/2 and k2 = 1/2 cancel
        // exactly (row N is tau_2 row 0, traversed backwards), and the two
        // halves of a time-reversal invariant line carry equal link phases.
        // Summing the reduced form keeps links on the branch cut (real gauges)
        // from splitting into +pi and -pi.
        double lines = 0.0;
        for (int j = 0; j < half; ++j) {
            lines += std::arg(link(grid.at(half, j), grid.at(half, j + 1)));
            lines -= std::arg(link(grid.at(0, j), grid.at(0, j + 1)));
        }
        const double boundary = 2.0 * lines;

        return integer_result(Method::FkmLattice, (plaquette_flux(grid) - boundary) / kTwoPi, grid_n, opts.tol);
    });
}

InvariantResult compute_invariant(Method method, const BlochModel& model, int n, const RunOptions& opts) {
    switch (method) {
        case Method::Obstruction: return chern_obstruction(model, n, opts);
        case Method::Curvature: return chern_curvature(model, n, opts);
        case Method::Plaquette: return chern_plaquette(model, n, opts);
        case Method::FkmObstruction: return fkm_obstruction(model, n, opts);
        case Method::FkmConnection: return fkm_connection_curvature(model, n, opts);
        case Method::FkmLattice: return fkm_lattice_oracle(model, n, opts);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown method");
}

double BerryField::total_f() const {
    double s = 0.0;
    for (double f : abelian_f) s += f;
    return s;
}

double BerryField::total_f_projector() const {
    double s = 0.0;
    for (double f : abelian_f_projector) s += f;
    return s;
}

BerryField berry_field(const GridFrames& frames, const BlochModel& model, const Tolerances& tol) {
    BerryField out;
    out.cell = frames.cell;
    out.n = frames.n;
    out.columns = frames.columns;
    out.rows = frames.rows;
    const double h = 1.0 / frames.n;
    const cplx minus_i(0.0, -1.0);

    out.a.resize(frames.frames.size());
    out.abelian_a.resize(frames.frames.size());
    for (int i = 0; i < frames.columns; ++i) {
        for (int j = 0; j < frames.rows; ++j) {
            const auto diff = [&](int i0, int j0, int i1, int j1, double span) {
                return CMatrix((frames.at(i1, j1) - frames.at(i0, j0)) / span);
            };
            const int il = std::max(i - 1, 0), ir = std::min(i + 1, frames.columns - 1);
            const int jl = std::max(j - 1, 0), jr = std::min(j + 1, frames.rows - 1);
            const CMatrix d1 = diff(il, j, ir, j, (ir - il) * h);
            const CMatrix d2 = diff(i, jl, i, jr, (jr - jl) * h);
            const CMatrix& psi = frames.at(i, j);
            const std::size_t idx = static_cast<std::size_t>(i) * frames.rows + j;
            out.a[idx] = {minus_i * psi.adjoint() * d1, minus_i * psi.adjoint() * d2};
            out.abelian_a[idx] = {out.a[idx][0].trace().real(), out.a[idx][1].trace().real()};
        }
    }

    std::vector<CMatrix> proj(frames.frames.size());
    for (int i = 0; i < frames.columns; ++i)
        for (int j = 0; j < frames.rows; ++j)
            proj[static_cast<std::size_t>(i) * frames.rows + j] = fermi_projector(model, frames.node(i, j), tol).p;
    const auto p_at = [&](int i, int j) -> const CMatrix& { return proj[static_cast<std::size_t>(i) * frames.rows + j]; };

    for (int i = 0; i + 1 < frames.columns; ++i) {
        for (int j = 0; j + 1 < frames.rows; ++j) {
            const auto& a00 = out.abelian_a_at(i, j);
            const auto& a10 = out.abelian_a_at(i + 1, j);
            const auto& a11 = out.abelian_a_at(i + 1, j + 1);
            const auto& a01 = out.abelian_a_at(i, j + 1);
            const double circulation =
                0.5 * h * ((a00(0) + a10(0)) + (a10(1) + a11(1)) - (a01(0) + a11(0)) - (a00(1) + a01(1)));
            out.abelian_f.push_back(circulation);

            const CMatrix pc = 0.25 * (p_at(i, j) + p_at(i + 1, j) + p_at(i + 1, j + 1) + p_at(i, j + 1));
            const CMatrix d1 = (p_at(i + 1, j) + p_at(i + 1, j + 1) - p_at(i, j) - p_at(i, j + 1)) / (2.0 * h);
            const CMatrix d2 = (p_at(i, j + 1) + p_at(i + 1, j + 1) - p_at(i, j) - p_at(i + 1, j)) / (2.0 * h);
            const double fp = (pc * (d1 * d2 - d2 * d1)).trace().imag() * h * h;
            out.abelian_f_projector.push_back(fp);
            out.discrepancy = std::max(out.discrepancy, std::abs(circulation - fp));
        }
    }
    return out;
}

}  // namespace blochobs
