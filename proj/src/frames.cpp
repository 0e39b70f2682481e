#include "blochobs/frames.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "blochobs/error.hpp"

namespace blochobs {

using nlohmann::json;

std::string_view to_string(Cell cell) { return cell == Cell::B ? "B" : "Beff"; }

Cell cell_from_string(std::string_view name) {
    if (name == "B") return Cell::B;
    if (name == "Beff") return Cell::Beff;
    throw Error(ErrorKind::InvalidArgument, "unknown cell " + std::string(name));
}

namespace {

void require_grid(int n, bool even) {
    if (n < 2 || (even && n % 2 != 0)) {
        throw Error(ErrorKind::InvalidArgument,
                    "grid size " + std::to_string(n) + (even ? " must be even and >= 2" : " must be >= 2"));
    }
}

double dist(const CMatrix& a, const CMatrix& b) { return (a - b).norm(); }

const CMatrix& epsilon_of(const BlochModel& model, const std::optional<CMatrix>& epsilon) {
    if (!model.trs()) throw Error(ErrorKind::NoTrs, "model has no time-reversal data");
    return epsilon ? *epsilon : model.trs()->epsilon;
}

// Index range [first, last] of stretch E_k between consecutive corner markers.
std::pair<std::size_t, std::size_t> stretch_range(const DiscretePath& path, std::string_view stretch) {
    if (stretch.size() < 2 || stretch[0] != 'E') {
        throw Error(ErrorKind::InvalidArgument, "unknown stretch " + std::string(stretch));
    }
    const int k = std::stoi(std::string(stretch.substr(1)));
    const auto first = path.markers.find("v" + std::to_string(k));
    if (first == path.markers.end()) {
        throw Error(ErrorKind::InvalidArgument, "path has no stretch " + std::string(stretch));
    }
    const auto next = path.markers.find("v" + std::to_string(k + 1));
    const std::size_t last = next == path.markers.end() ? path.nodes.size() - 1 : next->second;
    return {first->second, last};
}

}  // namespace

DiscretePath chern_boundary_path(int n) {
    require_grid(n, false);
    DiscretePath path;
    path.closed = true;
    const double h = 1.0 / n;
    for (int i = 0; i <= n; ++i) path.nodes.push_back({-0.5 + i * h, -0.5});
    for (int j = 1; j <= n; ++j) path.nodes.push_back({0.5, -0.5 + j * h});
    for (int i = n - 1; i >= 0; --i) path.nodes.push_back({-0.5 + i * h, 0.5});
    for (int j = n - 1; j >= 0; --j) path.nodes.push_back({-0.5, -0.5 + j * h});
    const auto un = static_cast<std::size_t>(n);
    path.markers = {{"v1", 0}, {"v2", un}, {"v3", 2 * un}, {"v4", 3 * un}};
    return path;
}

DiscretePath trs_boundary_path(int n) {
    require_grid(n, true);
    const int half = n / 2;
    const double h = 1.0 / n;
    DiscretePath path;
    path.closed = true;
    for (int j = half; j >= 0; --j) path.nodes.push_back({0.0, -0.5 + j * h});
    for (int i = 1; i <= half; ++i) path.nodes.push_back({i * h, -0.5});
    for (int j = 1; j <= n; ++j) path.nodes.push_back({0.5, -0.5 + j * h});
    for (int i = half - 1; i >= 0; --i) path.nodes.push_back({i * h, 0.5});
    for (int j = n - 1; j >= half; --j) path.nodes.push_back({0.0, -0.5 + j * h});
    const auto m = static_cast<std::size_t>(half);
    const auto un = static_cast<std::size_t>(n);
    path.markers = {{"v1", 0},          {"v2", m},          {"v3", 2 * m},
                    {"v4", 3 * m},      {"v5", 2 * m + un}, {"v6", 3 * m + un}};
    return path;
}

Momentum GridFrames::node(int i, int j) const {
    const double h = 1.0 / n;
    return cell == Cell::B ? Momentum{-0.5 + i * h, -0.5 + j * h} : Momentum{i * h, -0.5 + j * h};
}

CMatrix occupied_frame(const BlochModel& model, Momentum k, const Tolerances& tol) {
    return fermi_projector(model, k, tol).states;
}

CMatrix transport_step(const BlochModel& model, Momentum k, const CMatrix& previous,
                       const Tolerances& tol) {
    const CMatrix v = occupied_frame(model, k, tol);
    const CMatrix w = v * (v.adjoint() * previous);
    try {
        return loewdin_frame(w, tol);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::RankDeficient) throw;
        throw Error(ErrorKind::RankDeficient, "transported frame lost rank", k);
    }
}

PathFrames transport_frame(const BlochModel& model, const DiscretePath& path,
                           const CMatrix& initial_frame, const Tolerances& tol) {
    if (path.nodes.empty()) throw Error(ErrorKind::InvalidArgument, "empty path");
    PathFrames out{path, {}};
    out.frames.reserve(path.nodes.size());
    out.frames.push_back(transport_step(model, path.nodes.front(), initial_frame, tol));
    for (std::size_t j = 1; j < path.nodes.size(); ++j) {
        out.frames.push_back(transport_step(model, path.nodes[j], out.frames.back(), tol));
    }
    return out;
}

double max_adjacent_distance(const GridFrames& grid) {
    double worst = 0.0;
    for (int i = 0; i < grid.columns; ++i) {
        for (int j = 0; j < grid.rows; ++j) {
            if (i + 1 < grid.columns) worst = std::max(worst, dist(grid.at(i, j), grid.at(i + 1, j)));
            if (j + 1 < grid.rows) worst = std::max(worst, dist(grid.at(i, j), grid.at(i, j + 1)));
        }
    }
    return worst;
}

GridFrames sweep_frame(const BlochModel& model, int n, Cell cell, const Tolerances& tol) {
    require_grid(n, cell == Cell::Beff);
    GridFrames grid;
    grid.cell = cell;
    grid.n = n;
    grid.columns = cell == Cell::B ? n + 1 : n / 2 + 1;
    grid.rows = n + 1;
    grid.frames.resize(static_cast<std::size_t>(grid.columns) * grid.rows);

    grid.at(0, 0) = occupied_frame(model, grid.node(0, 0), tol);
    for (int i = 1; i < grid.columns; ++i) {
        grid.at(i, 0) = transport_step(model, grid.node(i, 0), grid.at(i - 1, 0), tol);
    }
    for (int i = 0; i < grid.columns; ++i) {
        for (int j = 1; j < grid.rows; ++j) {
            grid.at(i, j) = transport_step(model, grid.node(i, j), grid.at(i, j - 1), tol);
        }
    }
    grid.max_adjacent_distance = max_adjacent_distance(grid);
    if (grid.max_adjacent_distance > tol.cont) {
        throw Error(ErrorKind::Discontinuous,
                    "adjacent frame distance " + std::to_string(grid.max_adjacent_distance) +
                        " at N = " + std::to_string(n));
    }
    return grid;
}

const ObstructionPoint& ObstructionSet::at(std::string_view name) const {
    for (const auto& p : points) {
        if (p.name == name) return p;
    }
    throw Error(ErrorKind::InvalidArgument, "no obstruction at " + std::string(name));
}

ObstructionSet obstruction_chern(const BlochModel& model, const GridFrames& psi,
                                 const Tolerances& tol) {
    if (psi.cell != Cell::B) throw Error(ErrorKind::InvalidArgument, "Chern obstruction needs cell B");
    const int n = psi.n;
    const CMatrix& v1 = psi.at(0, 0);
    ObstructionSet out;
    const auto add = [&](const char* name, int i, int j, int dir) {
        const Momentum k = psi.node(i, j);
        ObstructionPoint p;
        p.name = name;
        p.k = k;
        try {
            p.u_obs = overlap_gauge(psi.at(i, j), model.tau_generator(dir) * v1, tol).u;
        } catch (const Error& e) {
            throw Error(e.kind(), "frame at the shifted vertex does not span tau P(v1) tau^-1", k);
        }
        p.log = principal_log_unitary(p.u_obs, tol);
        out.points.push_back(std::move(p));
    };
    add("v2", n, 0, 0);
    add("v4", 0, n, 1);
    return out;
}

ObstructionSet obstruction_trs(const BlochModel& model, const GridFrames& psi,
                               const std::optional<CMatrix>& epsilon, const Tolerances& tol) {
    const CMatrix& eps = epsilon_of(model, epsilon);
    if (psi.cell != Cell::Beff) {
        throw Error(ErrorKind::InvalidArgument, "TRS obstruction needs cell Beff");
    }
    const int half = psi.n / 2;
    struct Trim {
        const char* name;
        int i, j;
        LatticeVector mu;
    };
    const Trim trims[] = {{"v1", 0, half, {0, 0}},
                          {"v2", 0, 0, {0, 1}},
                          {"v3", half, 0, {-1, 1}},
                          {"v4", half, half, {-1, 0}}};
    ObstructionSet out;
    for (const auto& t : trims) {
        const Momentum k = psi.node(t.i, t.j);
        const CMatrix& frame = psi.at(t.i, t.j);
        ObstructionPoint p;
        p.name = t.name;
        p.k = k;
        try {
            p.u_obs = overlap_gauge(model.tau(t.mu) * frame, model.apply_theta(frame) * eps, tol).u;
        } catch (const Error& e) {
            throw Error(e.kind(), "Theta does not map Ran P(k) onto Ran P(-k)", k);
        }
        p.compat_residual = (p.u_obs.transpose() * eps - eps * p.u_obs).norm();
        if (p.compat_residual > tol.compat) {
            throw Error(ErrorKind::CompatViolated,
                        "U_obs^T eps - eps U_obs residual " + std::to_string(p.compat_residual), k);
        }
        p.log = principal_log_unitary(p.u_obs, tol);
        p.log_compat_residual = (p.log.T.transpose() * eps - eps * p.log.T).norm();
        out.points.push_back(std::move(p));
    }
    return out;
}

BoundaryFrame boundary_frame_chern(const BlochModel& model, const GridFrames& psi,
                                   const ObstructionSet& obs, const Tolerances& tol) {
    const int n = psi.n;
    const HermitianLog& t2 = obs.at("v2").log;
    const HermitianLog& t4 = obs.at("v4").log;
    const CMatrix tau1 = model.tau_generator(0);
    const CMatrix tau2 = model.tau_generator(1);
    const double h = 1.0 / n;

    BoundaryFrame out;
    out.path = chern_boundary_path(n);
    std::vector<std::pair<int, int>> grid_index;
    grid_index.reserve(out.path.nodes.size());
    const auto push = [&](int i, int j, CMatrix phi) {
        grid_index.emplace_back(i, j);
        out.phi_hat.push_back(std::move(phi));
    };
    for (int i = 0; i <= n; ++i) push(i, 0, psi.at(i, 0) * t2.exp_i(i * h));
    for (int j = 1; j <= n; ++j) push(n, j, tau1 * psi.at(0, j) * t4.exp_i(j * h));
    for (int i = n - 1; i >= 0; --i) push(i, n, tau2 * psi.at(i, 0) * t2.exp_i(i * h));
    for (int j = n - 1; j >= 0; --j) push(0, j, psi.at(0, j) * t4.exp_i(j * h));

    out.u_hat.reserve(out.phi_hat.size());
    for (std::size_t t = 0; t < out.phi_hat.size(); ++t) {
        const auto [i, j] = grid_index[t];
        out.u_hat.push_back(overlap_gauge(psi.at(i, j), out.phi_hat[t], tol).u);
    }

    // Loop position of boundary grid nodes on each edge.
    const auto un = static_cast<std::size_t>(n);
    const auto bottom = [&](int i) { return static_cast<std::size_t>(i); };
    const auto top = [&](int i) { return i == 0 ? 3 * un : 3 * un - static_cast<std::size_t>(i); };
    const auto left = [&](int j) { return j == 0 ? 0 : 4 * un - static_cast<std::size_t>(j); };
    const auto right = [&](int j) { return un + static_cast<std::size_t>(j); };
    for (int i = 0; i <= n; ++i) {
        out.f2_residual = std::max(out.f2_residual,
                                   dist(out.phi_hat[top(i)], tau2 * out.phi_hat[bottom(i)]));
    }
    for (int j = 0; j <= n; ++j) {
        out.f2_residual = std::max(out.f2_residual,
                                   dist(out.phi_hat[right(j)], tau1 * out.phi_hat[left(j)]));
    }

    const CMatrix& v1 = psi.at(0, 0);
    const CMatrix at_v2 = psi.at(n, 0) * t2.exp_i(1.0);
    const CMatrix at_v4 = psi.at(0, n) * t4.exp_i(1.0);
    out.vertex_residual = std::max({dist(at_v2, tau1 * v1), dist(at_v4, tau2 * v1),
                                    dist(tau1 * at_v4, tau2 * at_v2)});
    return out;
}

BoundaryFrame boundary_frame_trs(const BlochModel& model, const GridFrames& psi,
                                 const ObstructionSet& obs, const std::optional<CMatrix>& epsilon,
                                 const Tolerances& tol) {
    const CMatrix& eps = epsilon_of(model, epsilon);
    const int n = psi.n;
    const int half = n / 2;
    const CMatrix tau1 = model.tau_generator(0);
    const CMatrix tau2 = model.tau_generator(1);
    const CMatrix& t1 = obs.at("v1").log.T;
    const CMatrix& t2 = obs.at("v2").log.T;
    const CMatrix& t3 = obs.at("v3").log.T;
    const CMatrix& t4 = obs.at("v4").log.T;
    const auto interp = [](const CMatrix& a, const CMatrix& b, double s) {
        return expi_hermitian(0.5 * ((1.0 - s) * a + s * b));
    };
    // Phi_hat on S = E1 u E2 u E3, addressed by grid indices.
    const auto phi_s = [&](int i, int j) -> CMatrix {
        if (i == 0) return psi.at(0, j) * interp(t1, t2, static_cast<double>(half - j) / half);
        if (j == 0) return psi.at(i, 0) * interp(t2, t3, static_cast<double>(i) / half);
        return psi.at(half, j) * interp(t3, t4, static_cast<double>(j) / half);
    };
    const auto theta = [&](const CMatrix& f) { return CMatrix(model.apply_theta(f) * eps); };

    BoundaryFrame out;
    out.path = trs_boundary_path(n);
    std::vector<std::pair<int, int>> grid_index;
    const auto push = [&](int i, int j, CMatrix phi) {
        grid_index.emplace_back(i, j);
        out.phi_hat.push_back(std::move(phi));
    };
    for (int j = half; j >= 0; --j) push(0, j, phi_s(0, j));
    for (int i = 1; i <= half; ++i) push(i, 0, phi_s(i, 0));
    for (int j = 1; j <= n; ++j) {
        push(half, j, j <= half ? phi_s(half, j) : CMatrix(tau1 * theta(phi_s(half, n - j))));
    }
    for (int i = half - 1; i >= 0; --i) push(i, n, tau2 * phi_s(i, 0));
    for (int j = n - 1; j >= half; --j) push(0, j, theta(phi_s(0, n - j)));

    out.u_hat.reserve(out.phi_hat.size());
    for (std::size_t t = 0; t < out.phi_hat.size(); ++t) {
        const auto [i, j] = grid_index[t];
        out.u_hat.push_back(overlap_gauge(psi.at(i, j), out.phi_hat[t], tol).u);
    }

    const auto uh = static_cast<std::size_t>(half);
    const auto un = static_cast<std::size_t>(n);
    const auto left = [&](int j) -> std::size_t {
        if (j <= half) return uh - static_cast<std::size_t>(j);
        if (j == n) return 3 * uh + un;
        return 3 * un - (static_cast<std::size_t>(j) - uh);
    };
    const auto right = [&](int j) { return j == 0 ? 2 * uh : 2 * uh + static_cast<std::size_t>(j); };
    const auto bottom = [&](int i) { return i == 0 ? uh : uh + static_cast<std::size_t>(i); };
    const auto top = [&](int i) { return 2 * uh + un + (uh - static_cast<std::size_t>(i)); };

    for (int i = 0; i <= half; ++i) {
        out.f2_residual = std::max(out.f2_residual,
                                   dist(out.phi_hat[top(i)], tau2 * out.phi_hat[bottom(i)]));
    }
    for (int j = 0; j <= n; ++j) {
        // -(0, k2) = (0, -k2);  -(1/2, k2) = (1/2, -k2) - e1.
        out.f3_residual = std::max(out.f3_residual,
                                   dist(out.phi_hat[left(j)], theta(out.phi_hat[left(n - j)])));
        out.f3_residual = std::max(
            out.f3_residual, dist(out.phi_hat[right(j)], tau1 * theta(out.phi_hat[right(n - j)])));
    }

    // Branch formulas meeting at the six TRIM of the boundary.
    const CMatrix p1 = phi_s(0, half);
    const CMatrix p2 = phi_s(0, 0);
    const CMatrix p3 = phi_s(half, 0);
    const CMatrix p4 = phi_s(half, half);
    out.vertex_residual = std::max({dist(p1, theta(p1)),
                                    dist(tau2 * p2, theta(p2)),
                                    dist(tau2 * p3, tau1 * theta(p3)),
                                    dist(p4, tau1 * theta(p4))});
    return out;
}

double boundary_link_phase(const BoundaryFrame& frame, std::string_view stretch) {
    const auto [first, last] = stretch_range(frame.path, stretch);
    double sum = 0.0;
    for (std::size_t t = first; t < last; ++t) {
        sum += std::arg((frame.phi_hat[t].adjoint() * frame.phi_hat[t + 1]).determinant());
    }
    return sum;
}

std::vector<CMatrix> unwind_map(int r, const DiscretePath& boundary, int m) {
    if (m < 2) throw Error(ErrorKind::InvalidArgument, "unwind_map needs m >= 2");
    std::vector<CMatrix> out;
    out.reserve(boundary.nodes.size());
    for (const auto& k : boundary.nodes) {
        CMatrix x = CMatrix::Identity(m, m);
        if (k.k1 == 0.5) {
            const cplx phase = std::polar(1.0, -kTwoPi * r * (k.k2 + 0.5));
            x(0, 0) = phase;
            x(1, 1) = phase;
        }
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<CMatrix> compose(const std::vector<CMatrix>& loop, const std::vector<CMatrix>& gauge) {
    if (loop.size() != gauge.size()) throw Error(ErrorKind::InvalidArgument, "loop lengths differ");
    std::vector<CMatrix> out(loop.size());
    for (std::size_t j = 0; j < loop.size(); ++j) out[j] = loop[j] * gauge[j];
    return out;
}

namespace {

CMatrix random_hermitian(std::mt19937_64& rng, int m, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    CMatrix a(m, m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) a(r, c) = cplx(g(rng), g(rng));
    return 0.5 * (a + a.adjoint());
}

CMatrix u1_winding(int m, double turns) {
    CMatrix w = CMatrix::Identity(m, m);
    w(0, 0) = std::polar(1.0, kTwoPi * turns);
    return w;
}

}  // namespace

std::vector<CMatrix> random_periodic_gauge(const DiscretePath& boundary, int m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> winding(-2, 2);
    const int p = winding(rng);
    const int q = winding(rng);
    constexpr int kMaxHarmonic = 2;
    std::vector<Hopping> terms;
    for (int a = -kMaxHarmonic; a <= kMaxHarmonic; ++a) {
        for (int b = -kMaxHarmonic; b <= kMaxHarmonic; ++b) {
            if (a < 0 || (a == 0 && b < 0)) continue;
            std::normal_distribution<double> g(0.0, 0.25);
            CMatrix c(m, m);
            for (int r = 0; r < m; ++r)
                for (int s = 0; s < m; ++s) c(r, s) = cplx(g(rng), g(rng));
            if (a == 0 && b == 0) {
                terms.push_back({{0, 0}, 0.5 * (c + c.adjoint())});
            } else {
                terms.push_back({{a, b}, c});
                terms.push_back({{-a, -b}, c.adjoint()});
            }
        }
    }
    std::vector<CMatrix> out;
    out.reserve(boundary.nodes.size());
    for (const auto& k : boundary.nodes) {
        CMatrix h = CMatrix::Zero(m, m);
        for (const auto& t : terms) h += std::polar(1.0, kTwoPi * (k.k1 * t.r.l1 + k.k2 * t.r.l2)) * t.h;
        CMatrix d = CMatrix::Identity(m, m);
        d(0, 0) = std::polar(1.0, kTwoPi * (p * k.k1 + q * k.k2));
        out.push_back(d * expi_hermitian(h));
    }
    return out;
}

SymmetricGauge random_symmetric_gauge(const DiscretePath& boundary, const CMatrix& epsilon,
                                      std::uint64_t seed) {
    const int m = static_cast<int>(epsilon.rows());
    std::mt19937_64 rng(seed);
    const CMatrix eps_inv = epsilon.adjoint();
    // exp(iA) is symplectic (X^T eps X = eps) when eps^-1 A^T eps = -A.
    std::array<CMatrix, 4> a;
    for (auto& x : a) {
        const CMatrix b = random_hermitian(rng, m, 0.8);
        x = 0.5 * (b - eps_inv * b.transpose() * epsilon);
    }
    std::uniform_int_distribution<int> winding(-2, 2);
    const std::array<int, 3> turns{winding(rng), winding(rng), winding(rng)};

    const auto on_segment = [&](int seg, double s) {
        return CMatrix(expi_hermitian((1.0 - s) * a[seg] + s * a[seg + 1]) * u1_winding(m, turns[seg] * s));
    };
    // Values on S, keyed by momentum.
    const auto x_s = [&](Momentum k) -> CMatrix {
        if (k.k1 == 0.0) return on_segment(0, -2.0 * k.k2);
        if (k.k2 == -0.5) return on_segment(1, 2.0 * k.k1);
        return on_segment(2, 1.0 + 2.0 * k.k2);
    };
    const auto reflect = [&](const CMatrix& x) { return CMatrix(eps_inv * x.conjugate() * epsilon); };

    SymmetricGauge out;
    out.expected_degree = 2 * (turns[0] + turns[2]);
    out.x.reserve(boundary.nodes.size());
    for (const auto& k : boundary.nodes) {
        if (k.k2 == 0.5 && k.k1 < 0.5) {
            out.x.push_back(x_s({k.k1, -0.5}));
        } else if (k.k2 > 0.0) {
            out.x.push_back(reflect(x_s({k.k1, -k.k2})));
        } else {
            out.x.push_back(x_s(k));
        }
    }
    return out;
}

namespace {

json momentum_list(const std::vector<Momentum>& nodes) {
    json out = json::array();
    for (const auto& k : nodes) out.push_back({k.k1, k.k2});
    return out;
}

json matrix_list(const std::vector<CMatrix>& mats) {
    json out = json::array();
    for (const auto& x : mats) out.push_back(complex_to_json(x));
    return out;
}

}  // namespace

json grid_frames_to_json(const GridFrames& grid) {
    std::vector<Momentum> nodes;
    nodes.reserve(grid.frames.size());
    for (int i = 0; i < grid.columns; ++i)
        for (int j = 0; j < grid.rows; ++j) nodes.push_back(grid.node(i, j));
    return json{{"cell", std::string(to_string(grid.cell))},
                {"N", grid.n},
                {"nodes", momentum_list(nodes)},
                {"frames", matrix_list(grid.frames)}};
}

GridFrames grid_frames_from_json(const json& doc) {
    try {
        GridFrames grid;
        grid.cell = cell_from_string(doc.at("cell").get<std::string>());
        grid.n = doc.at("N").get<int>();
        require_grid(grid.n, grid.cell == Cell::Beff);
        grid.columns = grid.cell == Cell::B ? grid.n + 1 : grid.n / 2 + 1;
        grid.rows = grid.n + 1;
        const json& frames = doc.at("frames");
        const std::size_t expected = static_cast<std::size_t>(grid.columns) * grid.rows;
        if (!frames.is_array() || frames.size() != expected) {
            throw Error(ErrorKind::ParseError, "frames: expected " + std::to_string(expected) + " entries");
        }
        const json& re0 = frames.at(0).at("re");
        const auto rows = static_cast<Eigen::Index>(re0.size());
        const auto cols = static_cast<Eigen::Index>(re0.at(0).size());
        grid.frames.reserve(expected);
        for (std::size_t t = 0; t < expected; ++t) {
            grid.frames.push_back(complex_from_json(frames[t], rows, cols, "frames[" + std::to_string(t) + "]"));
        }
        grid.max_adjacent_distance = max_adjacent_distance(grid);
        return grid;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("frame file: ") + e.what());
    }
}

json boundary_to_json(const BoundaryFrame& frame) {
    json markers = json::object();
    for (const auto& [name, idx] : frame.path.markers) markers[name] = idx;
    return json{{"nodes", momentum_list(frame.path.nodes)},
                {"markers", std::move(markers)},
                {"phi_hat", matrix_list(frame.phi_hat)},
                {"u_hat", matrix_list(frame.u_hat)},
                {"f2_residual", frame.f2_residual},
                {"f3_residual", frame.f3_residual},
                {"vertex_residual", frame.vertex_residual}};
}

json obstructions_to_json(const ObstructionSet& obs) {
    json out = json::array();
    for (const auto& p : obs.points) {
        out.push_back({{"name", p.name},
                       {"k", {p.k.k1, p.k.k2}},
                       {"u_obs", complex_to_json(p.u_obs)},
                       {"T", complex_to_json(p.log.T)},
                       {"branch_margin", p.log.branch_margin},
                       {"compat_residual", p.compat_residual},
                       {"log_compat_residual", p.log_compat_residual}});
    }
    return out;
}

}  // namespace blochobs
