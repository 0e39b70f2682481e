#include <doctest.h>

#include <cmath>
#include <random>

#include "blochobs/error.hpp"
#include "blochobs/invariants.hpp"
#include "oracles.hpp"

using namespace blochobs;

namespace {

RunOptions capped(int max_grid) {
    RunOptions o;
    o.max_grid = max_grid;
    return o;
}

}  // namespace

TEST_CASE("atomic insulator has trivial Chern routes") {
    const BlochModel model = atomic_insulator(2, 1);
    for (Method m : {Method::Obstruction, Method::Curvature, Method::Plaquette}) {
        const InvariantResult r = compute_invariant(m, model, 16);
        CHECK(r.value == 0);
        CHECK(r.refinements == 0);
    }
    CHECK(chern_curvature(model, 16).raw == 0.0);
}

TEST_CASE("haldane plaquette at N = 24") {
    const InvariantResult r = chern_plaquette(haldane(1, 0.1, kPi / 2, 0), 24);
    CHECK(std::abs(r.value) == 1);
    CHECK(r.snap_residual < 1e-10);
}

TEST_CASE("two-band winding models against the solid-angle degree") {
    for (int w = -2; w <= 2; ++w) {
        const double degree = oracle::sphere_degree(
            [w](double k1, double k2) { return two_band_winding_d(w, {k1, k2}); }, 256);
        const int lower_band_chern = -static_cast<int>(std::lround(degree));
        CHECK(std::abs(degree - std::round(degree)) < 1e-6);
        CHECK(lower_band_chern == w);
        for (Method m : {Method::Obstruction, Method::Curvature, Method::Plaquette}) {
            CHECK(compute_invariant(m, two_band_winding(w), 64).value == lower_band_chern);
        }
    }
}

TEST_CASE("haldane routes agree and the curvature integral converges") {
    const BlochModel model = haldane(1, 0.1, kPi / 2, 0);
    const InvariantResult plaq = chern_plaquette(model, 64);
    const InvariantResult curv = chern_curvature(model, 64);
    const InvariantResult obs = chern_obstruction(model, 256);
    CHECK(curv.value == plaq.value);
    CHECK(obs.value == plaq.value);
    CHECK(curv.snap_residual < 0.02);
    CHECK(obs.snap_residual < 1e-10);
}

TEST_CASE("haldane phase boundary near 3 sqrt 3 t2") {
    for (double mass : {0.0, 0.3, 0.45}) CHECK(std::abs(chern_obstruction(haldane(1, 0.1, kPi / 2, mass), 64).value) == 1);
    for (double mass : {0.6, 0.9, 1.5, 2.4}) CHECK(chern_obstruction(haldane(1, 0.1, kPi / 2, mass), 64).value == 0);
    CHECK(chern_plaquette(haldane(1, 0, 0, 0.5), 32).value == 0);
}

TEST_CASE("time reversal forces zero Chern number") {
    CHECK(chern_curvature(kane_mele(1, 0.06, 0, 0.1), 32).value == 0);
    CHECK(chern_plaquette(kane_mele(1, 0.06, 0.05, 0.4), 32).value == 0);
}

TEST_CASE("gap closing is not refined away") {
    CHECK_THROWS_WITH_AS(chern_plaquette(haldane(1, 0, 0, 0), 24), doctest::Contains("GapClosed"), Error);
}

TEST_CASE("grid refinement recovers from coarse starts") {
    // A small gap needs finer grids for the frame transport.
    const InvariantResult r = chern_obstruction(haldane(1, 0.1, kPi / 4, 0.3), 16, capped(1024));
    CHECK(r.refinements > 0);
    CHECK(r.grid_n == 16 << r.refinements);
    CHECK(r.value == chern_plaquette(haldane(1, 0.1, kPi / 4, 0.3), 64).value);

    CHECK_THROWS_AS(chern_obstruction(haldane(1, 0.1, kPi / 4, 0.3), 16, capped(16)), Error);
}

TEST_CASE("plaquette flux is invariant under per-node regauging") {
    const BlochModel model = kane_mele(1, 0.06, 0.05, 0.1);
    GridFrames grid = sweep_frame(model, 64, Cell::Beff);
    const double before = plaquette_flux(grid);
    std::mt19937_64 rng(21);
    for (auto& f : grid.frames) f = f * oracle::random_unitary(rng, 2);
    CHECK(std::abs(plaquette_flux(grid) - before) < 1e-10);
}

TEST_CASE("Z2 routes on kane_mele") {
    for (double lr : {0.0, 0.05}) {
        const BlochModel qsh = kane_mele(1, 0.06, lr, 0.1);
        const BlochModel triv = kane_mele(1, 0.06, lr, 0.6);
        for (Method m : {Method::FkmObstruction, Method::FkmConnection, Method::FkmLattice}) {
            CHECK(compute_invariant(m, qsh, 64).value == 1);
            CHECK(compute_invariant(m, triv, 64).value == 0);
        }
    }
}

TEST_CASE("Z2 lattice oracle with real link overlaps on the invariant lines") {
    // Without staggering and Rashba the bands are degenerate everywhere and
    // the eigenvector gauge puts many boundary links exactly on the cut.
    const BlochModel model = kane_mele(1, 0.06, 0, 0);
    for (int n : {16, 32, 64, 128}) CHECK(fkm_lattice_oracle(model, n).value == 1);
    CHECK(fkm_obstruction(model, 64).value == 1);
}

TEST_CASE("Z2 routes on the trivial Kramers insulator") {
    const BlochModel model = atomic_insulator(4, 2, true);
    for (Method m : {Method::FkmObstruction, Method::FkmConnection, Method::FkmLattice}) {
        const InvariantResult r = compute_invariant(m, model, 16);
        CHECK(r.value == 0);
        CHECK(r.raw == 0.0);
    }
}

TEST_CASE("Z2 routes on a BHZ hopping file") {
    const BlochModel inverted = model_from_json(oracle::bhz_file(1.0));
    const BlochModel normal = model_from_json(oracle::bhz_file(-1.0));
    for (Method m : {Method::FkmObstruction, Method::FkmConnection, Method::FkmLattice}) {
        CHECK(compute_invariant(m, inverted, 32).value == 1);
        CHECK(compute_invariant(m, normal, 32).value == 0);
    }
}

TEST_CASE("Z2 routes need time reversal") {
    CHECK_THROWS_WITH_AS(fkm_obstruction(haldane(1, 0.1, kPi / 2, 0), 32), doctest::Contains("NoTrs"), Error);
    CHECK_THROWS_WITH_AS(fkm_lattice_oracle(haldane(1, 0.1, kPi / 2, 0), 32), doctest::Contains("NoTrs"), Error);
}

TEST_CASE("Z2 connection route equals the obstruction degree exactly") {
    const BlochModel model = kane_mele(1, 0.06, 0.03, 0.2);
    const GridFrames grid = sweep_frame(model, 128, Cell::Beff);
    const InvariantResult conn = fkm_connection_from_frames(model, grid);
    const InvariantResult obs = fkm_obstruction_from_frames(model, grid);
    CHECK(conn.snap_residual < 1e-9);
    CHECK(conn.raw == doctest::Approx(obs.raw).epsilon(1e-9));
}

TEST_CASE("berry field of a constant frame vanishes") {
    const BlochModel model = atomic_insulator(3, 1);
    const BerryField bf = berry_field(sweep_frame(model, 8, Cell::B), model);
    for (const auto& a : bf.abelian_a) CHECK(a.norm() == 0.0);
    for (double f : bf.abelian_f) CHECK(f == 0.0);
    for (double f : bf.abelian_f_projector) CHECK(f == 0.0);
}

TEST_CASE("berry curvature integrates to the Chern number") {
    const BlochModel model = haldane(1, 0.1, kPi / 2, 0);
    const BerryField bf = berry_field(sweep_frame(model, 64, Cell::B), model);
    const int c = chern_plaquette(model, 64).value;
    CHECK(std::abs(bf.total_f_projector() / kTwoPi - c) < 0.02);
    // The circulation route on a frame that is discontinuous across the cell
    // boundary measures the interior flux only, which differs from the
    // boundary holonomy; the projector route is gauge free.
    CHECK(bf.discrepancy < 0.05);
}

TEST_CASE("berry connection under a smooth U(1) gauge shift") {
    const BlochModel model = kane_mele(1, 0.06, 0.05, 0.1);
    const auto theta = [](Momentum k) { return 0.7 * std::sin(kTwoPi * k.k1) + 0.4 * std::cos(kTwoPi * (k.k1 + k.k2)); };
    const auto grad = [](Momentum k) {
        const double c = -0.4 * kTwoPi * std::sin(kTwoPi * (k.k1 + k.k2));
        return Eigen::Vector2d(0.7 * kTwoPi * std::cos(kTwoPi * k.k1) + c, c);
    };
    const int m = model.occupied();
    // Max deviation of A from A + m d theta, and of both F routes, at grid N.
    const auto deviations = [&](int n) {
        const GridFrames grid = sweep_frame(model, n, Cell::B);
        GridFrames shifted = grid;
        for (int i = 0; i < grid.columns; ++i)
            for (int j = 0; j < grid.rows; ++j) shifted.at(i, j) = grid.at(i, j) * std::polar(1.0, theta(grid.node(i, j)));
        const BerryField a = berry_field(grid, model);
        const BerryField b = berry_field(shifted, model);
        std::array<double, 3> worst{0.0, 0.0, 0.0};
        for (int i = 1; i + 1 < grid.columns; ++i)
            for (int j = 1; j + 1 < grid.rows; ++j) {
                const Eigen::Vector2d expected = a.abelian_a_at(i, j) + m * grad(grid.node(i, j));
                worst[0] = std::max(worst[0], (b.abelian_a_at(i, j) - expected).norm());
            }
        for (std::size_t p = 0; p < a.abelian_f.size(); ++p) {
            worst[1] = std::max(worst[1], std::abs(a.abelian_f[p] - b.abelian_f[p]));
            worst[2] = std::max(worst[2], std::abs(a.abelian_f_projector[p] - b.abelian_f_projector[p]));
        }
        return worst;
    };
    const auto coarse = deviations(64);
    const auto fine = deviations(128);
    // A picks up +m d theta; the finite-difference error falls as h^2.
    CHECK(fine[0] < coarse[0] / 3.0);
    CHECK(fine[1] < coarse[1] / 3.0);
    CHECK(fine[0] < 0.2);
    CHECK(coarse[2] < 1e-10);
    CHECK(fine[2] < 1e-10);
}

TEST_CASE("method names") {
    for (Method m : {Method::Obstruction, Method::Curvature, Method::Plaquette, Method::FkmObstruction,
                     Method::FkmConnection, Method::FkmLattice}) {
        CHECK(method_from_string(to_string(m)) == m);
    }
    CHECK(is_z2(Method::FkmLattice));
    CHECK_FALSE(is_z2(Method::Curvature));
    CHECK_THROWS_AS(method_from_string("wilson"), Error);
}
