#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "blochobs/cli.hpp"
#include "blochobs/error.hpp"
#include "blochobs/numeric.hpp"
#include "oracles.hpp"

using namespace blochobs;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run blochobs_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "blochobs");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

json run_json(const std::vector<std::string>& args, int expected_code = 0) {
    const Run r = blochobs_cli(args);
    CHECK_MESSAGE(r.code == expected_code, r.err);
    return json::parse(r.out);
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("blochobs_cli_" + name);
}

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path);
    out << doc.dump();
}

json strip_wall_time(json report) {
    for (auto& r : report["results"]) r.erase("wall_ms");
    return report;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::istringstream cs(line);
        for (std::string cell; std::getline(cs, cell, ',');) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("parameter parsing") {
    CHECK(cli::parse_value("pi/2") == kPi / 2);
    CHECK(cli::parse_value("-pi/4") == -kPi / 4);
    CHECK(cli::parse_value("1.5708") == 1.5708);
    CHECK(cli::parse_value("true") == 1.0);
    CHECK_THROWS_AS(cli::parse_value("2pi"), Error);
    CHECK_THROWS_AS(cli::parse_value(""), Error);

    const auto p = cli::parse_params("t1=1, t2=0.1,phi=pi/3,M=0");
    CHECK(p.size() == 4);
    CHECK(p.at("phi") == kPi / 3);
    CHECK_THROWS_AS(cli::parse_params("M=1,M=2"), Error);
    CHECK_THROWS_AS(cli::parse_params("M"), Error);

    const cli::SweepAxis axis = cli::parse_axis("phi:-pi:pi:13");
    CHECK(axis.name == "phi");
    CHECK(axis.steps == 13);
    const auto v = axis.values();
    CHECK(v.front() == -kPi);
    CHECK(v.back() == kPi);
    CHECK(v[6] == doctest::Approx(0.0));
    CHECK_THROWS_AS(cli::parse_axis("M:0:1"), Error);
}

TEST_CASE("run config validation") {
    cli::RunConfig config;
    config.model.name = "haldane";
    CHECK_NOTHROW(cli::validate_config(config));

    config.model.params = {{"mass", 0.3}};
    CHECK_THROWS_WITH_AS(cli::validate_config(config), doctest::Contains("unknown parameter"), Error);
    config.model.params.clear();

    config.grid = 6;
    CHECK_THROWS_AS(cli::validate_config(config), Error);
    config.grid = 64;

    config.axes = {cli::SweepAxis{"M", 0, 1, 1}};
    CHECK_THROWS_AS(cli::validate_config(config), Error);
    config.axes = {cli::SweepAxis{"M", 0, 1, 2}, cli::SweepAxis{"phi", 0, 1, 2}, cli::SweepAxis{"t2", 0, 1, 2}};
    CHECK_THROWS_AS(cli::validate_config(config), Error);
    config.axes = {cli::SweepAxis{"w", 0, 1, 2}};
    CHECK_THROWS_AS(cli::validate_config(config), Error);
    config.axes.clear();

    config.model.file = "model.json";
    CHECK_THROWS_AS(cli::validate_config(config), Error);
    config.model.name.clear();
    CHECK_NOTHROW(cli::validate_config(config));

    CHECK(blochobs_cli({"compute", "--model", "haldane", "--params", "mass=0.3"}).code == 1);
    CHECK(blochobs_cli({"compute", "--model", "graphene"}).code == 1);
    CHECK(blochobs_cli({"compute", "--model", "haldane", "--bogus"}).code == 1);
    CHECK(blochobs_cli({}).code == 1);
}

TEST_CASE("compute: haldane chern routes agree") {
    const json report = run_json({"compute", "--model", "haldane", "--params", "t1=1,t2=0.1,phi=1.5708,M=0",
                                  "--invariant", "chern", "--methods", "all", "--grid", "64"});
    REQUIRE(report["results"].size() == 3);
    for (const auto& r : report["results"]) {
        CHECK(r["value"] == report["results"][0]["value"]);
        CHECK(std::abs(r["value"].get<int>()) == 1);
        for (const char* key : {"method", "raw", "value", "snap_residual", "grid_N", "refinements", "wall_ms"})
            CHECK(r.contains(key));
    }
    CHECK(report["checks"].back()["pass"] == true);
    CHECK(report["config"]["model"]["params"]["phi"] == 1.5708);
}

TEST_CASE("compute: atomic insulator with time reversal is trivial") {
    const json report = run_json({"compute", "--model", "atomic", "--params", "n=4,m=2,trs=true", "--invariant", "z2"});
    REQUIRE(report["results"].size() == 3);
    for (const auto& r : report["results"]) CHECK(r["value"] == 0);
}

TEST_CASE("compute: kane_mele quantum spin Hall phase") {
    const json report = run_json({"compute", "--model", "kane_mele", "--params", "t=1,lso=0.06,lr=0,lv=0.1",
                                  "--invariant", "z2", "--methods", "all"});
    REQUIRE(report["results"].size() == 3);
    for (const auto& r : report["results"]) CHECK(r["value"] == 1);
    CHECK(report["results"][2]["method"] == "fkm_lattice");
}

TEST_CASE("compute: invariant all adds Z2 routes only for time-reversal models") {
    CHECK(run_json({"compute", "--model", "haldane"})["results"].size() == 3);
    CHECK(run_json({"compute", "--model", "kane_mele"})["results"].size() == 6);
    CHECK(blochobs_cli({"compute", "--model", "haldane", "--invariant", "z2"}).code == 1);
    CHECK(blochobs_cli({"compute", "--model", "haldane", "--invariant", "chern", "--methods", "fkm_lattice"}).code == 1);
}

TEST_CASE("compute: gap closing exits 1 with the momentum") {
    const Run r = blochobs_cli({"compute", "--model", "haldane", "--params", "t2=0,M=0", "--grid", "48",
                                "--methods", "plaquette"});
    CHECK(r.code == 1);
    CHECK(r.err.find("GapClosed") != std::string::npos);
    const json report = json::parse(r.out);
    const auto& check = report["checks"][0];
    CHECK(check["error"] == "GapClosed");
    REQUIRE(check["k"].is_array());
    CHECK(std::abs(std::abs(check["k"][0].get<double>()) - 1.0 / 3) < 1e-12);
}

TEST_CASE("compute: method disagreement exits 2") {
    // At N = 8 the curvature sum is far from converged near the transition;
    // a loose snap tolerance lets it round to the wrong integer.
    const Run r = blochobs_cli({"compute", "--model", "haldane", "--params", "M=0.4", "--grid", "8", "--max-grid", "8",
                                "--tol-snap", "0.5", "--methods", "curvature,plaquette"});
    CHECK(r.code == 2);
    const json report = json::parse(r.out);
    CHECK(report["results"][0]["value"] != report["results"][1]["value"]);
    CHECK(report["checks"].back()["pass"] == false);
}

TEST_CASE("compute: JSON output is deterministic apart from wall time") {
    const std::vector<std::string> args = {"compute", "--model", "kane_mele", "--params", "lr=0.03,lv=0.2"};
    const json a = run_json(args), b = run_json(args);
    CHECK(strip_wall_time(a).dump() == strip_wall_time(b).dump());
}

TEST_CASE("compute: CSV columns") {
    const Run r = blochobs_cli({"compute", "--model", "haldane", "--methods", "plaquette", "--format", "csv"});
    CHECK(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"M", "phi", "t1", "t2", "method", "raw", "value", "snap_residual", "grid_N"});
    CHECK(rows[1][4] == "plaquette");
    CHECK(rows[1][8] == "64");
}

TEST_CASE("compute: --out writes the report") {
    const auto path = temp_file("compute.json");
    const Run r = blochobs_cli({"compute", "--model", "atomic", "--out", path.string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    CHECK(json::parse(in)["results"].size() == 3);
    std::filesystem::remove(path);
    CHECK(blochobs_cli({"compute", "--model", "atomic", "--out", "/nonexistent/dir/out.json"}).code == 1);
}

TEST_CASE("sweep: haldane phase diagram") {
    const Run r = blochobs_cli({"sweep", "--model", "haldane", "--axis", "M:0:1.2:13", "--axis", "phi:-pi:pi:13",
                                "--invariant", "chern", "--methods", "plaquette", "--grid", "48"});
    REQUIRE(r.code == 0);
    const json report = json::parse(r.out);
    REQUIRE(report["results"].size() == 169);
    int checked = 0;
    for (const auto& row : report["results"]) {
        const double mass = row["params"]["M"], phi = row["params"]["phi"];
        const double edge = 3.0 * std::sqrt(3.0) * 0.1 * std::abs(std::sin(phi));
        if (row["status"] == "gapless") {
            // Gapless points of the diagram lie on the lobe boundary.
            CHECK(std::abs(mass - edge) < 1e-9);
            continue;
        }
        if (std::abs(mass - edge) < 0.05) continue;
        const int expected = mass < edge ? 1 : 0;
        CHECK(std::abs(row["value"].get<int>()) == expected);
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("sweep: kane_mele staggering has a single transition") {
    const Run r = blochobs_cli({"sweep", "--model", "kane_mele", "--axis", "lv:0:0.6:13", "--invariant", "z2",
                                "--methods", "all", "--format", "csv"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 1 + 13 * 3);
    const std::vector<std::string> header = {"lr", "lso", "lv", "t", "method", "raw", "value", "snap_residual", "grid_N"};
    CHECK(rows[0] == header);
    int transitions = 0;
    std::string previous;
    for (std::size_t p = 0; p < 13; ++p) {
        const double lv = std::stod(rows[1 + 3 * p][2]);
        const std::string value = rows[1 + 3 * p][6];
        for (int m = 1; m < 3; ++m) CHECK(rows[1 + 3 * p + m][6] == value);
        // Independent check against the lattice oracle at the same point.
        CHECK(std::stoi(value) == fkm_lattice_oracle(kane_mele(1, 0.06, 0, lv), 64).value);
        if (!previous.empty() && value != previous) {
            ++transitions;
            CHECK(lv > 0.3);
            CHECK(lv < 0.36);
        }
        previous = value;
    }
    CHECK(transitions == 1);
    CHECK(rows[1][6] == "1");
    CHECK(rows.back()[6] == "0");
}

TEST_CASE("sweep: gapless line is not fatal") {
    const Run r = blochobs_cli({"sweep", "--model", "haldane", "--params", "t2=0,M=0", "--axis", "t1:0.5:1.5:5",
                                "--methods", "plaquette,curvature", "--grid", "48", "--format", "csv"});
    CHECK(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 11);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][6] == "gapless");
        CHECK(rows[i][5].empty());
    }
}

TEST_CASE("sweep: rows do not depend on the thread count") {
    const std::vector<std::string> args = {"sweep", "--model", "haldane", "--axis", "M:0:1.2:7", "--axis", "phi:pi/4:pi/2:2",
                                           "--format", "csv"};
    setenv("BLOCHOBS_THREADS", "1", 1);
    const Run serial = blochobs_cli(args);
    setenv("BLOCHOBS_THREADS", "4", 1);
    const Run parallel = blochobs_cli(args);
    unsetenv("BLOCHOBS_THREADS");
    CHECK(serial.code == 0);
    CHECK(serial.out == parallel.out);
}

TEST_CASE("verify: kane_mele passes every check") {
    const json report = run_json({"verify", "--model", "kane_mele", "--params", "lr=0.05"});
    std::vector<std::string> names;
    for (const auto& c : report["checks"]) {
        CHECK_MESSAGE(c["pass"] == true, c.dump());
        names.push_back(c["name"]);
    }
    for (const char* n : {"P2", "P3", "obstruction_compat", "F2_chern", "F2_F3_trs", "periodic_gauge_degree", "symmetric_gauge_parity", "unwind_map"})
        CHECK(std::find(names.begin(), names.end(), n) != names.end());
}

TEST_CASE("verify: haldane has no time-reversal section") {
    const json report = run_json({"verify", "--model", "haldane"});
    bool p2 = false, p3 = false;
    for (const auto& c : report["checks"]) {
        if (c["name"] == "P2") p2 = c["pass"];
        if (c["name"] == "P3" || c["name"] == "obstruction_compat") p3 = true;
    }
    CHECK(p2);
    CHECK_FALSE(p3);
}

TEST_CASE("verify: corrupted time-reversal block reports CompatViolated") {
    json doc = oracle::bhz_file(1.0);
    doc["trs"]["epsilon"] = oracle::complex_json(CMatrix::Identity(2, 2));
    const auto path = temp_file("bad_trs.json");
    write_json(path, doc);
    const Run r = blochobs_cli({"verify", "--model-file", path.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("obstruction_compat") != std::string::npos);
    const json report = json::parse(r.out);
    bool found = false;
    for (const auto& c : report["checks"])
        if (c.contains("error") && c["error"] == "CompatViolated") found = true;
    CHECK(found);
    // The strict loader refuses the same file outright.
    CHECK(blochobs_cli({"compute", "--model-file", path.string()}).code == 1);
    std::filesystem::remove(path);
}

TEST_CASE("export-frames: atomic model gives constant frames") {
    const json doc = run_json({"export-frames", "--model", "atomic", "--params", "n=3,m=1", "--grid", "8"});
    const GridFrames grid = grid_frames_from_json(doc);
    for (const auto& f : grid.frames) CHECK((f - grid.frames.front()).norm() == 0.0);
    CHECK(doc["degree"] == 0);
    CHECK(doc["obstructions"].size() == 2);
}

TEST_CASE("export-frames: kane_mele file round-trips and reproduces the Z2 parity") {
    const auto path = temp_file("km_frames.json");
    const Run r = blochobs_cli({"export-frames", "--model", "kane_mele", "--cell", "Beff", "--grid", "128",
                                "--out", path.string()});
    REQUIRE(r.code == 0);
    std::ifstream in(path);
    const json doc = json::parse(in);
    for (const char* key : {"cell", "N", "nodes", "frames", "boundary", "obstructions"}) CHECK(doc.contains(key));
    CHECK(doc["obstructions"].size() == 4);

    const GridFrames grid = grid_frames_from_json(doc);
    CHECK(grid.n == 128);
    double worst = 0.0;
    for (const auto& f : grid.frames)
        worst = std::max(worst, (f.adjoint() * f - CMatrix::Identity(f.cols(), f.cols())).norm());
    CHECK(worst < 1e-10);

    std::vector<CMatrix> u_hat;
    for (const auto& u : doc["boundary"]["u_hat"]) u_hat.push_back(complex_from_json(u, 2, 2, "u_hat"));
    const int degree = det_phase_winding(u_hat).degree;
    CHECK(((degree % 2) + 2) % 2 == fkm_obstruction(kane_mele(1, 0.06, 0, 0.1), 128).value);
    CHECK(fkm_obstruction_from_frames(kane_mele(1, 0.06, 0, 0.1), grid).value == 1);
    std::filesystem::remove(path);

    CHECK(blochobs_cli({"export-frames", "--model", "haldane", "--cell", "Beff"}).code == 1);
    CHECK(blochobs_cli({"export-frames", "--model", "haldane", "--format", "csv"}).code == 1);
}
