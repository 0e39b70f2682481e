#include "blochobs/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "blochobs/error.hpp"
#include "blochobs/numeric.hpp"

namespace blochobs::cli {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

// Shortest round-trip representation.
std::string number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string_view invariant_name(InvariantKind kind) {
    switch (kind) {
        case InvariantKind::Chern: return "chern";
        case InvariantKind::Z2: return "z2";
        case InvariantKind::All: return "all";
    }
    return "all";
}

json tolerances_json(const Tolerances& t) {
    return {{"herm", t.herm},   {"eig", t.eig},       {"rank", t.rank},     {"unitary", t.unitary},
            {"exp", t.exp},     {"branch", t.branch}, {"gauge", t.gauge},   {"gap", t.gap},
            {"cont", t.cont},   {"compat", t.compat}, {"snap", t.snap},     {"loop", t.loop}};
}

json model_json(const ModelSpec& spec) {
    if (!spec.file.empty()) return {{"file", spec.file}};
    std::map<std::string, double> params = builtin_defaults(spec.name);
    for (const auto& [k, v] : spec.params) params[k] = v;
    return {{"name", spec.name}, {"params", params}};
}

json config_json(std::string_view command, const RunConfig& config, const std::vector<Method>& methods) {
    json methods_json = json::array();
    for (Method m : methods) methods_json.push_back(std::string(to_string(m)));
    json doc = {{"command", command},
                {"model", model_json(config.model)},
                {"invariant", invariant_name(config.invariant)},
                {"methods", methods_json},
                {"grid_N", config.grid},
                {"max_grid", config.run.max_grid},
                {"tolerances", tolerances_json(config.run.tol)}};
    if (!config.axes.empty()) {
        json axes = json::array();
        for (const auto& a : config.axes)
            axes.push_back({{"name", a.name}, {"start", a.start}, {"stop", a.stop}, {"steps", a.steps}});
        doc["axes"] = axes;
    }
    return doc;
}

json momentum_json(const std::optional<Momentum>& k) {
    if (!k) return nullptr;
    return json::array({k->k1, k->k2});
}

std::string describe(const Error& e) {
    std::string msg = e.what();
    if (e.momentum() && msg.find("k = (") == std::string::npos) msg += " at k = (" + number(e.momentum()->k1) + ", " + number(e.momentum()->k2) + ")";
    return msg;
}

json result_json(const InvariantResult& r, double wall_ms) {
    return {{"method", std::string(to_string(r.method))},
            {"raw", r.raw + 0.0},
            {"value", r.value},
            {"snap_residual", r.snap_residual},
            {"grid_N", r.grid_n},
            {"refinements", r.refinements},
            {"wall_ms", wall_ms}};
}

struct Timed {
    InvariantResult result;
    double wall_ms;
};

Timed timed_compute(Method m, const BlochModel& model, const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    InvariantResult r = compute_invariant(m, model, config.grid, config.run);
    const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
    return {r, elapsed.count()};
}

// Chern values must agree among themselves, and Z2 values likewise.
bool values_agree(const std::vector<InvariantResult>& results) {
    for (bool z2 : {false, true}) {
        std::optional<int> seen;
        for (const auto& r : results) {
            if (is_z2(r.method) != z2) continue;
            if (seen && *seen != r.value) return false;
            seen = r.value;
        }
    }
    return true;
}

std::string csv_header(const std::map<std::string, double>& params) {
    std::string line;
    for (const auto& [k, v] : params) line += k + ",";
    return line + "method,raw,value,snap_residual,grid_N\n";
}

std::string csv_params(const std::map<std::string, double>& params) {
    std::string line;
    for (const auto& [k, v] : params) line += number(v) + ",";
    return line;
}

std::string csv_row(const std::map<std::string, double>& params, const InvariantResult& r) {
    return csv_params(params) + std::string(to_string(r.method)) + "," + number(r.raw + 0.0) + "," +
           std::to_string(r.value) + "," + number(r.snap_residual) + "," + std::to_string(r.grid_n) + "\n";
}

std::map<std::string, double> resolved_params(const ModelSpec& spec) {
    if (!spec.file.empty()) return {};
    std::map<std::string, double> params = builtin_defaults(spec.name);
    for (const auto& [k, v] : spec.params) params[k] = v;
    return params;
}

int integer_param(const std::map<std::string, double>& p, const std::string& name) {
    const double v = p.at(name);
    if (v != std::round(v)) throw Error(ErrorKind::InvalidArgument, "parameter " + name + " must be an integer");
    return static_cast<int>(v);
}

// Frame on a cell with the boundary data, refined like compute_invariant.
struct BoundaryData {
    GridFrames grid;
    ObstructionSet obs;
    BoundaryFrame boundary;
};

BoundaryData boundary_data(const BlochModel& model, Cell cell, int n, const RunOptions& opts) {
    while (true) {
        try {
            BoundaryData d;
            d.grid = sweep_frame(model, n, cell, opts.tol);
            if (cell == Cell::B) {
                d.obs = obstruction_chern(model, d.grid, opts.tol);
                d.boundary = boundary_frame_chern(model, d.grid, d.obs, opts.tol);
            } else {
                d.obs = obstruction_trs(model, d.grid, std::nullopt, opts.tol);
                d.boundary = boundary_frame_trs(model, d.grid, d.obs, std::nullopt, opts.tol);
            }
            det_phase_winding(d.boundary.u_hat, opts.tol);
            return d;
        } catch (const Error& e) {
            if (!e.refinable() || 2 * n > opts.max_grid) throw;
            n *= 2;
        }
    }
}

int sweep_threads(std::size_t tasks) {
    unsigned cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BLOCHOBS_THREADS")) {
        const int requested = std::atoi(env);
        if (requested > 0) cap = static_cast<unsigned>(requested);
    }
    return static_cast<int>(std::min<std::size_t>(cap, std::max<std::size_t>(tasks, 1)));
}

void write_output(const RunConfig& config, const std::string& text, std::ostream& out) {
    if (config.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(config.out);
    if (!file) throw Error(ErrorKind::IoError, "cannot open " + config.out + " for writing");
    file << text;
    if (!file) throw Error(ErrorKind::IoError, "failed writing " + config.out);
}

std::string render_json(const json& report) { return report.dump(2) + "\n"; }

}  // namespace

std::vector<double> SweepAxis::values() const {
    std::vector<double> out;
    for (int s = 0; s < steps; ++s) out.push_back(start + (stop - start) * s / (steps - 1));
    return out;
}

double parse_value(std::string_view text) {
    const std::string s = trim(text);
    static const std::map<std::string, double> literals = {
        {"pi", kPi},   {"pi/2", kPi / 2},   {"pi/3", kPi / 3},   {"pi/4", kPi / 4},
        {"-pi", -kPi}, {"-pi/2", -kPi / 2}, {"-pi/3", -kPi / 3}, {"-pi/4", -kPi / 4},
        {"true", 1.0}, {"false", 0.0}};
    if (const auto it = literals.find(s); it != literals.end()) return it->second;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
        throw Error(ErrorKind::ParseError, "not a number: '" + s + "'");
    return v;
}

std::map<std::string, double> parse_params(std::string_view text) {
    std::map<std::string, double> out;
    if (trim(text).empty()) return out;
    for (const auto& item : split(text, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::ParseError, "expected name=value, got '" + item + "'");
        const std::string key = trim(item.substr(0, eq));
        if (key.empty()) throw Error(ErrorKind::ParseError, "empty parameter name in '" + item + "'");
        if (!out.emplace(key, parse_value(item.substr(eq + 1))).second)
            throw Error(ErrorKind::ParseError, "parameter " + key + " given twice");
    }
    return out;
}

SweepAxis parse_axis(std::string_view text) {
    const auto parts = split(text, ':');
    if (parts.size() != 4) throw Error(ErrorKind::ParseError, "axis must be name:start:stop:steps");
    SweepAxis axis;
    axis.name = parts[0];
    axis.start = parse_value(parts[1]);
    axis.stop = parse_value(parts[2]);
    const double steps = parse_value(parts[3]);
    if (steps != std::round(steps)) throw Error(ErrorKind::ParseError, "axis steps must be an integer");
    axis.steps = static_cast<int>(steps);
    return axis;
}

const std::map<std::string, double>& builtin_defaults(const std::string& name) {
    static const std::map<std::string, std::map<std::string, double>> table = {
        {"haldane", {{"t1", 1.0}, {"t2", 0.1}, {"phi", kPi / 2}, {"M", 0.0}}},
        {"kane_mele", {{"t", 1.0}, {"lso", 0.06}, {"lr", 0.0}, {"lv", 0.1}}},
        {"atomic", {{"n", 2.0}, {"m", 1.0}, {"trs", 0.0}}},
        {"two_band", {{"w", 1.0}}},
    };
    const auto it = table.find(name);
    if (it == table.end())
        throw Error(ErrorKind::InvalidArgument, "unknown model '" + name + "' (haldane, kane_mele, atomic, two_band)");
    return it->second;
}

void validate_config(const RunConfig& config) {
    if (config.model.file.empty() == config.model.name.empty())
        throw Error(ErrorKind::InvalidArgument, "give exactly one of --model and --model-file");
    if (!config.model.file.empty()) {
        if (!config.model.params.empty()) throw Error(ErrorKind::InvalidArgument, "--params applies to built-in models only");
        if (!config.axes.empty()) throw Error(ErrorKind::InvalidArgument, "sweeps need a built-in model");
    } else {
        const auto& defaults = builtin_defaults(config.model.name);
        for (const auto& [k, v] : config.model.params)
            if (!defaults.count(k)) throw Error(ErrorKind::InvalidArgument, "unknown parameter '" + k + "' for " + config.model.name);
        for (const auto& a : config.axes)
            if (!defaults.count(a.name)) throw Error(ErrorKind::InvalidArgument, "unknown sweep parameter '" + a.name + "'");
    }
    if (config.grid < 8) throw Error(ErrorKind::InvalidArgument, "grid N must be at least 8");
    if (config.run.max_grid < config.grid) throw Error(ErrorKind::InvalidArgument, "--max-grid is below --grid");
    if (config.axes.size() > 2) throw Error(ErrorKind::InvalidArgument, "at most two sweep axes");
    for (const auto& a : config.axes)
        if (a.steps < 2) throw Error(ErrorKind::InvalidArgument, "sweep axis " + a.name + " needs at least 2 steps");
    if (config.axes.size() == 2 && config.axes[0].name == config.axes[1].name)
        throw Error(ErrorKind::InvalidArgument, "sweep axes must differ");
    for (const auto& m : config.methods)
        if (m != "all") method_from_string(m);
}

BlochModel build_model(const ModelSpec& spec, bool strict) {
    if (!spec.file.empty()) return load_model(spec.file, strict);
    const auto p = resolved_params(spec);
    BlochModel model = [&] {
        if (spec.name == "haldane") return haldane(p.at("t1"), p.at("t2"), p.at("phi"), p.at("M"));
        if (spec.name == "kane_mele") return kane_mele(p.at("t"), p.at("lso"), p.at("lr"), p.at("lv"));
        if (spec.name == "atomic")
            return atomic_insulator(integer_param(p, "n"), integer_param(p, "m"), p.at("trs") != 0.0);
        return two_band_winding(integer_param(p, "w"));
    }();
    model.validate();
    return model;
}

std::vector<Method> select_methods(const RunConfig& config, const BlochModel& model) {
    static const std::vector<Method> chern = {Method::Obstruction, Method::Curvature, Method::Plaquette};
    static const std::vector<Method> z2 = {Method::FkmObstruction, Method::FkmConnection, Method::FkmLattice};
    const bool all = std::find(config.methods.begin(), config.methods.end(), "all") != config.methods.end();
    if (all) {
        if (config.invariant == InvariantKind::Chern) return chern;
        if (config.invariant == InvariantKind::Z2) return z2;
        std::vector<Method> out = chern;
        if (model.trs()) out.insert(out.end(), z2.begin(), z2.end());
        return out;
    }
    std::vector<Method> out;
    for (const auto& name : config.methods) {
        const Method m = method_from_string(name);
        if ((config.invariant == InvariantKind::Chern && is_z2(m)) || (config.invariant == InvariantKind::Z2 && !is_z2(m)))
            throw Error(ErrorKind::InvalidArgument, "method " + name + " does not compute the selected invariant");
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    return out;
}

CommandOutput cmd_compute(const RunConfig& config) {
    validate_config(config);
    const BlochModel model = build_model(config.model);
    const auto methods = select_methods(config, model);
    const auto params = resolved_params(config.model);

    CommandOutput out;
    json results = json::array(), checks = json::array();
    std::vector<InvariantResult> done;
    std::string csv = csv_header(params);
    std::optional<std::string> failure;
    for (Method m : methods) {
        try {
            const Timed t = timed_compute(m, model, config);
            results.push_back(result_json(t.result, t.wall_ms));
            csv += csv_row(params, t.result);
            done.push_back(t.result);
        } catch (const Error& e) {
            checks.push_back({{"name", std::string(to_string(m))},
                              {"pass", false},
                              {"error", std::string(to_string(e.kind()))},
                              {"message", e.what()},
                              {"k", momentum_json(e.momentum())}});
            if (!failure) failure = std::string(to_string(m)) + ": " + describe(e);
        }
    }
    const bool agree = values_agree(done);
    checks.push_back({{"name", "agreement"}, {"pass", agree}});

    out.report = {{"config", config_json("compute", config, methods)}, {"results", results}, {"checks", checks}};
    if (failure) {
        out.exit_code = 1;
        out.report["error"] = *failure;
    } else if (!agree) {
        out.exit_code = 2;
        out.report["error"] = "methods disagree";
    }
    out.text = config.format == Format::Csv ? csv : render_json(out.report);
    return out;
}

CommandOutput cmd_sweep(const RunConfig& config) {
    validate_config(config);
    if (config.axes.empty()) throw Error(ErrorKind::InvalidArgument, "sweep needs at least one --axis");

    std::vector<std::map<std::string, double>> points;
    const auto base = resolved_params(config.model);
    const auto first = config.axes[0].values();
    const auto second = config.axes.size() > 1 ? config.axes[1].values() : std::vector<double>{0.0};
    for (double a : first)
        for (double b : second) {
            auto p = base;
            p[config.axes[0].name] = a;
            if (config.axes.size() > 1) p[config.axes[1].name] = b;
            points.push_back(p);
        }

    // Methods are fixed by the base point so every row has the same layout.
    const auto methods = select_methods(config, build_model(config.model));

    struct Row {
        Method method;
        std::optional<Timed> result;
        std::string status = "ok";
        std::optional<Momentum> k;
    };
    std::vector<std::vector<Row>> rows(points.size());
    const auto work = [&](std::size_t idx) {
        ModelSpec spec = config.model;
        spec.params = points[idx];
        std::optional<BlochModel> model;
        std::string model_error;
        try {
            model = build_model(spec);
        } catch (const Error& e) {
            model_error = std::string(to_string(e.kind()));
        }
        for (Method m : methods) {
            Row row{m, std::nullopt, "ok", std::nullopt};
            if (!model) {
                row.status = model_error;
            } else {
                try {
                    row.result = timed_compute(m, *model, config);
                } catch (const Error& e) {
                    row.status = e.kind() == ErrorKind::GapClosed ? "gapless" : std::string(to_string(e.kind()));
                    row.k = e.momentum();
                }
            }
            rows[idx].push_back(row);
        }
    };

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int nthreads = sweep_threads(points.size());
    for (int t = 0; t < nthreads; ++t)
        pool.emplace_back([&] {
            for (std::size_t idx = next++; idx < points.size(); idx = next++) work(idx);
        });
    for (auto& th : pool) th.join();

    CommandOutput out;
    json results = json::array();
    json disagreements = json::array();
    std::string csv = csv_header(base);
    for (std::size_t idx = 0; idx < points.size(); ++idx) {
        std::vector<InvariantResult> done;
        for (const auto& row : rows[idx]) {
            if (row.result) {
                json rec = result_json(row.result->result, row.result->wall_ms);
                rec["params"] = points[idx];
                rec["status"] = row.status;
                results.push_back(rec);
                csv += csv_row(points[idx], row.result->result);
                done.push_back(row.result->result);
            } else {
                results.push_back({{"params", points[idx]},
                                   {"method", std::string(to_string(row.method))},
                                   {"status", row.status},
                                   {"k", momentum_json(row.k)}});
                csv += csv_params(points[idx]) + std::string(to_string(row.method)) + ",," + row.status + ",,\n";
            }
        }
        if (!values_agree(done)) disagreements.push_back(idx);
    }
    json checks = json::array({json{{"name", "agreement"}, {"pass", disagreements.empty()}, {"points", disagreements}}});
    out.report = {{"config", config_json("sweep", config, methods)}, {"results", results}, {"checks", checks}};
    out.text = config.format == Format::Csv ? csv : render_json(out.report);
    return out;
}

CommandOutput cmd_verify(const RunConfig& config) {
    validate_config(config);
    const BlochModel model = build_model(config.model, false);
    const Tolerances& tol = config.run.tol;
    const int m = model.occupied();

    json checks = json::array();
    std::optional<std::string> first_failure;
    const auto record = [&](const std::string& name, bool pass, double residual, json extra = json::object()) {
        json c = {{"name", name}, {"pass", pass}, {"residual", residual}};
        c.update(extra);
        checks.push_back(c);
        if (!pass && !first_failure) first_failure = name;
    };
    const auto record_error = [&](const std::string& name, const Error& e) {
        checks.push_back({{"name", name},
                          {"pass", false},
                          {"error", std::string(to_string(e.kind()))},
                          {"message", e.what()},
                          {"k", momentum_json(e.momentum())}});
        if (!first_failure) first_failure = name + " (" + std::string(to_string(e.kind())) + ")";
    };

    const SymmetryReport rep = verify_symmetries(model, config.grid, tol);
    record("hermiticity", rep.hermiticity_residual <= rep.threshold, rep.hermiticity_residual);
    record("P2", rep.covariance_residual <= rep.threshold, rep.covariance_residual);
    if (rep.trs_residual) {
        record("P3", *rep.trs_residual <= rep.threshold, *rep.trs_residual);
        record("fermionic", *rep.fermionic_residual <= rep.threshold, *rep.fermionic_residual);
    }

    constexpr double kFrameTol = 1e-8;
    constexpr int kSamples = 10;
    try {
        const BoundaryData d = boundary_data(model, Cell::B, config.grid, config.run);
        const double f2 = std::max(d.boundary.f2_residual, d.boundary.vertex_residual);
        record("F2_chern", f2 < kFrameTol, f2, {{"grid_N", d.grid.n}});
        const int base = det_phase_winding(d.boundary.u_hat, tol).degree;
        double worst = 0.0;
        for (int s = 0; s < kSamples; ++s) {
            const auto gauge = random_periodic_gauge(d.boundary.path, m, 1000 + s);
            const int shifted = det_phase_winding(compose(d.boundary.u_hat, gauge), tol).degree;
            worst = std::max(worst, std::abs(static_cast<double>(shifted - base)));
        }
        record("periodic_gauge_degree", worst == 0.0, worst, {{"samples", kSamples}});
    } catch (const Error& e) {
        record_error("F2_chern", e);
    }

    if (model.trs()) {
        try {
            const BoundaryData d = boundary_data(model, Cell::Beff, config.grid, config.run);
            double u_res = 0.0, t_res = 0.0;
            for (const auto& p : d.obs.points) {
                u_res = std::max(u_res, p.compat_residual);
                t_res = std::max(t_res, p.log_compat_residual);
            }
            record("obstruction_compat", u_res < 1e-8 && t_res < 1e-6, std::max(u_res, t_res),
                   {{"u_residual", u_res}, {"t_residual", t_res}});
            const double f23 =
                std::max({d.boundary.f2_residual, d.boundary.f3_residual, d.boundary.vertex_residual});
            record("F2_F3_trs", f23 < kFrameTol, f23, {{"grid_N", d.grid.n}});

            const int base = det_phase_winding(d.boundary.u_hat, tol).degree;
            bool even = true;
            for (int s = 0; s < kSamples; ++s) {
                const SymmetricGauge g = random_symmetric_gauge(d.boundary.path, model.trs()->epsilon, 2000 + s);
                const int shift = det_phase_winding(compose(d.boundary.u_hat, g.x), tol).degree - base;
                even = even && shift % 2 == 0 && shift == g.expected_degree;
            }
            record("symmetric_gauge_parity", even, 0.0, {{"samples", kSamples}});
            bool unwind = true;
            for (int r = -2; r <= 2; ++r)
                unwind = unwind && det_phase_winding(unwind_map(r, d.boundary.path, m), tol).degree == -2 * r;
            record("unwind_map", unwind, 0.0);
        } catch (const Error& e) {
            record_error("obstruction_compat", e);
        }
    }

    CommandOutput out;
    out.report = {{"config", config_json("verify", config, {})}, {"checks", checks}, {"results", json::array()}};
    if (first_failure) {
        out.exit_code = 1;
        out.report["error"] = "check failed: " + *first_failure;
    }
    if (config.format == Format::Csv) {
        out.text = "check,pass,residual\n";
        for (const auto& c : checks)
            out.text += c["name"].get<std::string>() + "," + (c["pass"].get<bool>() ? "true" : "false") + "," +
                        (c.contains("residual") ? number(c["residual"].get<double>()) : "") + "\n";
    } else {
        out.text = render_json(out.report);
    }
    return out;
}

CommandOutput cmd_export_frames(const RunConfig& config) {
    validate_config(config);
    if (config.format == Format::Csv) throw Error(ErrorKind::InvalidArgument, "frame files are JSON only");
    const BlochModel model = build_model(config.model);
    if (config.cell == Cell::Beff && !model.trs())
        throw Error(ErrorKind::NoTrs, "the half cell needs a time-reversal symmetric model");

    const BoundaryData d = boundary_data(model, config.cell, config.grid, config.run);
    const Winding w = det_phase_winding(d.boundary.u_hat, config.run.tol);

    CommandOutput out;
    out.report = grid_frames_to_json(d.grid);
    out.report["boundary"] = boundary_to_json(d.boundary);
    out.report["obstructions"] = obstructions_to_json(d.obs);
    out.report["degree"] = w.degree;
    out.report["config"] = config_json("export-frames", config, {});
    out.report["config"]["cell"] = std::string(to_string(config.cell));

    const GridFrames back = grid_frames_from_json(json::parse(out.report.dump()));
    double worst = 0.0;
    for (std::size_t t = 0; t < back.frames.size(); ++t)
        worst = std::max(worst, (back.frames[t] - d.grid.frames[t]).norm());
    if (back.n != d.grid.n || worst > 1e-10)
        throw Error(ErrorKind::IoError, "frame file does not round-trip (" + number(worst) + ")");
    out.text = render_json(out.report);
    return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Chern and Z2 invariants of Bloch band models", "blochobs"};
    app.require_subcommand(1);

    RunConfig config;
    std::string params_text, invariant = "all", methods_text = "all", format = "json", cell = "B";
    std::vector<std::string> axes_text;

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--model", config.model.name, "built-in model: haldane, kane_mele, atomic, two_band");
        sub->add_option("--params", params_text, "parameters k=v[,k=v...]; pi, pi/2, pi/3, pi/4 accepted");
        sub->add_option("--model-file", config.model.file, "hopping file (JSON)");
        sub->add_option("--grid", config.grid, "grid N (>= 8)");
        sub->add_option("--invariant", invariant, "chern, z2 or all")->check(CLI::IsMember({"chern", "z2", "all"}));
        sub->add_option("--methods", methods_text, "comma-separated methods or all");
        sub->add_option("--out", config.out, "output path (stdout when absent)");
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--max-grid", config.run.max_grid, "refinement cap");
        Tolerances& t = config.run.tol;
        sub->add_option("--tol-herm", t.herm);
        sub->add_option("--tol-eig", t.eig);
        sub->add_option("--tol-rank", t.rank);
        sub->add_option("--tol-unitary", t.unitary);
        sub->add_option("--tol-exp", t.exp);
        sub->add_option("--tol-branch", t.branch);
        sub->add_option("--tol-gauge", t.gauge);
        sub->add_option("--tol-gap", t.gap);
        sub->add_option("--tol-cont", t.cont);
        sub->add_option("--tol-compat", t.compat);
        sub->add_option("--tol-snap", t.snap);
        sub->add_option("--tol-loop", t.loop);
    };
    CLI::App* compute = app.add_subcommand("compute", "compute invariants for one model");
    CLI::App* sweep = app.add_subcommand("sweep", "invariants over a parameter grid");
    CLI::App* verify = app.add_subcommand("verify", "symmetry and frame diagnostics");
    CLI::App* exportf = app.add_subcommand("export-frames", "write a frame file");
    for (CLI::App* sub : {compute, sweep, verify, exportf}) common(sub);
    sweep->add_option("--axis", axes_text, "name:start:stop:steps (up to two)")->required();
    exportf->add_option("--cell", cell, "B or Beff")->check(CLI::IsMember({"B", "Beff"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        config.model.params = parse_params(params_text);
        config.invariant = invariant == "chern" ? InvariantKind::Chern : invariant == "z2" ? InvariantKind::Z2 : InvariantKind::All;
        config.methods = split(methods_text, ',');
        config.format = format == "csv" ? Format::Csv : Format::Json;
        config.cell = cell_from_string(cell);
        for (const auto& a : axes_text) config.axes.push_back(parse_axis(a));

        CommandOutput res;
        if (compute->parsed()) res = cmd_compute(config);
        else if (sweep->parsed()) res = cmd_sweep(config);
        else if (verify->parsed()) res = cmd_verify(config);
        else res = cmd_export_frames(config);

        write_output(config, res.text, out);
        if (res.report.contains("error")) err << "blochobs: " << res.report["error"].get<std::string>() << "\n";
        return res.exit_code;
    } catch (const Error& e) {
        err << "blochobs: " << describe(e) << "\n";
        return 1;
    }
}

}  // namespace blochobs::cli
