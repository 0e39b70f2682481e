#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "blochobs/invariants.hpp"

namespace blochobs::cli {

/// Built-in model name plus parameter overrides, or a hopping file.
struct ModelSpec {
    std::string name;
    std::map<std::string, double> params;
    std::string file;
};

struct SweepAxis {
    std::string name;
    double start = 0.0;
    double stop = 0.0;
    int steps = 2;

    std::vector<double> values() const;
};

enum class InvariantKind { Chern, Z2, All };
enum class Format { Json, Csv };

struct RunConfig {
    ModelSpec model;
    InvariantKind invariant = InvariantKind::All;
    std::vector<std::string> methods{"all"};
    int grid = 64;
    RunOptions run;
    std::string out;
    Format format = Format::Json;
    std::vector<SweepAxis> axes;
    Cell cell = Cell::B;
};

/// Number with the literal table {pi, pi/2, pi/3, pi/4} and their negatives,
/// plus true/false for flags.
double parse_value(std::string_view text);

/// "k=v,k=v" into a map; duplicate keys are rejected.
std::map<std::string, double> parse_params(std::string_view text);

/// "name:start:stop:steps".
SweepAxis parse_axis(std::string_view text);

/// Parameter names and defaults of a built-in model; throws on unknown names.
const std::map<std::string, double>& builtin_defaults(const std::string& name);

/// Throws InvalidArgument for unknown parameter names, grids below 8, sweeps
/// with more than two axes or fewer than two steps.
void validate_config(const RunConfig& config);

/// Model from a spec. File models load leniently when strict is false.
BlochModel build_model(const ModelSpec& spec, bool strict = true);

/// The methods a config selects for a model, in a fixed order.
std::vector<Method> select_methods(const RunConfig& config, const BlochModel& model);

struct CommandOutput {
    int exit_code = 0;
    nlohmann::json report;
    std::string text;  // rendered in the requested format
};

CommandOutput cmd_compute(const RunConfig& config);
CommandOutput cmd_sweep(const RunConfig& config);
CommandOutput cmd_verify(const RunConfig& config);
CommandOutput cmd_export_frames(const RunConfig& config);

/// Entry point of the blochobs executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace blochobs::cli
