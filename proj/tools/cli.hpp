#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "biharm/study.hpp"

namespace biharm::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitNumerical = 3,
    kExitGate = 4,
};

/// Right-hand side given on the command line.
struct RhsSpec {
    enum class Kind { kExact, kConstant, kHarmonic } kind = Kind::kExact;
    double value = 0.0;
    int degree = 0;
    int order = 0;
};

/// Throws kConfig on malformed text. Accepts "exact", "const:V", "harmonic:l,m".
RhsSpec parse_rhs(const std::string& text);

struct Options {
    StudyConfig study;
    std::optional<std::filesystem::path> mesh_path;
    RhsSpec rhs;
    /// Single-mesh resolution for `solve`; falls back to the last study level.
    std::optional<int> resolution;
    bool write_mesh = false;
    bool check = false;
};

/// Applies a JSON config document on top of `options.study`. Keys are the
/// StudyConfig field names ("case" for the kind). Throws kConfig naming the
/// file on unknown keys or wrong types.
void apply_json_config(Options& options, const std::filesystem::path& path);

int cmd_solve(const Options& options, std::ostream& out, std::ostream& err);
int cmd_converge(const Options& options, std::ostream& out, std::ostream& err);
int cmd_quality(const Options& options, std::ostream& out, std::ostream& err);

/// Full entry point: parses `args` (without the program name), dispatches,
/// and maps errors to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace biharm::cli
