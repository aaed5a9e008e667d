#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

namespace pslice {

/// Everything needed to reproduce a sample / integrate / volume run.
struct RunOptions {
    std::string command;
    nlohmann::json variety;
    nlohmann::json density = nlohmann::json{{"type", "uniform"}};
    std::uint32_t prime = 0;
    int precision = 32;
    std::uint64_t seed = 0;
    std::uint32_t workers = 1;
    /// Point count for `sample`, slice count for `integrate` / `volume`.
    std::uint64_t count = 0;
    std::optional<std::uint32_t> support_radius;
    std::optional<double> bound;
    /// Output path; empty writes to standard output.
    std::string out;
};

nlohmann::json options_to_json(const RunOptions& opts);
RunOptions options_from_json(const nlohmann::json& j);

struct RunResult {
    std::string output;
    std::uint64_t resamples = 0;
    double wall_seconds = 0.0;
};

/// Runs a sampling or integration command and returns its output text.
/// The output depends only on the options, never on timing.
RunResult execute(const RunOptions& opts);

/// Manifest for a finished run: options, embedded specs, output digest, wall time.
nlohmann::json make_manifest(const RunOptions& opts, const RunResult& result);

/// Command-line entry point. Exit codes: 0 success, 1 runtime failure or
/// replay mismatch, 2 invalid input, 3 rejection bound violated.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pslice
