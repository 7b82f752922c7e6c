#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"

namespace gaah::cli {

enum class Command { Spectrum, Evolve, Poles, Oracle, Sweep, Figdata };

std::optional<Command> parse_command(std::string_view s);
std::string_view to_string(Command c);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int io = 1;
inline constexpr int config = 2;
inline constexpr int numeric = 3;
inline constexpr int validation = 4;
}  // namespace exit_code

/// Runs one subcommand into `out_dir`, writes manifest.json (success) or
/// error.json (failure) and returns the process exit status. Never throws.
int run(Command cmd, const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Pieces exposed for tests; each returns the files written below `root`.
std::vector<std::filesystem::path> run_sweep(const RunConfig& cfg, const std::filesystem::path& root);
std::vector<std::filesystem::path> run_figdata(const RunConfig& cfg, const std::filesystem::path& root);

}  // namespace gaah::cli
