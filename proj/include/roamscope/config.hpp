#pragma once

// Run configuration: flat INI sections, command-line overrides, and the
// manifest written next to every output.

#include "roamscope/survey.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace roamscope {

/// Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PotentialOptions {
    int grid = 100;  // 0 skips the grid file
    AxisRange r{1.0, 8.0};
    AxisRange theta{0.0, 6.283185307179586};
};

struct OrbitOptions {
    int segments = 80;
    Branch branch = Branch::plus;
};

struct ExtractOptions {
    std::filesystem::path inner_field;  // LD_i grid
    std::filesystem::path outer_field;  // LD_o grid
    RidgeOptions ridges;
    MinimaOptions minima;
    double anchor1 = 0.0;
    double anchor2 = 0.0;
};

struct RunConfig {
    std::string command;
    ModelParams model;
    IntegratorSettings integrator = IntegratorSettings::sweep();
    DescriptorSpec descriptor;
    SectionSpec section;
    PotentialOptions potential;
    OrbitOptions orbits;
    ExtractOptions extract;
    ClassificationRules classify;
    std::filesystem::path out_dir = ".";
    int threads = 0;  // not echoed; never changes output
};

/// Command-line values that override the file.
struct Overrides {
    std::optional<std::filesystem::path> out_dir;
    std::optional<double> tau;
    std::optional<int> grid;
    std::optional<int> threads;
    std::optional<Branch> branch;
};

/// Defaults for `command`, then the INI text, then the overrides. Unknown
/// sections or keys, unparsable values and missing referenced files throw
/// ConfigError naming the key.
RunConfig load_config(const std::string& command, std::istream* ini, const Overrides& overrides,
                      const std::filesystem::path& default_out = ".");
RunConfig load_config(const std::string& command, const std::optional<std::filesystem::path>& ini_path,
                      const Overrides& overrides, const std::filesystem::path& default_out = ".");

/// Fully resolved config in the same INI dialect, so it can be fed back with
/// --config. `results` lines go to a trailing [result] section, which the
/// reader skips.
void write_manifest(std::ostream& os, const RunConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>& results = {});
void write_manifest(const std::filesystem::path& path, const RunConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>& results = {});

}  // namespace roamscope
