#pragma once

// Text file formats: LDG v1 grids, trace files and run manifests.

#include "roamscope/survey.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace roamscope {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Generic n x n grid: `LDGRID v1`, key = value lines, a blank line, then n
/// rows of n comma-separated values (17 significant digits, nan, inf).
struct GridFile {
    Metadata meta;
    int n = 0;
    std::vector<double> values;  // row-major

    const std::string& get(const std::string& key) const;
    bool has(const std::string& key) const;
};

/// Shortest round-trip text for a double at 17 significant digits.
std::string format_value(double v);

void write_grid(std::ostream& os, const GridFile& g);
GridFile read_grid(std::istream& is);
void write_grid(const std::filesystem::path& path, const GridFile& g);
GridFile read_grid(const std::filesystem::path& path);

GridFile to_grid(const LDField& f);
LDField field_from_grid(const GridFile& g);

GridFile potential_grid(const ModelParams& params, int n, AxisRange r_range = {1.0, 8.0},
                        AxisRange theta_range = {0.0, 6.283185307179586});
GridFile to_grid(const ClassGrid& g);

/// `LDTRACE v1` header block, then rows `label, axis1, axis2, chain_id`.
void write_trace(std::ostream& os, const ManifoldTrace& t);
ManifoldTrace read_trace(std::istream& is);
void write_trace(const std::filesystem::path& path, const ManifoldTrace& t);
ManifoldTrace read_trace(const std::filesystem::path& path);

Metadata section_metadata(const SectionSpec& s);
SectionSpec section_from_metadata(const Metadata& meta);

}  // namespace roamscope
