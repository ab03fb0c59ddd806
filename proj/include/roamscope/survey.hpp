#pragma once

// Surfaces of section, descriptor fields over them, manifold traces pulled
// out of those fields, and trajectory classification.

#include "roamscope/ld.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace roamscope {

struct AxisRange {
    double lo = 0.0;
    double hi = 1.0;
};

/// Two free coordinates over an n x n grid of cell centres. Theta sections
/// (theta = level, theta' > 0) span (r, p_r); radial sections (r = level,
/// r' > 0) span (theta, p_theta). Columns follow axis 1, rows axis 2.
struct SectionSpec {
    SectionKind kind = SectionKind::radial;
    double level = 3.6;
    AxisRange axis1;
    AxisRange axis2;
    int n = 100;

    void validate() const;
    std::string axis1_name() const;
    std::string axis2_name() const;
    double step1() const { return (axis1.hi - axis1.lo) / n; }
    double step2() const { return (axis2.hi - axis2.lo) / n; }
    double coord1(int i) const { return axis1.lo + (i + 0.5) * step1(); }
    double coord2(int j) const { return axis2.lo + (j + 0.5) * step2(); }

    /// r in [2, 14], p_r in [-sqrt(mu), sqrt(mu)].
    static SectionSpec theta_section(const ModelParams& params, int n, double level = 0.0);
    /// theta in [-pi/2, 3pi/2), p_theta within the kinetic budget at r = level.
    static SectionSpec radial_section(const ModelParams& params, int n, double level = 3.6);
};

/// Constrained state for free coordinates (a1, a2), or nullopt outside the budget.
std::optional<PhaseState> section_state(const ModelParams& params, const SectionSpec& section, double a1, double a2);

struct SeedGrid {
    int n = 0;
    std::vector<State4> states;   // row-major, index j * n + i
    std::vector<std::uint8_t> mask;  // 1 = outside the KE = 1/2 shell
};

SeedGrid seed_grid(const ModelParams& params, const SectionSpec& section);

struct LDField {
    SectionSpec section;
    DescriptorSpec descriptor;
    IntegratorSettings integrator;
    std::vector<double> values;  // masked cells hold NaN, failed cells +inf
    std::vector<std::uint8_t> mask;

    int n() const { return section.n; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * section.n + i]; }
    bool masked(int i, int j) const { return mask[static_cast<std::size_t>(j) * section.n + i] != 0; }
    /// Failed (infinite) cells as a fraction of the unmasked cells.
    double failed_fraction() const;
    double masked_fraction() const;
};

/// OpenMP sweep; threads <= 0 keeps the runtime default. Every cell is
/// computed independently, so the result does not depend on the schedule.
LDField compute_field(const ModelParams& params, const SectionSpec& section, const DescriptorSpec& descriptor,
                      const IntegratorSettings& integrator = IntegratorSettings::sweep(), int threads = 0);

/// Single-threaded reference for the same sweep.
LDField compute_field_serial(const ModelParams& params, const SectionSpec& section, const DescriptorSpec& descriptor,
                             const IntegratorSettings& integrator = IntegratorSettings::sweep());

struct LDProfile {
    double fixed1 = 0.0;           // axis-1 coordinate of the cut
    std::vector<double> coords;   // axis-2 cell centres
    std::vector<double> values;   // NaN where masked
};

/// Descriptor along axis 2 at axis1 = fixed1, on the section's axis-2 cells.
LDProfile compute_profile(const ModelParams& params, const SectionSpec& section, const DescriptorSpec& descriptor,
                          double fixed1, const IntegratorSettings& integrator = IntegratorSettings::sweep(),
                          int threads = 0);

/// Indices of strict interior local minima of a 1-D profile, ignoring
/// non-finite samples; `min_prominence` is relative to the finite range.
std::vector<int> interior_minima(const std::vector<double>& values, double min_prominence = 0.0);

// ---------------------------------------------------------------- traces

enum class TraceLabel { inner_unstable, outer_stable, axis_asymptotic };

std::string to_string(TraceLabel l);
TraceLabel trace_label_from_string(const std::string& s);

struct TracePoint {
    TraceLabel label = TraceLabel::outer_stable;
    double a1 = 0.0;
    double a2 = 0.0;
    int chain = 0;
    int i = 0;  // grid indices
    int j = 0;
};

struct ManifoldTrace {
    SectionSpec section;
    std::string method;
    double cutoff = 0.0;
    double tau = 0.0;
    std::vector<TracePoint> points;
    int n_chains = 0;

    std::vector<int> chain_sizes() const;
    std::size_t count(TraceLabel l) const;
};

struct MinimaOptions {
    double prominence = 0.02;  // fraction of the finite field range
    int jump = 3;              // max row jump between neighbouring columns
    int min_chain = 10;
};

/// Per-column interior minima along axis 2, chained across columns and
/// grouped by the sign of the axis-2 coordinate: chain 0 holds axis2 > 0,
/// chain 1 axis2 < 0. Chains of fewer than min_chain points are dropped.
ManifoldTrace extract_minima(const LDField& field, const MinimaOptions& options = {});

struct RidgeOptions {
    double cutoff_fraction = 0.5;
    int jump = 3;
    int min_chain = 10;
    /// Chains whose axis-1 spread stays within this many cells are straight
    /// and labelled axis-asymptotic.
    int straight_spread = 4;
};

/// Maxima of |first difference along axis 1| of the clamped field per row,
/// chained across rows.
ManifoldTrace extract_gradient_ridges(const LDField& field, const RidgeOptions& options = {});

struct OverlayReport {
    bool roaming_present = false;
    long inner_region_cells = 0;   // between the S-shapes, containing the radial-dissociation cell
    long outer_band_cells = 0;     // between the two stable circles
    long overlap_cells = 0;
    bool region_bounded = false;   // false when the fill leaked through a gap in the S-shapes
    int n_inner_chains = 0;
    int n_outer_chains = 0;
};

/// Superposes both trace sets on their common section grid and measures
/// the overlap of the region bounded by the unstable S-shapes around the
/// anchor cell with the band bounded by the stable traces.
OverlayReport intersection_overlay(const ManifoldTrace& inner, const ManifoldTrace& outer, double anchor1 = 0.0,
                                   double anchor2 = 0.0);

// ---------------------------------------------------------- classification

enum class TrajectoryKind { direct_dissociation, roaming, isomerising, nonreactive, resident_timeout };

std::string to_string(TrajectoryKind k);

struct ClassificationRules {
    double t_max = 100.0;
    double section_radius = 3.6;
    int roaming_crossings = 3;  // crossings since leaving the well
};

struct TrajectoryClass {
    TrajectoryKind kind = TrajectoryKind::resident_timeout;
    int section_crossings = 0;
    bool failed = false;
    int code() const { return static_cast<int>(kind); }
};

TrajectoryClass classify_trajectory(const ModelParams& params, const PhaseState& state,
                                    const ClassificationRules& rules = {},
                                    const IntegratorSettings& integrator = IntegratorSettings::sweep());

struct ClassGrid {
    SectionSpec section;
    ClassificationRules rules;
    std::vector<int> codes;  // -1 masked
    std::vector<std::uint8_t> failed;
    double timeout_fraction() const;
};

ClassGrid classify_grid(const ModelParams& params, const SectionSpec& section, const ClassificationRules& rules = {},
                        const IntegratorSettings& integrator = IntegratorSettings::sweep(), int threads = 0);

}  // namespace roamscope
