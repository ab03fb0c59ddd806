#include "roamscope/survey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace roamscope {

void SectionSpec::validate() const
{
    auto finite = [](const AxisRange& a) { return std::isfinite(a.lo) && std::isfinite(a.hi) && a.hi > a.lo; };
    if (!finite(axis1) || !finite(axis2))
        throw std::invalid_argument("section ranges must be finite with hi > lo");
    if (n < 2)
        throw std::invalid_argument("section resolution must be at least 2");
    if (!std::isfinite(level))
        throw std::invalid_argument("section level must be finite");
    if (kind == SectionKind::radial && !(level > 0.0))
        throw std::invalid_argument("radial section level must be positive");
}

std::string SectionSpec::axis1_name() const { return kind == SectionKind::theta ? "r" : "theta"; }
std::string SectionSpec::axis2_name() const { return kind == SectionKind::theta ? "p_r" : "p_theta"; }

SectionSpec SectionSpec::theta_section(const ModelParams& params, int n, double level)
{
    const double pr_max = std::sqrt(reduced_mass(params));
    return {SectionKind::theta, level, {2.0, 14.0}, {-pr_max, pr_max}, n};
}

SectionSpec SectionSpec::radial_section(const ModelParams& params, int n, double level)
{
    const double pt_max = max_angular_momentum(params, level);
    constexpr double pi = std::numbers::pi;
    return {SectionKind::radial, level, {-0.5 * pi, 1.5 * pi}, {-pt_max, pt_max}, n};
}

std::optional<PhaseState> section_state(const ModelParams& params, const SectionSpec& section, double a1, double a2)
{
    if (section.kind == SectionKind::theta)
        return try_resolve_momentum(params, a1, section.level, FixedMomentum::p_r, a2, +1);
    return try_resolve_momentum(params, section.level, a1, FixedMomentum::p_theta, a2, +1);
}

SeedGrid seed_grid(const ModelParams& params, const SectionSpec& section)
{
    section.validate();
    const int n = section.n;
    SeedGrid g;
    g.n = n;
    g.states.assign(static_cast<std::size_t>(n) * n, State4{});
    g.mask.assign(static_cast<std::size_t>(n) * n, 1);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const auto s = section_state(params, section, section.coord1(i), section.coord2(j));
            if (!s)
                continue;
            const std::size_t k = static_cast<std::size_t>(j) * n + i;
            g.states[k] = s->packed();
            g.mask[k] = 0;
        }
    return g;
}

double LDField::failed_fraction() const
{
    std::size_t live = 0, failed = 0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (mask[k])
            continue;
        ++live;
        failed += std::isinf(values[k]) ? 1 : 0;
    }
    return live ? static_cast<double>(failed) / live : 0.0;
}

double LDField::masked_fraction() const
{
    if (mask.empty())
        return 0.0;
    return static_cast<double>(std::count(mask.begin(), mask.end(), 1)) / mask.size();
}

std::vector<int> interior_minima(const std::vector<double>& values, double min_prominence)
{
    const int m = static_cast<int>(values.size());
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : values)
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const double threshold = min_prominence * (hi - lo);
    std::vector<int> out;
    for (int k = 1; k + 1 < m; ++k) {
        const double v = values[k];
        if (!std::isfinite(v) || !std::isfinite(values[k - 1]) || !std::isfinite(values[k + 1]))
            continue;
        if (!(v < values[k - 1] && v < values[k + 1]))
            continue;
        // walk outwards until a lower sample or the end; the lower of the
        // two side maxima bounds the dip depth
        auto side_peak = [&](int step) {
            double peak = v;
            for (int q = k + step; q >= 0 && q < m; q += step) {
                if (!std::isfinite(values[q]))
                    break;
                if (values[q] < v)
                    return peak;
                peak = std::max(peak, values[q]);
            }
            return peak;
        };
        const double prominence = std::min(side_peak(-1), side_peak(+1)) - v;
        if (prominence >= threshold)
            out.push_back(k);
    }
    return out;
}

std::string to_string(TraceLabel l)
{
    switch (l) {
    case TraceLabel::inner_unstable: return "W_i^u";
    case TraceLabel::outer_stable: return "W_o^s";
    case TraceLabel::axis_asymptotic: return "axis-asymptotic";
    }
    return "unknown";
}

TraceLabel trace_label_from_string(const std::string& s)
{
    if (s == "W_i^u")
        return TraceLabel::inner_unstable;
    if (s == "W_o^s")
        return TraceLabel::outer_stable;
    if (s == "axis-asymptotic")
        return TraceLabel::axis_asymptotic;
    throw std::invalid_argument("unknown trace label '" + s + "'");
}

std::vector<int> ManifoldTrace::chain_sizes() const
{
    std::vector<int> sizes(n_chains, 0);
    for (const auto& p : points)
        if (p.chain >= 0 && p.chain < n_chains)
            ++sizes[p.chain];
    return sizes;
}

std::size_t ManifoldTrace::count(TraceLabel l) const
{
    std::vector<bool> seen(n_chains, false);
    std::size_t c = 0;
    for (const auto& p : points)
        if (p.label == l && p.chain >= 0 && p.chain < n_chains && !seen[p.chain]) {
            seen[p.chain] = true;
            ++c;
        }
    return c;
}

}  // namespace roamscope
