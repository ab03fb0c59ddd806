#include "roamscope/survey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace roamscope {

namespace {

// Radial sections cover a full turn in theta, so axis 1 wraps around.
bool wraps(const SectionSpec& s)
{
    return s.kind == SectionKind::radial && std::abs((s.axis1.hi - s.axis1.lo) - 2.0 * std::numbers::pi) < 1e-9;
}

int column_distance(int a, int b, int n, bool periodic)
{
    const int d = std::abs(a - b);
    return periodic ? std::min(d, n - d) : d;
}

TracePoint make_point(const SectionSpec& s, TraceLabel label, int i, int j, int chain)
{
    return {label, s.coord1(i), s.coord2(j), chain, i, j};
}

// Splits a column-ordered run into pieces wherever neighbouring entries
// jump by more than `jump` rows; -1 marks a missing column.
std::vector<std::vector<std::pair<int, int>>> split_runs(const std::vector<int>& rows, int jump, bool periodic)
{
    const int n = static_cast<int>(rows.size());
    std::vector<std::vector<std::pair<int, int>>> runs;
    std::vector<std::pair<int, int>> cur;
    for (int i = 0; i < n; ++i) {
        if (rows[i] < 0) {
            if (!cur.empty())
                runs.push_back(std::move(cur));
            cur.clear();
            continue;
        }
        if (!cur.empty() && std::abs(rows[i] - cur.back().second) > jump) {
            runs.push_back(std::move(cur));
            cur.clear();
        }
        cur.emplace_back(i, rows[i]);
    }
    if (!cur.empty())
        runs.push_back(std::move(cur));
    // close the loop across the axis-1 seam
    if (periodic && runs.size() > 1 && runs.front().front().first == 0 && runs.back().back().first == n - 1
        && std::abs(runs.front().front().second - runs.back().back().second) <= jump) {
        auto& tail = runs.back();
        tail.insert(tail.end(), runs.front().begin(), runs.front().end());
        runs.erase(runs.begin());
    }
    return runs;
}

}  // namespace

ManifoldTrace extract_minima(const LDField& field, const MinimaOptions& options)
{
    const SectionSpec& s = field.section;
    const int n = s.n;
    const bool periodic = wraps(s);
    ManifoldTrace trace;
    trace.section = s;
    trace.method = "column-minima";
    trace.cutoff = options.prominence;
    trace.tau = field.descriptor.tau;

    // innermost prominent minimum on each side of axis2 = 0, per column
    std::vector<int> upper(n, -1), lower(n, -1);
    std::vector<double> column(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            column[j] = field.at(i, j);
        for (int j : interior_minima(column, options.prominence)) {
            const double a2 = s.coord2(j);
            if (a2 > 0.0 && (upper[i] < 0 || j < upper[i]))
                upper[i] = j;
            if (a2 < 0.0 && (lower[i] < 0 || j > lower[i]))
                lower[i] = j;
        }
    }

    int chain = 0;
    for (const auto* rows : {&upper, &lower}) {
        for (const auto& run : split_runs(*rows, options.jump, periodic)) {
            if (static_cast<int>(run.size()) < options.min_chain)
                continue;
            for (auto [i, j] : run)
                trace.points.push_back(make_point(s, TraceLabel::outer_stable, i, j, chain));
            ++chain;
        }
    }
    trace.n_chains = chain;
    return trace;
}

ManifoldTrace extract_gradient_ridges(const LDField& field, const RidgeOptions& options)
{
    if (!(options.cutoff_fraction > 0.0 && options.cutoff_fraction <= 1.0))
        throw std::invalid_argument("cutoff_fraction must lie in (0, 1]");
    const SectionSpec& s = field.section;
    const int n = s.n;
    const bool periodic = wraps(s);

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : field.values)
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const double cutoff = lo + options.cutoff_fraction * (hi - lo);

    ManifoldTrace trace;
    trace.section = s;
    trace.method = "theta-difference-ridges";
    trace.cutoff = options.cutoff_fraction;
    trace.tau = field.descriptor.tau;

    // Per row: maxima of |forward difference| of the clamped field, grouped
    // into clusters; the outer maxima of each cluster mark the edges of a
    // low-descriptor band. Edge kind 0 = left, 1 = right.
    struct Edge {
        int i, j, kind;
    };
    const int gap = std::max(2, static_cast<int>(std::lround(0.05 * n)));
    std::vector<Edge> edges;
    std::vector<double> clamped(n), diff(n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double v = field.at(i, j);
            clamped[i] = std::isnan(v) ? cutoff : std::min(v, cutoff);
        }
        const int last = periodic ? n : n - 1;
        for (int i = 0; i < n; ++i)
            diff[i] = i < last ? std::abs(clamped[(i + 1) % n] - clamped[i]) : 0.0;
        std::vector<int> peaks;
        for (int i = 0; i < n; ++i) {
            const bool has_left = periodic || i > 0;
            const bool has_right = periodic || i + 1 < n;
            const double l = has_left ? diff[(i + n - 1) % n] : 0.0;
            const double r = has_right ? diff[(i + 1) % n] : 0.0;
            if (diff[i] > 0.0 && diff[i] > l && diff[i] >= r)
                peaks.push_back(i);
        }
        if (peaks.empty())
            continue;
        // start clustering after the widest gap so wrapped clusters stay whole
        std::size_t start = 0;
        if (periodic) {
            int widest = -1;
            for (std::size_t k = 0; k < peaks.size(); ++k) {
                const int g = (peaks[(k + 1) % peaks.size()] - peaks[k] + n) % n;
                const int span = g == 0 ? n : g;
                if (span > widest) {
                    widest = span;
                    start = (k + 1) % peaks.size();
                }
            }
        }
        std::vector<int> order;
        for (std::size_t k = 0; k < peaks.size(); ++k)
            order.push_back(peaks[(start + k) % peaks.size()]);
        int first = order[0], prev = order[0];
        for (std::size_t k = 1; k <= order.size(); ++k) {
            const bool close = k < order.size() && (periodic ? (order[k] - prev + n) % n : order[k] - prev) <= gap;
            if (close) {
                prev = order[k];
                continue;
            }
            edges.push_back({first, j, 0});
            edges.push_back({prev, j, 1});
            if (k < order.size())
                first = prev = order[k];
        }
    }

    // nearest-neighbour chaining across rows, same edge kind only
    std::vector<std::vector<Edge>> chains;
    for (const Edge& e : edges) {
        int best = -1, best_d = options.jump + 1;
        for (std::size_t c = 0; c < chains.size(); ++c) {
            const Edge& tail = chains[c].back();
            if (tail.kind != e.kind || tail.j >= e.j || e.j - tail.j > 2)
                continue;
            const int d = column_distance(e.i, tail.i, n, periodic);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        if (best >= 0)
            chains[best].push_back(e);
        else
            chains.push_back({e});
    }

    int chain = 0;
    for (const auto& c : chains) {
        if (static_cast<int>(c.size()) < options.min_chain)
            continue;
        const int span = c.back().j - c.front().j + 1;
        TraceLabel label;
        if (2 * span >= n) {
            label = TraceLabel::inner_unstable;
        } else {
            // short chains count only when nearly straight
            double sj = 0, si = 0, sjj = 0, sij = 0;
            std::vector<double> cols;
            double offset = c.front().i;
            for (const Edge& e : c) {
                double i = e.i;
                if (periodic) {
                    while (i - offset > n / 2.0)
                        i -= n;
                    while (offset - i > n / 2.0)
                        i += n;
                    offset = i;
                }
                cols.push_back(i);
            }
            const double m = static_cast<double>(c.size());
            for (std::size_t k = 0; k < c.size(); ++k) {
                sj += c[k].j;
                si += cols[k];
                sjj += double(c[k].j) * c[k].j;
                sij += double(c[k].j) * cols[k];
            }
            const double den = m * sjj - sj * sj;
            const double slope = den != 0.0 ? (m * sij - sj * si) / den : 0.0;
            const double icept = (si - slope * sj) / m;
            double worst = 0.0;
            for (std::size_t k = 0; k < c.size(); ++k)
                worst = std::max(worst, std::abs(cols[k] - (icept + slope * c[k].j)));
            if (worst > options.straight_spread)
                continue;
            label = TraceLabel::axis_asymptotic;
        }
        for (const Edge& e : c)
            trace.points.push_back(make_point(s, label, e.i, e.j, chain));
        ++chain;
    }
    trace.n_chains = chain;
    return trace;
}

OverlayReport intersection_overlay(const ManifoldTrace& inner, const ManifoldTrace& outer, double anchor1,
                                   double anchor2)
{
    if (inner.points.empty() || outer.points.empty())
        throw std::invalid_argument("intersection_overlay: both trace sets must be nonempty");
    const SectionSpec& s = inner.section;
    if (outer.section.n != s.n || outer.section.kind != s.kind)
        throw std::invalid_argument("intersection_overlay: traces live on different section grids");
    const int n = s.n;
    const bool periodic = wraps(s);
    OverlayReport rep;
    rep.n_inner_chains = static_cast<int>(inner.count(TraceLabel::inner_unstable));
    rep.n_outer_chains = static_cast<int>(outer.count(TraceLabel::outer_stable));

    // Barrier: unstable-manifold chains rasterised as 8-connected polylines,
    // which a 4-connected fill cannot cross.
    std::vector<std::uint8_t> wall(static_cast<std::size_t>(n) * n, 0);
    auto mark = [&](int i, int j) {
        if (j >= 0 && j < n)
            wall[static_cast<std::size_t>(j) * n + ((i % n) + n) % n] = 1;
    };
    std::vector<std::vector<const TracePoint*>> by_chain(inner.n_chains);
    for (const auto& p : inner.points)
        if (p.label == TraceLabel::inner_unstable && p.chain >= 0 && p.chain < inner.n_chains)
            by_chain[p.chain].push_back(&p);
    for (auto& c : by_chain) {
        for (std::size_t k = 0; k < c.size(); ++k) {
            mark(c[k]->i, c[k]->j);
            if (k == 0)
                continue;
            int i0 = c[k - 1]->i, j0 = c[k - 1]->j;
            int di = c[k]->i - i0;
            if (periodic && std::abs(di) > n / 2)
                di += di > 0 ? -n : n;
            const int dj = c[k]->j - j0;
            const int steps = std::max(std::abs(di), std::abs(dj));
            for (int q = 1; q < steps; ++q)
                mark(i0 + static_cast<int>(std::lround(double(di) * q / steps)),
                     j0 + static_cast<int>(std::lround(double(dj) * q / steps)));
        }
    }

    auto cell_of = [n](double a, const AxisRange& r) {
        return std::clamp(static_cast<int>(std::floor((a - r.lo) / (r.hi - r.lo) * n)), 0, n - 1);
    };
    const int ai = cell_of(anchor1, s.axis1), aj = cell_of(anchor2, s.axis2);

    std::vector<std::uint8_t> region(wall.size(), 0);
    if (!wall[static_cast<std::size_t>(aj) * n + ai]) {
        std::queue<std::pair<int, int>> q;
        q.emplace(ai, aj);
        region[static_cast<std::size_t>(aj) * n + ai] = 1;
        while (!q.empty()) {
            auto [i, j] = q.front();
            q.pop();
            const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
            for (auto& c : nb) {
                int ci = c[0];
                const int cj = c[1];
                if (cj < 0 || cj >= n)
                    continue;
                if (ci < 0 || ci >= n) {
                    if (!periodic)
                        continue;
                    ci = (ci + n) % n;
                }
                const std::size_t k = static_cast<std::size_t>(cj) * n + ci;
                if (wall[k] || region[k])
                    continue;
                region[k] = 1;
                q.emplace(ci, cj);
            }
        }
    }

    // Band between the stable traces: per column, rows strictly between
    // the lowest positive-side and highest negative-side trace points.
    std::vector<int> top(n, -1), bottom(n, -1);
    for (const auto& p : outer.points) {
        if (p.label != TraceLabel::outer_stable)
            continue;
        if (p.a2 > 0.0 && (top[p.i] < 0 || p.j < top[p.i]))
            top[p.i] = p.j;
        if (p.a2 < 0.0 && (bottom[p.i] < 0 || p.j > bottom[p.i]))
            bottom[p.i] = p.j;
    }
    for (int i = 0; i < n; ++i) {
        if (top[i] < 0 || bottom[i] < 0)
            continue;
        for (int j = bottom[i] + 1; j < top[i]; ++j) {
            ++rep.outer_band_cells;
            if (region[static_cast<std::size_t>(j) * n + i])
                ++rep.overlap_cells;
        }
    }
    for (auto v : region)
        rep.inner_region_cells += v;
    // a region that fills some row completely has leaked through a gap
    rep.region_bounded = rep.inner_region_cells > 0;
    for (int j = 0; j < n && rep.region_bounded; ++j) {
        bool full = true;
        for (int i = 0; i < n && full; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * n + i;
            full = region[k] || wall[k];
        }
        if (full)
            rep.region_bounded = false;
    }
    rep.roaming_present = rep.region_bounded && rep.overlap_cells > 0;
    return rep;
}

}  // namespace roamscope
