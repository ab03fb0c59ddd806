#include "roamscope/formats.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <fstream>
#include <sstream>

namespace roamscope {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text)
{
    const std::string s = trim(text);
    if (s == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    if (s == "-inf")
        return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw FormatError("not a number: '" + s + "'");
    return v;
}

int parse_int(const std::string& text)
{
    const std::string s = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw FormatError("not an integer: '" + s + "'");
    return v;
}

const std::string& lookup(const Metadata& meta, const std::string& key)
{
    for (const auto& [k, v] : meta)
        if (k == key)
            return v;
    throw FormatError("missing metadata key '" + key + "'");
}

void write_header(std::ostream& os, const std::string& magic, const Metadata& meta)
{
    os << magic << '\n';
    for (const auto& [k, v] : meta)
        os << k << " = " << v << '\n';
    os << '\n';
}

Metadata read_header(std::istream& is, const std::string& magic)
{
    std::string line;
    if (!std::getline(is, line) || trim(line) != magic)
        throw FormatError("expected '" + magic + "' on the first line");
    Metadata meta;
    while (std::getline(is, line)) {
        if (trim(line).empty())
            return meta;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError("bad metadata line '" + line + "'");
        meta.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    throw FormatError("header ended without a blank line");
}

std::vector<std::string> split_commas(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    return out;
}

}  // namespace

const std::string& GridFile::get(const std::string& key) const { return lookup(meta, key); }

bool GridFile::has(const std::string& key) const
{
    for (const auto& kv : meta)
        if (kv.first == key)
            return true;
    return false;
}

std::string format_value(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_grid(std::ostream& os, const GridFile& g)
{
    write_header(os, "LDGRID v1", g.meta);
    for (int j = 0; j < g.n; ++j) {
        for (int i = 0; i < g.n; ++i) {
            if (i)
                os << ',';
            os << format_value(g.values[static_cast<std::size_t>(j) * g.n + i]);
        }
        os << '\n';
    }
}

GridFile read_grid(std::istream& is)
{
    GridFile g;
    g.meta = read_header(is, "LDGRID v1");
    g.n = parse_int(g.get("n"));
    if (g.n < 1)
        throw FormatError("grid size must be positive");
    g.values.reserve(static_cast<std::size_t>(g.n) * g.n);
    std::string line;
    for (int j = 0; j < g.n; ++j) {
        if (!std::getline(is, line))
            throw FormatError("grid ended after " + std::to_string(j) + " rows");
        const auto cells = split_commas(line);
        if (static_cast<int>(cells.size()) != g.n)
            throw FormatError("row " + std::to_string(j) + " has " + std::to_string(cells.size()) + " values");
        for (const auto& c : cells)
            g.values.push_back(parse_double(c));
    }
    return g;
}

void write_grid(const std::filesystem::path& path, const GridFile& g)
{
    std::ofstream os(path);
    if (!os)
        throw FormatError("cannot write " + path.string());
    write_grid(os, g);
}

GridFile read_grid(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw FormatError("cannot read " + path.string());
    return read_grid(is);
}

Metadata section_metadata(const SectionSpec& s)
{
    return {{"section", to_string(s.kind)},
            {"level", format_value(s.level)},
            {"axis1", s.axis1_name()},
            {"axis1_lo", format_value(s.axis1.lo)},
            {"axis1_hi", format_value(s.axis1.hi)},
            {"axis2", s.axis2_name()},
            {"axis2_lo", format_value(s.axis2.lo)},
            {"axis2_hi", format_value(s.axis2.hi)},
            {"n", std::to_string(s.n)},
            {"cells", "centred"}};
}

SectionSpec section_from_metadata(const Metadata& meta)
{
    SectionSpec s;
    const std::string& kind = lookup(meta, "section");
    if (kind == "theta")
        s.kind = SectionKind::theta;
    else if (kind == "radial")
        s.kind = SectionKind::radial;
    else
        throw FormatError("unknown section kind '" + kind + "'");
    s.level = parse_double(lookup(meta, "level"));
    s.axis1 = {parse_double(lookup(meta, "axis1_lo")), parse_double(lookup(meta, "axis1_hi"))};
    s.axis2 = {parse_double(lookup(meta, "axis2_lo")), parse_double(lookup(meta, "axis2_hi"))};
    s.n = parse_int(lookup(meta, "n"));
    return s;
}

GridFile to_grid(const LDField& f)
{
    GridFile g;
    g.meta = section_metadata(f.section);
    g.meta.emplace_back("descriptor", to_string(f.descriptor.integrand));
    g.meta.emplace_back("direction", to_string(f.descriptor.direction));
    g.meta.emplace_back("tau", format_value(f.descriptor.tau));
    g.meta.emplace_back("rel_tol", format_value(f.integrator.rel_tol));
    g.meta.emplace_back("abs_tol", format_value(f.integrator.abs_tol));
    g.meta.emplace_back("max_step", format_value(f.integrator.max_step));
    g.meta.emplace_back("version", ROAMSCOPE_VERSION);
    g.n = f.n();
    g.values = f.values;
    for (std::size_t k = 0; k < g.values.size(); ++k)
        if (f.mask[k])
            g.values[k] = std::numeric_limits<double>::quiet_NaN();
    return g;
}

LDField field_from_grid(const GridFile& g)
{
    LDField f;
    f.section = section_from_metadata(g.meta);
    if (f.section.n != g.n)
        throw FormatError("section size disagrees with grid size");
    f.descriptor.integrand = integrand_from_string(g.get("descriptor"));
    f.descriptor.direction = direction_from_string(g.get("direction"));
    f.descriptor.tau = parse_double(g.get("tau"));
    f.integrator.rel_tol = parse_double(g.get("rel_tol"));
    f.integrator.abs_tol = parse_double(g.get("abs_tol"));
    f.integrator.max_step = parse_double(g.get("max_step"));
    f.values = g.values;
    f.mask.resize(f.values.size());
    for (std::size_t k = 0; k < f.values.size(); ++k)
        f.mask[k] = std::isnan(f.values[k]) ? 1 : 0;
    return f;
}

GridFile potential_grid(const ModelParams& params, int n, AxisRange r_range, AxisRange theta_range)
{
    if (n < 2)
        throw std::invalid_argument("potential grid needs n >= 2");
    GridFile g;
    g.meta = {{"section", "potential"},
              {"axis1", "r"},
              {"axis1_lo", format_value(r_range.lo)},
              {"axis1_hi", format_value(r_range.hi)},
              {"axis2", "theta"},
              {"axis2_lo", format_value(theta_range.lo)},
              {"axis2_hi", format_value(theta_range.hi)},
              {"n", std::to_string(n)},
              {"cells", "centred"},
              {"quantity", "U"},
              {"version", ROAMSCOPE_VERSION}};
    g.n = n;
    g.values.resize(static_cast<std::size_t>(n) * n);
    const double dr = (r_range.hi - r_range.lo) / n, dt = (theta_range.hi - theta_range.lo) / n;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            g.values[static_cast<std::size_t>(j) * n + i]
                = eval_U(params, r_range.lo + (i + 0.5) * dr, theta_range.lo + (j + 0.5) * dt);
    return g;
}

GridFile to_grid(const ClassGrid& c)
{
    GridFile g;
    g.meta = section_metadata(c.section);
    g.meta.emplace_back("quantity", "class");
    g.meta.emplace_back("classes", "0=direct-dissociation 1=roaming 2=isomerising 3=nonreactive 4=resident-timeout");
    g.meta.emplace_back("t_max", format_value(c.rules.t_max));
    g.meta.emplace_back("section_radius", format_value(c.rules.section_radius));
    g.meta.emplace_back("roaming_crossings", std::to_string(c.rules.roaming_crossings));
    g.meta.emplace_back("version", ROAMSCOPE_VERSION);
    g.n = c.section.n;
    g.values.resize(c.codes.size());
    for (std::size_t k = 0; k < c.codes.size(); ++k)
        g.values[k] = c.codes[k] < 0 ? std::numeric_limits<double>::quiet_NaN()
                    : c.failed[k]    ? std::numeric_limits<double>::infinity()
                                     : c.codes[k];
    return g;
}

void write_trace(std::ostream& os, const ManifoldTrace& t)
{
    Metadata meta = section_metadata(t.section);
    meta.emplace_back("method", t.method);
    meta.emplace_back("cutoff", format_value(t.cutoff));
    meta.emplace_back("tau", format_value(t.tau));
    meta.emplace_back("chains", std::to_string(t.n_chains));
    meta.emplace_back("version", ROAMSCOPE_VERSION);
    write_header(os, "LDTRACE v1", meta);
    for (const auto& p : t.points)
        os << to_string(p.label) << ", " << format_value(p.a1) << ", " << format_value(p.a2) << ", " << p.chain
           << '\n';
}

ManifoldTrace read_trace(std::istream& is)
{
    const Metadata meta = read_header(is, "LDTRACE v1");
    ManifoldTrace t;
    t.section = section_from_metadata(meta);
    t.method = lookup(meta, "method");
    t.cutoff = parse_double(lookup(meta, "cutoff"));
    t.tau = parse_double(lookup(meta, "tau"));
    t.n_chains = parse_int(lookup(meta, "chains"));
    const SectionSpec& s = t.section;
    std::string line;
    while (std::getline(is, line)) {
        if (trim(line).empty())
            continue;
        const auto cells = split_commas(line);
        if (cells.size() != 4)
            throw FormatError("trace row needs 4 fields: '" + line + "'");
        TracePoint p;
        p.label = trace_label_from_string(trim(cells[0]));
        p.a1 = parse_double(cells[1]);
        p.a2 = parse_double(cells[2]);
        p.chain = parse_int(cells[3]);
        p.i = std::clamp(static_cast<int>(std::floor((p.a1 - s.axis1.lo) / s.step1())), 0, s.n - 1);
        p.j = std::clamp(static_cast<int>(std::floor((p.a2 - s.axis2.lo) / s.step2())), 0, s.n - 1);
        t.points.push_back(p);
    }
    return t;
}

void write_trace(const std::filesystem::path& path, const ManifoldTrace& t)
{
    std::ofstream os(path);
    if (!os)
        throw FormatError("cannot write " + path.string());
    write_trace(os, t);
}

ManifoldTrace read_trace(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw FormatError("cannot read " + path.string());
    return read_trace(is);
}

}  // namespace roamscope
