#include "roamscope/config.hpp"

#include "roamscope/formats.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>

namespace roamscope {

namespace pt = boost::property_tree;

namespace {

using Setter = std::function<void(const std::string&)>;

double to_double(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("bad value for " + key + ": '" + text + "'");
    return v;
}

int to_int(const std::string& key, const std::string& text)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("bad value for " + key + ": '" + text + "'");
    return v;
}

template <class F>
auto checked(const std::string& key, const std::string& text, F&& parse)
{
    try {
        return parse(text);
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad value for " + key + ": '" + text + "'");
    }
}

// Keys of one section, each bound to the place it writes.
class Section {
public:
    Section& num(const std::string& key, double& target)
    {
        setters_[key] = [this, key, &target](const std::string& v) { target = to_double(name_ + "." + key, v); };
        return *this;
    }
    Section& integer(const std::string& key, int& target)
    {
        setters_[key] = [this, key, &target](const std::string& v) { target = to_int(name_ + "." + key, v); };
        return *this;
    }
    Section& custom(const std::string& key, Setter s)
    {
        setters_[key] = std::move(s);
        return *this;
    }

    explicit Section(std::string name) : name_(std::move(name)) {}

    void apply(const pt::ptree& tree) const
    {
        for (const auto& [key, child] : tree) {
            if (!child.empty())
                throw ConfigError("nested key in [" + name_ + "]: " + key);
            const auto it = setters_.find(key);
            if (it == setters_.end())
                throw ConfigError("unknown key [" + name_ + "] " + key);
            it->second(child.data());
        }
    }

private:
    std::string name_;
    std::map<std::string, Setter> setters_;
};

const pt::ptree* find_section(const pt::ptree& root, const std::string& name)
{
    const auto it = root.find(name);
    return it == root.not_found() ? nullptr : &it->second;
}

void apply_model(const pt::ptree* tree, ModelParams& m)
{
    if (!tree)
        return;
    Section("model")
        .num("m_H", m.m_H)
        .num("m_CH3", m.m_CH3)
        .num("I_CH3", m.I_CH3)
        .num("D_e", m.D_e)
        .num("c1", m.c1)
        .num("c2", m.c2)
        .num("r_e", m.r_e)
        .num("U_e", m.U_e)
        .num("a", m.a)
        .apply(*tree);
}

void apply_integrator(const pt::ptree* tree, IntegratorSettings& s)
{
    if (!tree)
        return;
    Section("integrator")
        .num("rel_tol", s.rel_tol)
        .num("abs_tol", s.abs_tol)
        .num("max_step", s.max_step)
        .num("t_max", s.t_max)
        .custom("direction",
                [&](const std::string& v) {
                    s.direction = checked("integrator.direction", v, direction_from_string);
                })
        .apply(*tree);
}

}  // namespace

RunConfig load_config(const std::string& command, std::istream* ini, const Overrides& overrides,
                      const std::filesystem::path& default_out)
{
    static const std::vector<std::string> commands{"potential", "orbits", "field", "extract", "classify"};
    if (std::find(commands.begin(), commands.end(), command) == commands.end())
        throw ConfigError("unknown command '" + command + "'");

    pt::ptree root;
    if (ini) {
        try {
            pt::read_ini(*ini, root);
        } catch (const pt::ini_parser_error& e) {
            throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
        }
    }
    static const std::vector<std::string> sections{"run",    "model",  "integrator", "descriptor", "section",
                                                   "potential", "orbits", "extract", "classify", "result"};
    for (const auto& [name, child] : root) {
        if (child.empty() && !child.data().empty())
            throw ConfigError("key outside a section: " + name);
        if (std::find(sections.begin(), sections.end(), name) == sections.end())
            throw ConfigError("unknown section [" + name + "]");
    }

    RunConfig cfg;
    cfg.command = command;
    cfg.out_dir = default_out;

    if (const auto* run = find_section(root, "run")) {
        std::string version;
        Section("run")
            .custom("command",
                    [&](const std::string& v) {
                        if (v != command)
                            throw ConfigError("run.command is '" + v + "', not '" + command + "'");
                    })
            .custom("version", [&](const std::string& v) { version = v; })
            .apply(*run);
    }

    apply_model(find_section(root, "model"), cfg.model);
    try {
        cfg.model.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    apply_integrator(find_section(root, "integrator"), cfg.integrator);

    // orbits first: the branch also picks the descriptor's reference curve
    if (const auto* t = find_section(root, "orbits"))
        Section("orbits")
            .integer("segments", cfg.orbits.segments)
            .custom("branch",
                    [&](const std::string& v) { cfg.orbits.branch = checked("orbits.branch", v, branch_from_string); })
            .apply(*t);
    if (overrides.branch)
        cfg.orbits.branch = *overrides.branch;

    bool direction_set = false;
    if (const auto* t = find_section(root, "descriptor"))
        Section("descriptor")
            .custom("integrand",
                    [&](const std::string& v) {
                        cfg.descriptor.integrand = checked("descriptor.integrand", v, integrand_from_string);
                        if (cfg.descriptor.integrand == Integrand::user)
                            throw ConfigError("descriptor.integrand 'user' is only available from the library");
                    })
            .custom("direction",
                    [&](const std::string& v) {
                        cfg.descriptor.direction = checked("descriptor.direction", v, direction_from_string);
                        direction_set = true;
                    })
            .num("tau", cfg.descriptor.tau)
            .apply(*t);
    if (!direction_set)
        cfg.descriptor.direction
            = cfg.descriptor.integrand == Integrand::radial_rate ? Direction::forward : Direction::backward;
    if (overrides.tau)
        cfg.descriptor.tau = *overrides.tau;
    cfg.descriptor.curve = tabulated_inner_orbit(cfg.orbits.branch);

    // section: kind, level and n pick the default ranges, explicit ranges win
    std::string kind = "radial";
    std::optional<double> level;
    int n = 100;
    std::optional<double> lo1, hi1, lo2, hi2;
    if (const auto* t = find_section(root, "section")) {
        double lv = 0.0, a = 0.0, b = 0.0, c = 0.0, d = 0.0;
        Section("section")
            .custom("kind", [&](const std::string& v) { kind = v; })
            .custom("level", [&](const std::string& v) { level = (lv = to_double("section.level", v)); })
            .integer("n", n)
            .custom("axis1_lo", [&](const std::string& v) { lo1 = (a = to_double("section.axis1_lo", v)); })
            .custom("axis1_hi", [&](const std::string& v) { hi1 = (b = to_double("section.axis1_hi", v)); })
            .custom("axis2_lo", [&](const std::string& v) { lo2 = (c = to_double("section.axis2_lo", v)); })
            .custom("axis2_hi", [&](const std::string& v) { hi2 = (d = to_double("section.axis2_hi", v)); })
            .apply(*t);
    }
    if (overrides.grid)
        n = *overrides.grid;
    if (n < 2)
        throw ConfigError("section.n must be at least 2");
    try {
        if (kind == "radial")
            cfg.section = SectionSpec::radial_section(cfg.model, n, level.value_or(3.6));
        else if (kind == "theta")
            cfg.section = SectionSpec::theta_section(cfg.model, n, level.value_or(0.0));
        else
            throw ConfigError("section.kind must be theta or radial, not '" + kind + "'");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("section: ") + e.what());
    }
    if (lo1)
        cfg.section.axis1.lo = *lo1;
    if (hi1)
        cfg.section.axis1.hi = *hi1;
    if (lo2)
        cfg.section.axis2.lo = *lo2;
    if (hi2)
        cfg.section.axis2.hi = *hi2;

    if (const auto* t = find_section(root, "potential"))
        Section("potential")
            .integer("grid", cfg.potential.grid)
            .num("r_lo", cfg.potential.r.lo)
            .num("r_hi", cfg.potential.r.hi)
            .num("theta_lo", cfg.potential.theta.lo)
            .num("theta_hi", cfg.potential.theta.hi)
            .apply(*t);
    if (overrides.grid)
        cfg.potential.grid = *overrides.grid;

    if (const auto* t = find_section(root, "extract"))
        Section("extract")
            .custom("inner_field", [&](const std::string& v) { cfg.extract.inner_field = v; })
            .custom("outer_field", [&](const std::string& v) { cfg.extract.outer_field = v; })
            .num("cutoff_fraction", cfg.extract.ridges.cutoff_fraction)
            .integer("ridge_jump", cfg.extract.ridges.jump)
            .integer("ridge_min_chain", cfg.extract.ridges.min_chain)
            .integer("straight_spread", cfg.extract.ridges.straight_spread)
            .num("prominence", cfg.extract.minima.prominence)
            .integer("minima_jump", cfg.extract.minima.jump)
            .integer("minima_min_chain", cfg.extract.minima.min_chain)
            .num("anchor1", cfg.extract.anchor1)
            .num("anchor2", cfg.extract.anchor2)
            .apply(*t);

    if (const auto* t = find_section(root, "classify"))
        Section("classify")
            .num("t_max", cfg.classify.t_max)
            .num("section_radius", cfg.classify.section_radius)
            .integer("roaming_crossings", cfg.classify.roaming_crossings)
            .apply(*t);

    if (overrides.out_dir)
        cfg.out_dir = *overrides.out_dir;
    if (overrides.threads)
        cfg.threads = *overrides.threads;

    // validation of the resolved values
    auto wrap = [](const char* what, auto&& fn) {
        try {
            fn();
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(std::string(what) + ": " + e.what());
        }
    };
    wrap("integrator", [&] { cfg.integrator.validate(); });
    wrap("descriptor", [&] { cfg.descriptor.validate(); });
    wrap("section", [&] { cfg.section.validate(); });
    if (cfg.threads < 0)
        throw ConfigError("threads must be non-negative");
    if (cfg.orbits.segments < 20)
        throw ConfigError("orbits.segments must be at least 20");
    if (cfg.potential.grid < 0 || cfg.potential.grid == 1)
        throw ConfigError("potential.grid must be 0 or at least 2");
    if (!(cfg.potential.r.lo > 0.0 && cfg.potential.r.hi > cfg.potential.r.lo))
        throw ConfigError("potential.r_lo/r_hi must satisfy 0 < r_lo < r_hi");
    if (!(cfg.potential.theta.hi > cfg.potential.theta.lo))
        throw ConfigError("potential.theta_lo must be below theta_hi");
    if (!(cfg.classify.t_max > 0.0))
        throw ConfigError("classify.t_max must be positive");
    if (!(cfg.classify.section_radius > 0.0))
        throw ConfigError("classify.section_radius must be positive");
    if (cfg.classify.roaming_crossings < 1)
        throw ConfigError("classify.roaming_crossings must be positive");
    if (!(cfg.extract.ridges.cutoff_fraction > 0.0 && cfg.extract.ridges.cutoff_fraction <= 1.0))
        throw ConfigError("extract.cutoff_fraction must lie in (0, 1]");
    if (!(cfg.extract.minima.prominence >= 0.0 && cfg.extract.minima.prominence < 1.0))
        throw ConfigError("extract.prominence must lie in [0, 1)");
    if (command == "extract") {
        if (cfg.extract.inner_field.empty() || cfg.extract.outer_field.empty())
            throw ConfigError("extract needs extract.inner_field and extract.outer_field");
        for (const auto* p : {&cfg.extract.inner_field, &cfg.extract.outer_field})
            if (!std::filesystem::is_regular_file(*p))
                throw ConfigError("referenced file does not exist: " + p->string());
    }
    return cfg;
}

RunConfig load_config(const std::string& command, const std::optional<std::filesystem::path>& ini_path,
                      const Overrides& overrides, const std::filesystem::path& default_out)
{
    if (!ini_path)
        return load_config(command, nullptr, overrides, default_out);
    std::ifstream is(*ini_path);
    if (!is)
        throw ConfigError("cannot read config " + ini_path->string());
    return load_config(command, &is, overrides, default_out);
}

void write_manifest(std::ostream& os, const RunConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>& results)
{
    auto kv = [&](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
    auto num = [&](const char* k, double v) { kv(k, format_value(v)); };

    os << "[run]\n";
    kv("command", cfg.command);
    kv("version", ROAMSCOPE_VERSION);

    const ModelParams& m = cfg.model;
    os << "\n[model]\n";
    num("m_H", m.m_H);
    num("m_CH3", m.m_CH3);
    num("I_CH3", m.I_CH3);
    num("D_e", m.D_e);
    num("c1", m.c1);
    num("c2", m.c2);
    num("r_e", m.r_e);
    num("U_e", m.U_e);
    num("a", m.a);

    os << "\n[integrator]\n";
    num("rel_tol", cfg.integrator.rel_tol);
    num("abs_tol", cfg.integrator.abs_tol);
    num("max_step", cfg.integrator.max_step);
    num("t_max", cfg.integrator.t_max);
    kv("direction", to_string(cfg.integrator.direction));

    os << "\n[descriptor]\n";
    kv("integrand", to_string(cfg.descriptor.integrand));
    kv("direction", to_string(cfg.descriptor.direction));
    num("tau", cfg.descriptor.tau);

    const SectionSpec& s = cfg.section;
    os << "\n[section]\n";
    kv("kind", to_string(s.kind));
    num("level", s.level);
    kv("n", std::to_string(s.n));
    num("axis1_lo", s.axis1.lo);
    num("axis1_hi", s.axis1.hi);
    num("axis2_lo", s.axis2.lo);
    num("axis2_hi", s.axis2.hi);

    os << "\n[potential]\n";
    kv("grid", std::to_string(cfg.potential.grid));
    num("r_lo", cfg.potential.r.lo);
    num("r_hi", cfg.potential.r.hi);
    num("theta_lo", cfg.potential.theta.lo);
    num("theta_hi", cfg.potential.theta.hi);

    os << "\n[orbits]\n";
    kv("segments", std::to_string(cfg.orbits.segments));
    kv("branch", to_string(cfg.orbits.branch));

    const ExtractOptions& e = cfg.extract;
    os << "\n[extract]\n";
    if (!e.inner_field.empty())
        kv("inner_field", std::filesystem::absolute(e.inner_field).string());
    if (!e.outer_field.empty())
        kv("outer_field", std::filesystem::absolute(e.outer_field).string());
    num("cutoff_fraction", e.ridges.cutoff_fraction);
    kv("ridge_jump", std::to_string(e.ridges.jump));
    kv("ridge_min_chain", std::to_string(e.ridges.min_chain));
    kv("straight_spread", std::to_string(e.ridges.straight_spread));
    num("prominence", e.minima.prominence);
    kv("minima_jump", std::to_string(e.minima.jump));
    kv("minima_min_chain", std::to_string(e.minima.min_chain));
    num("anchor1", e.anchor1);
    num("anchor2", e.anchor2);

    os << "\n[classify]\n";
    num("t_max", cfg.classify.t_max);
    num("section_radius", cfg.classify.section_radius);
    kv("roaming_crossings", std::to_string(cfg.classify.roaming_crossings));

    if (!results.empty()) {
        os << "\n[result]\n";
        for (const auto& [k, v] : results)
            kv(k.c_str(), v);
    }
}

void write_manifest(const std::filesystem::path& path, const RunConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>& results)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    write_manifest(os, cfg, results);
}

}  // namespace roamscope
