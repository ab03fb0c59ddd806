#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace roamscope;

namespace {

LDField small_field()
{
    const ModelParams p;
    LDField f = compute_field(p, SectionSpec::radial_section(p, 12), DescriptorSpec::outer(3));
    f.values[30] = std::numeric_limits<double>::infinity();
    f.mask[5] = 1;
    f.values[5] = std::numeric_limits<double>::quiet_NaN();
    return f;
}

std::filesystem::path scratch_dir(const std::string& name)
{
    auto d = std::filesystem::temp_directory_path() / ("roamscope_test_" + name);
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("value formatting")
{
    CHECK(format_value(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_value(-std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_value(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_value(0.1) == "0.10000000000000001");
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int k = 0; k < 1000; ++k) {
        const double v = u(rng);
        CHECK(std::stod(format_value(v)) == v);
    }
}

TEST_CASE("LDG round trip is exact")
{
    const LDField f = small_field();
    const GridFile g = to_grid(f);
    const std::string text = oracle::ldg_text(g);
    CHECK(text.rfind("LDGRID v1\n", 0) == 0);
    CHECK(text.find("\n\n") != std::string::npos);
    CHECK(text.find("nan") != std::string::npos);
    CHECK(text.find("inf") != std::string::npos);

    std::istringstream is(text);
    const GridFile back = read_grid(is);
    CHECK(oracle::ldg_text(back) == text);
    const LDField f2 = field_from_grid(back);
    CHECK(f2.n() == f.n());
    CHECK(f2.descriptor.tau == f.descriptor.tau);
    CHECK(f2.section.axis2.hi == f.section.axis2.hi);
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        if (f.mask[k])
            CHECK(std::isnan(f2.values[k]));
        else
            CHECK(std::bit_cast<std::uint64_t>(f2.values[k]) == std::bit_cast<std::uint64_t>(f.values[k]));
    }
    CHECK(oracle::ldg_text(to_grid(f2)) == text);
}

TEST_CASE("malformed grids name the problem")
{
    auto fails_with = [](const std::string& text, const std::string& fragment) {
        std::istringstream is(text);
        try {
            read_grid(is);
        } catch (const FormatError& e) {
            return std::string(e.what()).find(fragment) != std::string::npos;
        }
        return false;
    };
    CHECK(fails_with("LDGRID v2\n", "LDGRID v1"));
    CHECK(fails_with("LDGRID v1\nn = 2\n\n1,2\n", "ended after 1"));
    CHECK(fails_with("LDGRID v1\nn = 2\n\n1,2\n3\n", "row 1"));
    CHECK(fails_with("LDGRID v1\nn = 2\n\n1,2\n3,x\n", "'x'"));
    CHECK(fails_with("LDGRID v1\nwhat\n", "bad metadata"));
}

TEST_CASE("potential and class grids")
{
    const ModelParams p;
    const GridFile g = potential_grid(p, 200);
    CHECK(g.n == 200);
    CHECK(g.values.size() == 40000);
    CHECK(g.get("quantity") == "U");
    std::istringstream is(oracle::ldg_text(g));
    CHECK(read_grid(is).values == g.values);

    const ClassGrid c = classify_grid(p, SectionSpec::radial_section(p, 8));
    const GridFile cg = to_grid(c);
    for (std::size_t k = 0; k < c.codes.size(); ++k)
        if (c.codes[k] >= 0)
            CHECK(cg.values[k] == c.codes[k]);
}

TEST_CASE("trace round trip")
{
    const ModelParams p;
    ManifoldTrace t;
    t.section = SectionSpec::radial_section(p, 50);
    t.method = "test";
    t.cutoff = 0.5;
    t.tau = 6.0;
    t.n_chains = 2;
    for (int k = 0; k < 50; ++k) {
        t.points.push_back({TraceLabel::inner_unstable, t.section.coord1(k), t.section.coord2(49 - k), 0, k, 49 - k});
        t.points.push_back({TraceLabel::axis_asymptotic, t.section.coord1(k), t.section.coord2(k), 1, k, k});
    }
    std::ostringstream os;
    write_trace(os, t);
    CHECK(os.str().rfind("LDTRACE v1\n", 0) == 0);
    CHECK(os.str().find("W_i^u, ") != std::string::npos);
    std::istringstream is(os.str());
    const ManifoldTrace back = read_trace(is);
    REQUIRE(back.points.size() == t.points.size());
    for (std::size_t k = 0; k < t.points.size(); ++k) {
        CHECK(back.points[k].a1 == t.points[k].a1);
        CHECK(back.points[k].i == t.points[k].i);
        CHECK(back.points[k].j == t.points[k].j);
        CHECK(back.points[k].label == t.points[k].label);
    }
    std::ostringstream again;
    write_trace(again, back);
    CHECK(again.str() == os.str());
}

TEST_CASE("config parsing")
{
    auto load = [](const std::string& cmd, const std::string& ini, const Overrides& ov = {}) {
        std::istringstream is(ini);
        return load_config(cmd, &is, ov);
    };
    const RunConfig d = load("field", "");
    CHECK(d.model == ModelParams{});
    CHECK(d.section.kind == SectionKind::radial);
    CHECK(d.section.n == 100);

    const RunConfig c = load("field", "[model]\na = 2\n[descriptor]\nintegrand = inner-f1-rate\ntau = 6\n"
                                      "[section]\nkind = theta\nn = 50\n");
    CHECK(c.model.a == 2.0);
    CHECK(c.descriptor.integrand == Integrand::inner_f1_rate);
    CHECK(c.descriptor.direction == Direction::backward);
    CHECK(c.descriptor.tau == 6.0);
    CHECK(c.section.kind == SectionKind::theta);
    CHECK(c.section.axis1.hi == 14.0);

    Overrides ov;
    ov.tau = 9.0;
    ov.grid = 33;
    ov.branch = Branch::minus;
    const RunConfig o = load("field", "[descriptor]\ntau = 6\n", ov);
    CHECK(o.descriptor.tau == 9.0);
    CHECK(o.section.n == 33);
    CHECK(o.descriptor.curve.branch == Branch::minus);

    auto error_mentions = [&](const std::string& ini, const std::string& fragment) {
        try {
            load("field", ini);
        } catch (const ConfigError& e) {
            return std::string(e.what()).find(fragment) != std::string::npos;
        }
        return false;
    };
    CHECK(error_mentions("[model]\nbogus = 1\n", "bogus"));
    CHECK(error_mentions("[nowhere]\nx = 1\n", "nowhere"));
    CHECK(error_mentions("[model]\nD_e = abc\n", "model.D_e"));
    CHECK(error_mentions("[descriptor]\ntau = -1\n", "tau"));
    CHECK(error_mentions("[section]\nkind = sideways\n", "sideways"));
    CHECK(error_mentions("[model]\nm_H = -1\n", "m_H"));
    CHECK(error_mentions("[run]\ncommand = orbits\n", "run.command"));
    CHECK_THROWS_AS(load("extract", "[extract]\ninner_field = /nonexistent/a.ldg\nouter_field = /nonexistent/b.ldg\n"),
                    ConfigError);
}

TEST_CASE("manifest reproduces the config")
{
    std::istringstream is("[model]\nc1 = 7.4\n[descriptor]\nintegrand = inner-f2-rate\ntau = 5.5\n"
                          "[section]\nkind = theta\nlevel = 0.25\nn = 40\n[classify]\nt_max = 50\n");
    const RunConfig c = load_config("field", &is, {});
    std::ostringstream m1;
    write_manifest(m1, c, {{"failed_fraction", "0"}});
    std::istringstream back(m1.str());
    const RunConfig c2 = load_config("field", &back, {});
    std::ostringstream m2;
    write_manifest(m2, c2, {{"failed_fraction", "0"}});
    CHECK(m1.str() == m2.str());
    CHECK(c2.model == c.model);
    CHECK(c2.section.level == 0.25);
    CHECK(c2.classify.t_max == 50.0);
}

TEST_CASE("field files reproduce from their manifest")
{
    const auto dir = scratch_dir("manifest");
    std::istringstream is("[descriptor]\ntau = 2\n[section]\nn = 10\n");
    const RunConfig c = load_config("field", &is, {});
    const ModelParams p;
    write_grid(dir / "a.ldg", to_grid(compute_field(c.model, c.section, c.descriptor, c.integrator)));
    write_manifest(dir / "manifest", c);
    const RunConfig c2 = load_config("field", std::optional<std::filesystem::path>(dir / "manifest"), {});
    write_grid(dir / "b.ldg", to_grid(compute_field(c2.model, c2.section, c2.descriptor, c2.integrator)));
    auto slurp = [](const std::filesystem::path& f) {
        std::ifstream in(f);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    CHECK(slurp(dir / "a.ldg") == slurp(dir / "b.ldg"));
    std::filesystem::remove_all(dir);
}
