#include "roamscope/survey.hpp"

#include <cmath>
#include <limits>

#include <omp.h>

namespace roamscope {

namespace {

LDField blank_field(const SectionSpec& section, const DescriptorSpec& descriptor, const IntegratorSettings& integrator,
                    const SeedGrid& seeds)
{
    LDField f;
    f.section = section;
    f.descriptor = descriptor;
    f.integrator = integrator;
    f.mask = seeds.mask;
    f.values.assign(seeds.states.size(), std::numeric_limits<double>::quiet_NaN());
    return f;
}

void check_inputs(const SectionSpec& section, const DescriptorSpec& descriptor, const IntegratorSettings& integrator)
{
    section.validate();
    descriptor.validate();
    integrator.validate();
}

}  // namespace

LDField compute_field(const ModelParams& params, const SectionSpec& section, const DescriptorSpec& descriptor,
                      const IntegratorSettings& integrator, int threads)
{
    check_inputs(section, descriptor, integrator);
    const SeedGrid seeds = seed_grid(params, section);
    LDField f = blank_field(section, descriptor, integrator, seeds);
    const FieldContext ctx(params);
    const RateIntegrand integrand = make_integrand(descriptor);
    const StepControl ctl = integrator.control();
    const long cells = static_cast<long>(seeds.states.size());
    const int workers = threads > 0 ? threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 16) num_threads(workers)
    for (long k = 0; k < cells; ++k) {
        if (seeds.mask[k])
            continue;
        f.values[k] = ld_value(ctx, seeds.states[k], descriptor.tau, descriptor.direction, integrand, ctl);
    }
    return f;
}

LDField compute_field_serial(const ModelParams& params, const SectionSpec& section, const DescriptorSpec& descriptor,
                             const IntegratorSettings& integrator)
{
    check_inputs(section, descriptor, integrator);
    const SeedGrid seeds = seed_grid(params, section);
    LDField f = blank_field(section, descriptor, integrator, seeds);
    const FieldContext ctx(params);
    const RateIntegrand integrand = make_integrand(descriptor);
    const StepControl ctl = integrator.control();
    for (std::size_t k = 0; k < seeds.states.size(); ++k) {
        if (seeds.mask[k])
            continue;
        f.values[k] = ld_value(ctx, seeds.states[k], descriptor.tau, descriptor.direction, integrand, ctl);
    }
    return f;
}

LDProfile compute_profile(const ModelParams& params, const SectionSpec& section, const DescriptorSpec& descriptor,
                          double fixed1, const IntegratorSettings& integrator, int threads)
{
    check_inputs(section, descriptor, integrator);
    const FieldContext ctx(params);
    const RateIntegrand integrand = make_integrand(descriptor);
    const StepControl ctl = integrator.control();
    LDProfile p;
    p.fixed1 = fixed1;
    p.coords.resize(section.n);
    p.values.assign(section.n, std::numeric_limits<double>::quiet_NaN());
    for (int j = 0; j < section.n; ++j)
        p.coords[j] = section.coord2(j);
    const int workers = threads > 0 ? threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (int j = 0; j < section.n; ++j) {
        const auto s = section_state(params, section, fixed1, p.coords[j]);
        if (s)
            p.values[j] = ld_value(ctx, s->packed(), descriptor.tau, descriptor.direction, integrand, ctl);
    }
    return p;
}

}  // namespace roamscope
