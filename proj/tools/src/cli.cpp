#include "horoflow/cli/commands.hpp"

#include <CLI11.hpp>

#include <functional>
#include <optional>
#include <ostream>

namespace horoflow::cli {

namespace {

struct Common {
    std::string config;
    std::string out;
    bool check = false;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App& sub, Common& c)
{
    sub.add_option("--config", c.config, "TOML configuration file")->check(CLI::ExistingFile);
    sub.add_option("--out", c.out, "output directory (overrides output.dir)");
    sub.add_flag("--check", c.check, "run the embedded acceptance assertions");
    sub.add_option("--seed", c.seed, "seed override");
}

template <class T>
void override_with(const std::optional<T>& flag, T& target)
{
    if (flag) target = *flag;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Axisymmetric inverse curvature flows of horo-convex surfaces in hyperbolic 3-space"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "horoflow " HOROFLOW_VERSION);

    Common common;
    std::function<int(RunConfig&, const CommandContext&)> action;

    auto* sim = app.add_subcommand("simulate", "run the flow and write diagnostics.csv, summary.json, profile_final.csv");
    add_common(*sim, common);
    sim->callback([&] { action = [](RunConfig& c, const CommandContext& x) { return simulate(c, x); }; });

    struct {
        std::optional<double> theta0, p, horizon;
        std::optional<int> n, samples;
    } sph;
    auto* sp = app.add_subcommand("spherical", "exact round solution and its maximal time");
    add_common(*sp, common);
    sp->add_option("--theta0", sph.theta0, "initial radius");
    sp->add_option("--p", sph.p, "flow power");
    sp->add_option("--n", sph.n, "dimension of the hypersurface");
    sp->add_option("--horizon", sph.horizon, "fraction of T* to sample");
    sp->add_option("--samples", sph.samples, "number of samples");
    sp->callback([&] {
        action = [&](RunConfig& c, const CommandContext& x) {
            override_with(sph.theta0, c.spherical.theta0);
            override_with(sph.p, c.spherical.p);
            override_with(sph.n, c.spherical.n);
            override_with(sph.horizon, c.spherical.horizon);
            override_with(sph.samples, c.spherical.samples);
            validate_config(c);
            return spherical(c, x);
        };
    });

    struct {
        std::optional<double> a2, b2, c3, p, radius;
        std::optional<int> grid;
    } ce;
    auto* cx = app.add_subcommand("counterexample", "rate of the shifted second fundamental form on the quartic patch");
    add_common(*cx, common);
    cx->add_option("--a2", ce.a2, "x2^2 coefficient at the origin (> 0)");
    cx->add_option("--b2", ce.b2, "x1-slope of the x2^2 coefficient (> 0)");
    cx->add_option("--c3", ce.c3, "height of the patch above the plane (> 0)");
    cx->add_option("--p", ce.p, "flow power");
    cx->add_option("--radius", ce.radius, "half-width of the sampled window");
    cx->add_option("--grid", ce.grid, "lattice points per side");
    cx->callback([&] {
        action = [&](RunConfig& c, const CommandContext& x) {
            override_with(ce.a2, c.counterexample.params.a2);
            override_with(ce.b2, c.counterexample.params.b2);
            override_with(ce.c3, c.counterexample.params.c3);
            override_with(ce.p, c.counterexample.p);
            override_with(ce.radius, c.counterexample.radius);
            override_with(ce.grid, c.counterexample.grid);
            validate_config(c);
            return counterexample(c, x);
        };
    });

    struct {
        std::optional<std::string> fn;
        std::optional<int> n, samples;
    } cf;
    auto* cc = app.add_subcommand("curvfun-check", "certify the structure flags of a catalog curvature function");
    add_common(*cc, common);
    cc->add_option("--fn", cf.fn, "catalog id");
    cc->add_option("--n", cf.n, "dimension");
    cc->add_option("--samples", cf.samples, "number of random samples");
    cc->callback([&] {
        action = [&](RunConfig& c, const CommandContext& x) {
            override_with(cf.fn, c.curvfun.fn);
            override_with(cf.n, c.curvfun.n);
            override_with(cf.samples, c.curvfun.samples);
            validate_config(c);
            return curvfun_check(c, x);
        };
    });

    struct {
        std::optional<std::string> profile, fn;
        std::optional<double> p;
        std::optional<int> n_grid;
    } su;
    auto* sc = app.add_subcommand("support-check", "compare support-route and graph-route curvatures");
    add_common(*sc, common);
    sc->add_option("--profile", su.profile, "support function CSV (phi,s)");
    sc->add_option("--fn", su.fn, "catalog id");
    sc->add_option("--p", su.p, "flow power");
    sc->add_option("--n-grid", su.n_grid, "cells of the resampled radial graph");
    sc->callback([&] {
        action = [&](RunConfig& c, const CommandContext& x) {
            if (su.profile) c.support.file = *su.profile;
            override_with(su.fn, c.support.fn);
            override_with(su.p, c.support.p);
            override_with(su.n_grid, c.support.n_grid);
            validate_config(c);
            return support_check(c, x);
        };
    });

    std::optional<int> threads;
    auto* sw = app.add_subcommand("sweep", "run the configs listed in [sweep] concurrently");
    add_common(*sw, common);
    sw->add_option("--threads", threads, "worker threads (0: all cores)");
    sw->callback([&] {
        action = [&](RunConfig& c, const CommandContext& x) {
            override_with(threads, c.sweep.threads);
            validate_config(c);
            return sweep(c, x);
        };
    });

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        (void)app.exit(e, out, err);
        return kValidationError;
    }

    try {
        RunConfig cfg = common.config.empty() ? RunConfig{} : load_config(common.config);
        if (common.seed) cfg.seed = common.seed;
        if (!common.out.empty()) cfg.output.dir = common.out;
        validate_config(cfg);
        const CommandContext ctx{cfg.output.dir, common.check, &out, &err};
        return action(cfg, ctx);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalEvent;
    }
}

}  // namespace horoflow::cli
