#include "horoflow/cli/config.hpp"

#include "horoflow/diagnostics.hpp"
#include "horoflow/graphcurv.hpp"
#include "horoflow/horosupport.hpp"

#include <toml.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace horoflow::cli {

namespace {

using KeySet = std::set<std::string, std::less<>>;

const std::map<std::string, KeySet, std::less<>>& schema()
{
    static const std::map<std::string, KeySet, std::less<>> s{
        {"surface", {"type", "theta0", "mode", "amplitude", "max_mode", "n_grid", "file"}},
        {"flow",
         {"fn", "p", "tau_end", "cfl", "fixed_dtau", "diag_interval", "rematch", "guard", "guard_band", "barrier_tol",
          "modes", "hausdorff_azimuths", "track_center", "max_steps"}},
        {"output", {"dir", "csv", "json_summary"}},
        {"check", {"max_abs_sigma", "pinch_r2_min", "pinch_final_ratio_max", "osc_exponent_range"}},
        {"spherical", {"theta0", "p", "n", "horizon", "samples"}},
        {"counterexample", {"a2", "b2", "c3", "p", "radius", "grid"}},
        {"curvfun", {"fn", "n", "samples"}},
        {"support", {"file", "fn", "p", "n_grid"}},
        {"sweep", {"configs", "threads"}},
    };
    return s;
}

std::string where(std::string_view table, std::string_view key)
{
    return std::string(table) + "." + std::string(key);
}

double get_number(const toml::table& t, std::string_view table, std::string_view key, double fallback)
{
    const toml::node* n = t.get(key);
    if (!n) return fallback;
    if (auto v = n->value_exact<double>()) return *v;
    if (auto v = n->value_exact<int64_t>()) return static_cast<double>(*v);
    throw ConfigError(where(table, key) + " must be a number");
}

int64_t get_integer(const toml::table& t, std::string_view table, std::string_view key, int64_t fallback)
{
    const toml::node* n = t.get(key);
    if (!n) return fallback;
    if (auto v = n->value_exact<int64_t>()) return *v;
    throw ConfigError(where(table, key) + " must be an integer");
}

int get_int(const toml::table& t, std::string_view table, std::string_view key, int fallback)
{
    const int64_t v = get_integer(t, table, key, fallback);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw ConfigError(where(table, key) + " is out of range");
    return static_cast<int>(v);
}

bool get_bool(const toml::table& t, std::string_view table, std::string_view key, bool fallback)
{
    const toml::node* n = t.get(key);
    if (!n) return fallback;
    if (auto v = n->value_exact<bool>()) return *v;
    throw ConfigError(where(table, key) + " must be a boolean");
}

std::string get_string(const toml::table& t, std::string_view table, std::string_view key, std::string fallback)
{
    const toml::node* n = t.get(key);
    if (!n) return fallback;
    if (auto v = n->value_exact<std::string>()) return *v;
    throw ConfigError(where(table, key) + " must be a string");
}

std::optional<double> get_optional(const toml::table& t, std::string_view table, std::string_view key)
{
    if (!t.contains(key)) return std::nullopt;
    return get_number(t, table, key, 0.0);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& s)
{
    if (s.empty()) return {};
    std::filesystem::path p(s);
    return p.is_absolute() ? p : base / p;
}

void require(bool ok, const std::string& msg)
{
    if (!ok) throw ConfigError(msg);
}

Rematch parse_rematch(const std::string& s)
{
    if (s == "mean") return Rematch::Mean;
    if (s == "none") return Rematch::None;
    throw ConfigError("flow.rematch must be \"mean\" or \"none\"");
}

ConvexityGuard parse_guard(const std::string& s)
{
    if (s == "auto") return ConvexityGuard::Auto;
    if (s == "strict") return ConvexityGuard::Strict;
    if (s == "record") return ConvexityGuard::Record;
    throw ConfigError("flow.guard must be \"auto\", \"strict\" or \"record\"");
}

const toml::table* section(const toml::table& root, std::string_view name)
{
    const toml::node* n = root.get(name);
    if (!n) return nullptr;
    const toml::table* t = n->as_table();
    if (!t) throw ConfigError(std::string(name) + " must be a table");
    return t;
}

void check_keys(const toml::table& root)
{
    const auto& sch = schema();
    for (const auto& [k, v] : root) {
        const std::string_view key = k.str();
        if (key == "seed") continue;
        const auto it = sch.find(key);
        if (it == sch.end()) throw ConfigError("unknown key: " + std::string(key));
        const toml::table* t = v.as_table();
        if (!t) throw ConfigError(std::string(key) + " must be a table");
        for (const auto& [kk, vv] : *t)
            if (!it->second.contains(kk.str())) throw ConfigError("unknown key: " + where(key, kk.str()));
    }
}

}  // namespace

void validate_config(const RunConfig& c)
{
    const auto& s = c.surface;
    static const KeySet types{"sphere", "legendre", "ellipsoid", "random", "file"};
    require(types.contains(s.type), "surface.type must be one of sphere, legendre, ellipsoid, random, file");
    require(std::isfinite(s.theta0) && s.theta0 > 0.0, "surface.theta0 must be > 0");
    require(s.n_grid >= kMinGrid, "surface.n_grid must be >= " + std::to_string(kMinGrid));
    require(s.mode >= 0, "surface.mode must be >= 0");
    require(s.max_mode >= 1 && s.max_mode <= s.n_grid / 4, "surface.max_mode must lie in [1, n_grid / 4]");
    require(std::isfinite(s.amplitude), "surface.amplitude must be finite");
    if (s.type == "file") require(!s.file.empty(), "surface.file is required when surface.type = \"file\"");
    if (s.type == "random") require(c.seed.has_value(), "seed is required when surface.type = \"random\"");

    const auto& f = c.flow;
    require(std::isfinite(f.p) && f.p > 0.0, "flow.p must be > 0");
    const auto& o = f.options;
    require(std::isfinite(o.tau_end) && o.tau_end >= 0.0, "flow.tau_end must be >= 0");
    require(std::isfinite(o.cfl) && o.cfl > 0.0, "flow.cfl must be > 0");
    require(std::isfinite(o.fixed_dtau) && o.fixed_dtau >= 0.0, "flow.fixed_dtau must be >= 0");
    require(std::isfinite(o.diag_interval) && o.diag_interval > 0.0, "flow.diag_interval must be > 0");
    require(o.guard_band > 0.0, "flow.guard_band must be > 0");
    require(o.barrier_tol >= 0.0, "flow.barrier_tol must be >= 0");
    require(o.modes >= 0, "flow.modes must be >= 0");
    require(o.hausdorff_azimuths >= 1, "flow.hausdorff_azimuths must be >= 1");
    require(o.max_steps > 0, "flow.max_steps must be > 0");
    try {
        (void)CurvatureFunction::from_id(f.fn, 2);
    } catch (const std::exception& e) {
        throw ConfigError("flow.fn: " + std::string(e.what()));
    }

    const auto& sp = c.spherical;
    require(sp.theta0 > 0.0 && sp.p > 0.0 && sp.n >= 1, "spherical: theta0, p must be > 0 and n >= 1");
    require(sp.horizon > 0.0 && sp.horizon < 1.0, "spherical.horizon must lie in (0, 1)");
    require(sp.samples >= 2, "spherical.samples must be >= 2");

    const auto& ce = c.counterexample;
    try {
        ce.params.validate();
    } catch (const std::exception& e) {
        throw ConfigError("counterexample: " + std::string(e.what()));
    }
    require(ce.p > 0.0, "counterexample.p must be > 0");
    require(ce.radius > 0.0 && ce.radius <= 0.1, "counterexample.radius must lie in (0, 0.1]");
    require(ce.grid >= 5, "counterexample.grid must be >= 5");

    require(c.curvfun.n >= 1 && c.curvfun.samples >= 1, "curvfun: n and samples must be >= 1");
    require(c.support.p > 0.0 && c.support.n_grid >= kMinGrid, "support: p must be > 0 and n_grid >= 16");
    require(c.sweep.threads >= 0, "sweep.threads must be >= 0");
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base)
{
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "TOML parse error: " << e.description() << " (line " << e.source().begin.line << ")";
        throw ConfigError(os.str());
    }
    check_keys(root);

    RunConfig c;
    if (const toml::node* n = root.get("seed")) {
        const auto v = n->value_exact<int64_t>();
        if (!v || *v < 0) throw ConfigError("seed must be a nonnegative integer");
        c.seed = static_cast<std::uint64_t>(*v);
    }

    if (const toml::table* t = section(root, "surface")) {
        auto& s = c.surface;
        s.type = get_string(*t, "surface", "type", s.type);
        s.theta0 = get_number(*t, "surface", "theta0", s.theta0);
        s.mode = get_int(*t, "surface", "mode", s.mode);
        s.amplitude = get_number(*t, "surface", "amplitude", s.amplitude);
        s.max_mode = get_int(*t, "surface", "max_mode", s.max_mode);
        s.n_grid = get_int(*t, "surface", "n_grid", s.n_grid);
        s.file = resolve(base, get_string(*t, "surface", "file", ""));
    }
    if (const toml::table* t = section(root, "flow")) {
        auto& f = c.flow;
        auto& o = f.options;
        f.fn = get_string(*t, "flow", "fn", f.fn);
        f.p = get_number(*t, "flow", "p", f.p);
        o.tau_end = get_number(*t, "flow", "tau_end", o.tau_end);
        o.cfl = get_number(*t, "flow", "cfl", o.cfl);
        o.fixed_dtau = get_number(*t, "flow", "fixed_dtau", o.fixed_dtau);
        o.diag_interval = get_number(*t, "flow", "diag_interval", o.diag_interval);
        o.rematch = parse_rematch(get_string(*t, "flow", "rematch", "mean"));
        o.guard = parse_guard(get_string(*t, "flow", "guard", "auto"));
        o.guard_band = get_number(*t, "flow", "guard_band", o.guard_band);
        o.barrier_tol = get_number(*t, "flow", "barrier_tol", o.barrier_tol);
        o.modes = get_int(*t, "flow", "modes", o.modes);
        o.hausdorff_azimuths = get_int(*t, "flow", "hausdorff_azimuths", o.hausdorff_azimuths);
        o.track_center = get_bool(*t, "flow", "track_center", o.track_center);
        o.max_steps = get_integer(*t, "flow", "max_steps", o.max_steps);
    }
    if (const toml::table* t = section(root, "output")) {
        auto& o = c.output;
        o.dir = resolve(base, get_string(*t, "output", "dir", o.dir.string()));
        o.csv = get_bool(*t, "output", "csv", o.csv);
        o.json_summary = get_bool(*t, "output", "json_summary", o.json_summary);
    }
    if (const toml::table* t = section(root, "check")) {
        auto& k = c.check;
        k.max_abs_sigma = get_optional(*t, "check", "max_abs_sigma");
        k.pinch_r2_min = get_optional(*t, "check", "pinch_r2_min");
        k.pinch_final_ratio_max = get_optional(*t, "check", "pinch_final_ratio_max");
        if (const toml::node* n = t->get("osc_exponent_range")) {
            const toml::array* a = n->as_array();
            if (!a || a->size() != 2) throw ConfigError("check.osc_exponent_range must be [lo, hi]");
            auto num = [](const toml::node& x) -> double {
                if (auto v = x.value<double>()) return *v;
                throw ConfigError("check.osc_exponent_range must hold numbers");
            };
            k.osc_exponent_range = std::pair{num(*a->get(0)), num(*a->get(1))};
        }
    }
    if (const toml::table* t = section(root, "spherical")) {
        auto& s = c.spherical;
        s.theta0 = get_number(*t, "spherical", "theta0", s.theta0);
        s.p = get_number(*t, "spherical", "p", s.p);
        s.n = get_int(*t, "spherical", "n", s.n);
        s.horizon = get_number(*t, "spherical", "horizon", s.horizon);
        s.samples = get_int(*t, "spherical", "samples", s.samples);
    }
    if (const toml::table* t = section(root, "counterexample")) {
        auto& ce = c.counterexample;
        ce.params.a2 = get_number(*t, "counterexample", "a2", ce.params.a2);
        ce.params.b2 = get_number(*t, "counterexample", "b2", ce.params.b2);
        ce.params.c3 = get_number(*t, "counterexample", "c3", ce.params.c3);
        ce.p = get_number(*t, "counterexample", "p", ce.p);
        ce.radius = get_number(*t, "counterexample", "radius", ce.radius);
        ce.grid = get_int(*t, "counterexample", "grid", ce.grid);
    }
    if (const toml::table* t = section(root, "curvfun")) {
        auto& cf = c.curvfun;
        cf.fn = get_string(*t, "curvfun", "fn", cf.fn);
        cf.n = get_int(*t, "curvfun", "n", cf.n);
        cf.samples = get_int(*t, "curvfun", "samples", cf.samples);
    }
    if (const toml::table* t = section(root, "support")) {
        auto& s = c.support;
        s.file = resolve(base, get_string(*t, "support", "file", ""));
        s.fn = get_string(*t, "support", "fn", s.fn);
        s.p = get_number(*t, "support", "p", s.p);
        s.n_grid = get_int(*t, "support", "n_grid", s.n_grid);
    }
    if (const toml::table* t = section(root, "sweep")) {
        auto& s = c.sweep;
        if (const toml::node* n = t->get("configs")) {
            const toml::array* a = n->as_array();
            if (!a) throw ConfigError("sweep.configs must be an array of paths");
            for (const auto& x : *a) {
                auto v = x.value_exact<std::string>();
                if (!v) throw ConfigError("sweep.configs must be an array of paths");
                s.configs.push_back(resolve(base, *v));
            }
        }
        s.threads = get_int(*t, "sweep", "threads", s.threads);
    }
    validate_config(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file " + file.string());
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str(), file.parent_path().empty() ? std::filesystem::path(".") : file.parent_path());
}

AxisymProfile build_initial_surface(const SurfaceConfig& s, std::optional<std::uint64_t> seed)
{
    if (s.type == "sphere") return AxisymProfile::constant(s.n_grid, s.theta0);
    if (s.type == "legendre") {
        const unsigned deg = static_cast<unsigned>(s.mode);
        return AxisymProfile::from_function(
            s.n_grid, [&](double phi) { return s.theta0 + s.amplitude * std::legendre(deg, std::cos(phi)); });
    }
    if (s.type == "ellipsoid") {
        // support function theta0 + amplitude P_2, embedded and resampled
        const SupportProfile sp = SupportProfile::from_function(
            s.n_grid, [&](double phi) { return s.theta0 + s.amplitude * std::legendre(2u, std::cos(phi)); });
        if (!is_horoconvex(sp)) throw ConfigError("ellipsoid support function is not horo-convex");
        return radial_graph_from_support(sp, s.n_grid);
    }
    if (s.type == "random") {
        // independent uniform Legendre coefficients of degree 2..max_mode
        std::mt19937_64 rng(*seed);
        std::uniform_real_distribution<double> coeff(-1.0, 1.0);
        std::vector<double> amps(static_cast<size_t>(s.max_mode) + 1, 0.0);
        amps[0] = s.theta0;
        for (int k = 2; k <= s.max_mode; ++k) amps[static_cast<size_t>(k)] = s.amplitude * coeff(rng);
        return AxisymProfile(mode_synthesis(amps, s.n_grid));
    }
    std::ifstream in(s.file);
    if (!in) throw ConfigError("cannot open surface file " + s.file.string());
    try {
        return read_profile_csv(in);
    } catch (const std::exception& e) {
        throw ConfigError("surface file " + s.file.string() + ": " + e.what());
    }
}

}  // namespace horoflow::cli
