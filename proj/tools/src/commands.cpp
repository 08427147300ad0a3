#include "horoflow/cli/commands.hpp"

#include "horoflow/cexample.hpp"
#include "horoflow/diagnostics.hpp"
#include "horoflow/flow.hpp"
#include "horoflow/graphcurv.hpp"
#include "horoflow/horosupport.hpp"
#include "horoflow/spherical.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace horoflow::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::ostream& log_of(const CommandContext& ctx) { return ctx.log ? *ctx.log : std::clog; }
std::ostream& out_of(const CommandContext& ctx) { return ctx.out ? *ctx.out : std::cout; }

std::ofstream open_out(const fs::path& dir, const std::string& name)
{
    fs::create_directories(dir);
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    os << std::setprecision(17);
    return os;
}

/// Collects PASS/FAIL lines for --check.
class Checklist {
public:
    explicit Checklist(std::ostream& log) : log_(log) {}

    void expect(const std::string& name, bool ok, const std::string& detail)
    {
        log_ << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
        entries_.push_back({{"name", name}, {"passed", ok}, {"detail", detail}});
        all_ &= ok;
    }
    [[nodiscard]] bool all_passed() const { return all_; }
    [[nodiscard]] const json& entries() const { return entries_; }

private:
    std::ostream& log_;
    json entries_ = json::array();
    bool all_ = true;
};

std::string fmt(double x)
{
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

json fit_json(const std::vector<std::pair<double, double>>& series)
{
    try {
        const DecayFit f = fit_decay(series, 0.5);
        return {{"exponent", f.exponent}, {"log_prefactor", f.log_prefactor}, {"r_squared", f.r_squared},
                {"points", f.points}};
    } catch (const std::invalid_argument&) {
        return nullptr;
    }
}

void write_diagnostics_header(std::ostream& os, int modes)
{
    os << "tau,t,theta,anchor,osc_u,pinch_ratio,kappaQ_min,kappaQ_max,FQ_min,FQ_max,hausdorff,center_offset,"
          "osc_centered,v_minus_1_max,max_abs_sigma,barrier_lower,barrier_upper,u_min,u_max";
    for (int k = 0; k <= modes; ++k) os << ",a" << k;
    os << '\n';
}

void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& r, int modes)
{
    os << r.tau << ',' << r.t << ',' << r.theta << ',' << r.anchor << ',' << r.osc_u << ',' << r.pinch_ratio << ','
       << r.kappaQ_min << ',' << r.kappaQ_max << ',' << r.FQ_min << ',' << r.FQ_max << ',' << r.hausdorff << ','
       << r.center_offset << ',' << r.osc_centered << ',' << r.v_minus_1_max << ',' << r.max_abs_sigma << ','
       << r.barrier_lower << ',' << r.barrier_upper << ',' << r.u_min << ',' << r.u_max;
    for (int k = 0; k <= modes; ++k) {
        const auto i = static_cast<size_t>(k);
        os << ',' << (i < r.mode_amps.size() ? r.mode_amps[i] : 0.0);
    }
    os << '\n';
}

json events_json(const std::vector<FlowEvent>& events)
{
    json a = json::array();
    for (const auto& e : events)
        a.push_back({{"kind", e.kind}, {"tau", e.tau}, {"t", e.t}, {"cell", e.cell}, {"value", e.value},
                     {"detail", e.detail}, {"count", e.count}});
    return a;
}

const char* rematch_name(Rematch r) { return r == Rematch::Mean ? "mean" : "none"; }

const char* guard_name(ConvexityGuard g)
{
    switch (g) {
    case ConvexityGuard::Strict: return "strict";
    case ConvexityGuard::Record: return "record";
    default: return "auto";
    }
}

}  // namespace

int simulate(const RunConfig& cfg, const CommandContext& ctx)
{
    std::ostream& log = log_of(ctx);
    const AxisymProfile u0 = build_initial_surface(cfg.surface, cfg.seed);
    const CurvatureFunction fn = CurvatureFunction::from_id(cfg.flow.fn, 2);
    const double p = cfg.flow.p;
    FlowOptions opt = cfg.flow.options;
    const int modes = std::min(opt.modes, u0.n_grid() / 4);

    const fs::path dir = ctx.out_dir;
    std::ofstream diag;
    if (cfg.output.csv) {
        diag = open_out(dir, "diagnostics.csv");
        write_diagnostics_header(diag, modes);
    }
    const FlowState initial = FlowState::from_surface(u0, fn, p);
    const RunResult res = run(initial, opt, [&](const DiagnosticsRecord& r) {
        if (diag.is_open()) write_diagnostics_row(diag, r, modes);
    });
    if (diag.is_open()) diag.close();

    if (cfg.output.csv) {
        std::ofstream prof = open_out(dir, "profile_final.csv");
        write_profile_csv(prof, res.final_state.surface());
    }

    std::vector<std::pair<double, double>> pinch, osc, osc_c, haus, sigma;
    for (const auto& r : res.records) {
        pinch.emplace_back(r.tau, r.pinch_ratio - 1.0);
        osc.emplace_back(r.tau, r.osc_u);
        osc_c.emplace_back(r.tau, r.osc_centered);
        haus.emplace_back(r.tau, r.hausdorff);
        sigma.emplace_back(r.tau, r.max_abs_sigma);
    }
    const json pinch_fit = fit_json(pinch);
    const json osc_fit = fit_json(osc_c);
    const auto& first = res.records.front();
    const auto& last = res.records.back();
    const SphericalState& sph = res.final_state.spherical;

    json summary;
    summary["config"] = {{"fn", fn.id()},
                         {"p", p},
                         {"surface", cfg.surface.type},
                         {"theta0", cfg.surface.theta0},
                         {"amplitude", cfg.surface.amplitude},
                         {"mode", cfg.surface.mode},
                         {"n_grid", u0.n_grid()},
                         {"tau_end", opt.tau_end},
                         {"cfl", opt.cfl},
                         {"rematch", rematch_name(opt.rematch)},
                         {"guard", guard_name(opt.guard)},
                         {"seed", cfg.seed ? json(*cfg.seed) : json(nullptr)}};
    summary["completed"] = res.completed;
    summary["stop_reason"] = res.stop_reason;
    summary["steps"] = res.steps;
    summary["tau_final"] = sph.tau;
    summary["t_final"] = sph.t;
    summary["theta_final"] = sph.theta;
    summary["anchor_final"] = sph.theta0;
    summary["max_abs_sigma"] = res.max_abs_sigma;
    summary["initial_osc"] = res.initial_osc;
    summary["final_osc"] = last.osc_u;
    summary["final_osc_centered"] = last.osc_centered;
    summary["pinch_initial"] = first.pinch_ratio;
    summary["pinch_final"] = last.pinch_ratio;
    summary["worst_barrier_margin"] = res.worst_barrier_margin;
    summary["barriers_held"] = res.barriers_held();
    summary["worst_osc_excess"] = res.worst_osc_excess;
    summary["oscillation_bound_held"] = res.oscillation_bound_held();
    summary["horoconvexity_lost"] = res.horoconvexity_lost;
    summary["stopped_on_guard"] = res.stopped_on_guard;
    summary["events"] = events_json(res.events);
    summary["fits"] = {{"pinch_minus_one", pinch_fit},
                       {"osc_centered", osc_fit},
                       {"osc", fit_json(osc)},
                       {"hausdorff", fit_json(haus)},
                       {"max_abs_sigma", fit_json(sigma)}};
    summary["linearized"] = {{"A_infinity", asymptotic_coefficient(2, p)},
                             {"A_final", linearized_coefficient(2, p, sph.theta)},
                             {"mode2_rate", linearized_rate(2, p, sph.theta, 2)},
                             {"bulk_decay_rate", bulk_decay_rate(2, p, sph.theta)},
                             {"predicted_osc_exponent", -linearized_rate(2, p, sph.theta, 2)}};

    // Horo-convexity is preserved for p <= 1; losing it there is a numerical event.
    const bool unexpected_loss = res.horoconvexity_lost && p <= 1.0;
    const bool breakdown = res.has_event("NonFinite") || res.has_event("SpeedUndefined");
    int code = unexpected_loss || breakdown ? kNumericalEvent : kOk;

    log << "simulate: " << res.stop_reason << " after " << res.steps << " steps, tau = " << sph.tau
        << ", max|sigma| = " << res.max_abs_sigma << ", pinch " << first.pinch_ratio << " -> " << last.pinch_ratio
        << '\n';

    if (ctx.check) {
        Checklist ck(log);
        ck.expect("barriers", res.barriers_held(), "worst margin " + fmt(res.worst_barrier_margin));
        ck.expect("oscillation_bound", res.oscillation_bound_held(), "worst excess " + fmt(res.worst_osc_excess));
        if (p <= 1.0)
            ck.expect("horoconvexity_preserved", !res.has_event("HoroConvexityLost"),
                      res.horoconvexity_lost ? "HoroConvexityLost logged" : "no loss");
        const auto sigma_tol = cfg.check.max_abs_sigma
                                   ? cfg.check.max_abs_sigma
                                   : (cfg.surface.type == "sphere" ? std::optional<double>(1e-9) : std::nullopt);
        if (sigma_tol)
            ck.expect("max_abs_sigma", res.max_abs_sigma <= *sigma_tol,
                      fmt(res.max_abs_sigma) + " <= " + fmt(*sigma_tol));
        if (cfg.check.pinch_r2_min) {
            const bool ok = !pinch_fit.is_null() && pinch_fit["r_squared"].get<double>() >= *cfg.check.pinch_r2_min;
            ck.expect("pinch_decay_fit", ok,
                      pinch_fit.is_null() ? "no fit" : "r2 " + fmt(pinch_fit["r_squared"].get<double>()));
        }
        if (cfg.check.pinch_final_ratio_max) {
            const double ratio = (last.pinch_ratio - 1.0) / (first.pinch_ratio - 1.0);
            ck.expect("pinch_final_ratio", ratio <= *cfg.check.pinch_final_ratio_max,
                      fmt(ratio) + " <= " + fmt(*cfg.check.pinch_final_ratio_max));
        }
        if (cfg.check.osc_exponent_range) {
            const auto [lo, hi] = *cfg.check.osc_exponent_range;
            const double g = osc_fit.is_null() ? std::nan("") : osc_fit["exponent"].get<double>();
            ck.expect("osc_exponent", g >= lo && g <= hi, fmt(g) + " in [" + fmt(lo) + ", " + fmt(hi) + "]");
        }
        summary["checks"] = ck.entries();
        if (code == kOk && !ck.all_passed()) code = kCheckFailed;
    }
    summary["exit_code"] = code;
    if (cfg.output.json_summary) {
        std::ofstream os = open_out(dir, "summary.json");
        os << summary.dump(2) << '\n';
    }
    return code;
}

int spherical(const RunConfig& cfg, const CommandContext& ctx)
{
    const auto& s = cfg.spherical;
    const double t_star = maximal_time(s.theta0, s.p, s.n);
    const double Q0 = sphere_q(s.theta0);
    const bool linear = s.p == 1.0;
    // Q/(2Q+1) grows like e^{t/n} when p = 1
    auto closed_q = [&](double t) {
        const double y = Q0 / (2.0 * Q0 + 1.0) * std::exp(t / s.n);
        return y / (1.0 - 2.0 * y);
    };

    std::ofstream csv = open_out(ctx.out_dir, "spherical.csv");
    csv << "t,tau,theta,Q" << (linear ? ",Q_closed" : "") << '\n';
    double worst = 0.0;
    for (int i = 0; i < s.samples; ++i) {
        const double t = s.horizon * t_star * i / (s.samples - 1);
        const SphericalState st = spherical_solve(s.theta0, s.p, s.n, t);
        csv << st.t << ',' << st.tau << ',' << st.theta << ',' << st.Q;
        if (linear) {
            const double qc = closed_q(t);
            csv << ',' << qc;
            worst = std::max(worst, std::abs(st.Q - qc) / qc);
        }
        csv << '\n';
    }

    json j = {{"theta0", s.theta0}, {"p", s.p}, {"n", s.n}, {"Q0", Q0}, {"T_star", t_star},
              {"horizon", s.horizon}, {"samples", s.samples}};
    if (linear) {
        j["T_star_closed"] = s.n * std::log((2.0 * Q0 + 1.0) / (2.0 * Q0));
        j["max_relative_error_Q"] = worst;
    }
    int code = kOk;
    if (ctx.check && linear) {
        Checklist ck(log_of(ctx));
        const double tc = j["T_star_closed"].get<double>();
        ck.expect("T_star", std::abs(t_star - tc) <= 1e-8 * tc, fmt(t_star) + " vs " + fmt(tc));
        ck.expect("trajectory", worst <= 1e-8, "max relative error " + fmt(worst));
        j["checks"] = ck.entries();
        if (!ck.all_passed()) code = kCheckFailed;
    }
    std::ofstream js = open_out(ctx.out_dir, "spherical.json");
    js << j.dump(2) << '\n';
    out_of(ctx) << j.dump(2) << '\n';
    return code;
}

int counterexample(const RunConfig& cfg, const CommandContext& ctx)
{
    const auto& c = cfg.counterexample;
    json j = json::parse(counterexample_json(c.params, c.p, c.radius, c.grid));
    int code = kOk;
    if (ctx.check) {
        Checklist ck(log_of(ctx));
        const double closed = j["rate_closed"].get<double>();
        const double diff = j["rate_difference"].get<double>();
        ck.expect("rate_agreement", diff <= 1e-12 * std::max(1.0, std::abs(closed)), "difference " + fmt(diff));
        for (int i = 0; i < 2; ++i) {
            const double got = j["quad_coeffs"][static_cast<size_t>(i)].get<double>();
            const double want = j["quad_coeffs_expected"][static_cast<size_t>(i)].get<double>();
            ck.expect("quad_coeff_" + std::to_string(i + 1), std::abs(got - want) <= 0.02 * std::abs(want),
                      fmt(got) + " vs " + fmt(want));
        }
        ck.expect("horoconvex_window", j["horoconvex"].get<bool>(),
                  "min excess " + fmt(j["horoconvex_min"].get<double>()));
        const bool neg = j["sign_prediction"]["rate_negative"].get<bool>();
        ck.expect("sign_prediction", neg == (closed < 0.0), "rate " + fmt(closed));
        j["checks"] = ck.entries();
        if (!ck.all_passed()) code = kCheckFailed;
    }
    std::ofstream os = open_out(ctx.out_dir, "counterexample.json");
    os << j.dump(2) << '\n';
    out_of(ctx) << j.dump(2) << '\n';
    return code;
}

int curvfun_check(const RunConfig& cfg, const CommandContext& ctx)
{
    if (!cfg.seed) throw ConfigError("curvfun-check needs a seed (config `seed` or --seed)");
    const auto& c = cfg.curvfun;
    CurvatureFunction fn = [&] {
        try {
            return CurvatureFunction::from_id(c.fn, c.n);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }();
    const CertificationReport rep = certify_structure(fn, c.samples, *cfg.seed);
    const std::string text = rep.to_json(2);
    std::ofstream os = open_out(ctx.out_dir, "curvfun_check.json");
    os << text << '\n';
    out_of(ctx) << text << '\n';
    if (ctx.check) {
        Checklist ck(log_of(ctx));
        for (const auto& chk : rep.checks)
            ck.expect(chk.name, chk.passed, "worst violation " + fmt(chk.worst_violation));
        if (!ck.all_passed()) return kCheckFailed;
    }
    return kOk;
}

int support_check(const RunConfig& cfg, const CommandContext& ctx)
{
    const auto& s = cfg.support;
    if (s.file.empty()) throw ConfigError("support-check needs a support profile file");
    std::ifstream in(s.file);
    if (!in) throw ConfigError("cannot open support file " + s.file.string());
    SupportProfile sp;
    try {
        sp = read_support_csv(in);
        sp.validate();
    } catch (const std::exception& e) {
        throw ConfigError("support file " + s.file.string() + ": " + e.what());
    }
    if (!is_horoconvex(sp)) throw ConfigError("support profile is not horo-convex");
    const CurvatureFunction fn = CurvatureFunction::from_id(s.fn, 2);
    const CrossCheck cc = compare_with_graph(sp, s.n_grid);
    const std::vector<double> rhs = support_flow_rhs(sp, fn, s.p);
    const auto [lo, hi] = std::minmax_element(rhs.begin(), rhs.end());

    json j = {{"file", s.file.filename().string()},
              {"fn", fn.id()},
              {"p", s.p},
              {"support_cells", sp.n_grid()},
              {"graph_cells", s.n_grid},
              {"max_meridian_diff", cc.max_meridian_diff},
              {"max_parallel_diff", cc.max_parallel_diff},
              {"max_norm_defect", cc.max_norm_defect},
              {"support_rhs_min", *lo},
              {"support_rhs_max", *hi}};
    int code = kOk;
    if (ctx.check) {
        Checklist ck(log_of(ctx));
        ck.expect("meridian_curvature", cc.max_meridian_diff <= 1e-5, fmt(cc.max_meridian_diff));
        ck.expect("parallel_curvature", cc.max_parallel_diff <= 1e-5, fmt(cc.max_parallel_diff));
        j["checks"] = ck.entries();
        if (!ck.all_passed()) code = kCheckFailed;
    }
    std::ofstream os = open_out(ctx.out_dir, "support_check.json");
    os << j.dump(2) << '\n';
    out_of(ctx) << j.dump(2) << '\n';
    if (ctx.check) {
        std::ofstream graph = open_out(ctx.out_dir, "support_graph.csv");
        write_profile_csv(graph, cc.graph);
    }
    return code;
}

int sweep(const RunConfig& cfg, const CommandContext& ctx)
{
    const auto& list = cfg.sweep.configs;
    if (list.empty()) throw ConfigError("sweep.configs is empty");
    std::vector<RunConfig> runs;
    runs.reserve(list.size());
    for (const auto& path : list) {
        RunConfig r = load_config(path);
        if (cfg.seed && !r.seed) r.seed = cfg.seed;
        validate_config(r);
        runs.push_back(std::move(r));
    }

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const auto workers = static_cast<unsigned>(
        std::min<size_t>(cfg.sweep.threads > 0 ? static_cast<unsigned>(cfg.sweep.threads) : hw, runs.size()));
    std::vector<int> codes(runs.size(), kOk);
    std::vector<std::string> logs(runs.size());
    std::atomic<size_t> next{0};

    auto worker = [&] {
        for (size_t i = next++; i < runs.size(); i = next++) {
            std::ostringstream log, out;
            CommandContext sub{ctx.out_dir / list[i].stem(), ctx.check, &out, &log};
            try {
                codes[i] = simulate(runs[i], sub);
            } catch (const ConfigError& e) {
                log << "error: " << e.what() << '\n';
                codes[i] = kValidationError;
            } catch (const std::invalid_argument& e) {
                log << "error: " << e.what() << '\n';
                codes[i] = kValidationError;
            } catch (const std::exception& e) {
                log << "error: " << e.what() << '\n';
                codes[i] = kNumericalEvent;
            }
            logs[i] = log.str();
        }
    };
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    pool.clear();

    json j = json::array();
    for (size_t i = 0; i < runs.size(); ++i) {
        log_of(ctx) << "[" << list[i].stem().string() << "] " << logs[i];
        j.push_back({{"config", list[i].filename().string()}, {"exit_code", codes[i]}});
    }
    std::ofstream os = open_out(ctx.out_dir, "sweep.json");
    os << j.dump(2) << '\n';
    return *std::max_element(codes.begin(), codes.end());
}

}  // namespace horoflow::cli
