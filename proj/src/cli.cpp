#include "sacl/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>

#include "sacl/config.hpp"
#include "sacl/current.hpp"
#include "sacl/error.hpp"
#include "sacl/geometry_rate.hpp"
#include "sacl/io.hpp"
#include "sacl/manifest.hpp"
#include "sacl/moduli.hpp"
#include "sacl/parallel.hpp"
#include "sacl/rare_event.hpp"
#include "sacl/snapshot.hpp"
#include "sacl/studies.hpp"

namespace sacl {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct CommonArgs {
    std::string config;
    std::optional<std::string> output;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    bool quiet = false;
};

struct Context {
    RunConfig cfg;
    CommonArgs args;
    fs::path dir;
    RunManifest* manifest = nullptr;
    std::mutex write_mutex;
};

double lambda_of(const RunConfig& cfg) {
    return cfg.noise_enabled ? noise_strength(cfg.eps, cfg.beta, cfg.d, cfg.kappa) : 0.0;
}

void emit(Context& ctx, const std::string& name, const std::string& contents) {
    std::lock_guard lock(ctx.write_mutex);
    const fs::path p = ctx.dir / name;
    fs::create_directories(p.parent_path());
    write_file_atomic(p, contents);
    ctx.manifest->record_file(name);
}

void emit_json(Context& ctx, const std::string& name, const ojson& j) { emit(ctx, name, j.dump(2) + "\n"); }

void emit_samples(Context& ctx, const std::string& name, const Trajectory& tr, bool last_only) {
    std::ostringstream os;
    const std::size_t first = last_only && !tr.times.empty() ? tr.times.size() - 1 : 0;
    for (std::size_t k = first; k < tr.times.size(); ++k) write_snapshot(os, tr.fields[k], {tr.eps, tr.times[k], "u", {}});
    emit(ctx, name, os.str());
}

ojson report_json(const EnergyReport& r) {
    return {{"free_energy", r.free_energy}, {"willmore", r.willmore}, {"discrepancy_tv", r.discrepancy_tv},
            {"mass", r.mass},               {"grad_sq", r.grad_sq}};
}

ojson modulus_json(const ModulusReport& m) {
    return {{"deltas", m.deltas},     {"values", m.values},     {"alpha_hat", m.alpha_hat},
            {"ell_hat", m.ell_hat}, {"monotone", m.monotone}};
}

ojson condition_json(const ConditionResult& c) {
    return {{"pass", c.pass},
            {"worst_ratio", c.worst_ratio},
            {"witness_delta", c.witness_delta},
            {"witness_index", c.witness_index}};
}

Trajectory simulate_one(Context& ctx, bool force_record) {
    const RunConfig& cfg = ctx.cfg;
    auto noise = make_noise(cfg);
    auto tilt = make_tilt(cfg);
    RunOptions opts = make_run_options(cfg);
    if (force_record) opts.record_increments = true;
    std::optional<RandomStream> rng;
    if (noise) rng.emplace(cfg.seed, 0);
    ctx.manifest->add_trajectory({0, cfg.seed, 0});
    return run(make_state(cfg, noise), opts, rng ? &*rng : nullptr, tilt.get());
}

ojson summary_json(const Trajectory& tr) {
    ojson j;
    j["steps"] = tr.step_count;
    j["dt"] = tr.dt;
    j["final_time"] = tr.final_time();
    j["lambda"] = tr.lambda;
    j["log_weight"] = tr.log_weight;
    j["tilt_martingale"] = tr.tilt_martingale;
    j["tilt_qv"] = tr.tilt_qv;
    j["initial"] = report_json(tr.reports.front());
    j["final"] = report_json(tr.reports.back());
    j["sup_free_energy"] = sup_free_energy(tr);
    j["energy_dissipation_sup"] = energy_dissipation_sup(tr);
    return j;
}

ojson cmd_simulate(Context& ctx) {
    Trajectory tr = simulate_one(ctx, false);
    emit(ctx, "series.csv", series_csv(tr));
    emit_samples(ctx, "samples.sacf", tr, false);
    if (tr.increments_recorded) {
        std::lock_guard lock(ctx.write_mutex);
        write_steps((ctx.dir / "steps.sacf").string(), tr);
        ctx.manifest->record_file("steps.sacf");
    }
    ojson s = summary_json(tr);
    emit_json(ctx, "summary.json", s);
    return s;
}

ojson cmd_ensemble(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    EnsembleSetup setup = make_ensemble(cfg, ctx.args.threads);
    auto tilt = make_tilt(cfg);
    const std::size_t m = cfg.samples;
    std::vector<ojson> rows(m);
    parallel_for(m, resolve_threads(ctx.args.threads, m), [&](std::size_t i) {
        std::optional<RandomStream> rng;
        if (cfg.noise_enabled) rng.emplace(cfg.seed, i);
        Trajectory tr = run(setup.initial(), setup.options, rng ? &*rng : nullptr, tilt.get());
        char name[32];
        std::snprintf(name, sizeof name, "traj_%04zu", i);
        emit(ctx, std::string(name) + "/series.csv", series_csv(tr));
        emit_samples(ctx, std::string(name) + "/final.sacf", tr, true);
        ctx.manifest->add_trajectory({i, cfg.seed, i});
        ojson r = summary_json(tr);
        r["index"] = i;
        rows[i] = std::move(r);
    });
    ojson j;
    j["samples"] = m;
    j["trajectories"] = rows;
    emit_json(ctx, "ensemble.json", j);
    return {{"samples", m}};
}

ojson cmd_diagnose(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    if (cfg.diagnose.input.empty()) throw ConfigError("diagnose.input", "diagnose.input: required for diagnose");
    const DoubleWell w = well_by_label(cfg.well);
    const auto snaps = read_snapshots(cfg.diagnose.input, cfg.d);
    std::ostringstream csv;
    csv << "t [time],free_energy [energy],willmore [energy/time],discrepancy_tv [energy],mass [energy],"
           "grad_sq [1/length^2]\n";
    char buf[256];
    for (const auto& s : snaps) {
        const double eps = s.meta.eps > 0.0 ? s.meta.eps : cfg.eps;
        const EnergyReport r = energy_report(s.field, eps, w);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.meta.time, r.free_energy,
                      r.willmore, r.discrepancy_tv, r.mass, r.grad_sq);
        csv << buf;
    }
    emit(ctx, "diagnostics.csv", csv.str());
    ojson out{{"snapshots", snaps.size()}};

    if (!cfg.diagnose.increments.empty()) {
        Trajectory tr;
        tr.grid = make_grid(cfg);
        tr.eps = cfg.eps;
        tr.well = w;
        tr.lambda = lambda_of(cfg);
        read_steps(cfg.diagnose.increments, tr);
        ojson coeffs = ojson::array();
        for (int m = 0; m < cfg.d; ++m)
            for (int n = 0; n <= 1; ++n)
                for (int k = 0; k <= 1; ++k) {
                    MultiIndex kk{0, 0, 0};
                    kk[0] = k;
                    const auto c = current_coefficients(tr, m, n, kk, {0.0, 0.0, 0.0}, cfg.eps, tr.lambda);
                    coeffs.push_back({{"m", m}, {"n", n}, {"k", kk}, {"q", {0.0, 0.0, 0.0}},
                                      {"re", c.z.real()}, {"im", c.z.imag()}, {"qv", c.qv}});
                }
        emit_json(ctx, "currents.json", {{"steps", tr.steps.size()}, {"lambda", tr.lambda}, {"coefficients", coeffs}});
        out["steps"] = tr.steps.size();
    }
    return out;
}

ojson cmd_rate(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    ojson j;
    if (!cfg.rate.sphere_path.empty()) {
        const SpherePath p = to_sphere_path(load_sphere_path(cfg.rate.sphere_path));
        const RateBreakdown r = rate_total_sphere(p);
        j = {{"source", "sphere_path"}, {"i_ac", r.i_ac}, {"i_nucl", r.i_nucl}, {"total", r.total}};
    } else {
        const Trajectory tr = simulate_one(ctx, true);
        j = {{"source", "trajectory"},
             {"steps", tr.step_count},
             {"action_eps", action_eps(tr, cfg.eps, well_by_label(cfg.well))}};
    }
    emit_json(ctx, "rate.json", j);
    return j;
}

ojson cmd_moduli(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const Trajectory tr = simulate_one(ctx, false);
    if (tr.times.size() < 3) throw ParameterError("moduli: need at least three samples; lower time.sample_every");
    const double T = tr.final_time() - tr.times.front();
    const auto deltas = dyadic_deltas(T, tr.times[1] - tr.times[0]);
    std::vector<double> z;
    for (const auto& r : tr.reports) z.push_back(r.free_energy);
    const double lambda = lambda_of(cfg);
    const double ell1 = cfg.moduli.ell1_auto ? 2.0 * tr.reports.front().free_energy : cfg.moduli.ell1;
    const auto tests = trig_test_functions(tr.grid, cfg.moduli.test_functions);
    const AdmissibilityReport a = admissibility_report(tr, cfg.eps, lambda, {ell1, cfg.moduli.ell2, cfg.moduli.ell3},
                                                       tests, cfg.moduli.alpha2, cfg.moduli.alpha3);
    ojson j;
    j["omega_inf"] = modulus_json(omega_inf_report(tr, deltas));
    j["omega_one_free_energy"] = modulus_json(omega_one_report(z, T, deltas));
    j["admissibility"] = {{"ell", {ell1, cfg.moduli.ell2, cfg.moduli.ell3}},
                          {"b", condition_json(a.b)},
                          {"c", condition_json(a.c)},
                          {"d", condition_json(a.d)},
                          {"sup_energy_plus_dissipation", a.sup_energy_plus_dissipation},
                          {"test_functions_used", a.test_functions_used},
                          {"warnings", a.warnings},
                          {"pass", a.pass()}};
    emit_json(ctx, "moduli.json", j);
    return {{"admissible", a.pass()}};
}

ojson estimate_json(const TiltedEstimate& e) {
    return {{"direct_samples", e.direct_samples},
            {"tilted_samples", e.tilted_samples},
            {"p_direct", e.p_direct},
            {"p_direct_se", e.p_direct_se},
            {"p_tilted", e.p_tilted},
            {"p_tilted_se", e.p_tilted_se},
            {"mean_weight", e.mean_weight},
            {"mean_weight_se", e.mean_weight_se},
            {"ess", e.ess},
            {"inconclusive", e.inconclusive},
            {"overflow_runs", e.overflow_runs},
            {"overflow_log_weights", e.overflow_log_weights},
            {"weights_exactly_one", e.weights_exactly_one}};
}

ojson cmd_rare_event(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    if (!cfg.noise_enabled) throw ConfigError("noise.enabled", "noise.enabled: rare-event runs need noise");
    const auto& rc = cfg.rare_event;
    const EnsembleSetup setup = make_ensemble(cfg, ctx.args.threads);
    const Observable obs = rc.observable == "sup_free_energy" ? Observable(sup_free_energy)
                                                              : Observable(energy_dissipation_sup);
    ojson j;
    j["config"] = config_echo(cfg);
    if (rc.mode == "estimate" || rc.mode == "both") {
        auto tilt = make_tilt(cfg);
        const TiltedEstimate e = estimate(setup, obs, rc.threshold, tilt.get(), rc.direct_samples, rc.tilted_samples);
        for (std::size_t i = 0; i < rc.direct_samples; ++i) ctx.manifest->add_trajectory({i, cfg.seed, i});
        if (tilt)
            for (std::size_t i = 0; i < rc.tilted_samples; ++i)
                ctx.manifest->add_trajectory({rc.direct_samples + i, cfg.seed, kTiltedStreamOffset + i});
        j["estimate"] = estimate_json(e);
        j["estimate"]["threshold"] = rc.threshold;
        j["estimate"]["tilt_strength"] = tilt ? tilt->strength : 0.0;
    }
    if (rc.mode == "tail_scan" || rc.mode == "both") {
        if (rc.ells.empty()) throw ConfigError("rare_event.ells", "rare_event.ells: required for tail_scan");
        const TailScan s = tail_scan(setup, rc.ells, rc.direct_samples);
        if (rc.mode == "tail_scan")
            for (std::size_t i = 0; i < rc.direct_samples; ++i) ctx.manifest->add_trajectory({i, cfg.seed, i});
        ojson rows = ojson::array();
        for (const auto& r : s.rows)
            rows.push_back({{"ell", r.ell},
                            {"count", r.count},
                            {"probability", r.probability},
                            {"log_probability", std::isfinite(r.log_probability) ? ojson(r.log_probability) : ojson()},
                            {"censored", r.censored}});
        j["tail_scan"] = {{"samples", s.samples}, {"rows", rows},           {"slope", s.slope},
                          {"intercept", s.intercept}, {"decreasing", s.decreasing}};
    }
    emit_json(ctx, "rare_event.json", j);
    ojson brief;
    if (j.contains("estimate")) brief["estimate"] = j["estimate"];
    if (j.contains("tail_scan")) brief["decreasing"] = j["tail_scan"]["decreasing"];
    return brief;
}

ojson cmd_mcf_study(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const auto rows = mcf_study(cfg.mcf_study, cfg.d, well_by_label(cfg.well), ctx.args.threads);
    emit(ctx, "mcf_study.csv", mcf_study_csv(rows));
    bool decreasing = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].eps < rows[i - 1].eps && rows[i].max_rel_error < rows[i - 1].max_rel_error)) decreasing = false;
    ojson r = ojson::array();
    for (const auto& row : rows)
        r.push_back({{"eps", row.eps},
                     {"n", row.n},
                     {"dt", row.dt},
                     {"steps", row.steps},
                     {"max_rel_error", row.max_rel_error},
                     {"max_rel_error_coarse", row.max_rel_error_coarse},
                     {"max_rel_error_fine", row.max_rel_error_fine},
                     {"xi_tv_integral", row.xi_tv_integral}});
    ojson j{{"rows", r}, {"strictly_decreasing", decreasing}};
    emit_json(ctx, "mcf_study.json", j);
    return j;
}

struct SelfcheckFailed {
    ojson report;
};

ojson cmd_selfcheck(Context& ctx) {
    const auto results = selfcheck(ctx.cfg.seed);
    ojson checks = ojson::array();
    bool ok = true;
    for (const auto& c : results) {
        checks.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
        ok = ok && c.pass;
    }
    ojson j{{"pass", ok}, {"checks", checks}};
    emit_json(ctx, "selfcheck.json", j);
    if (!ok) throw SelfcheckFailed{j};
    return j;
}

ojson error_json(const std::string& code, const std::string& message) {
    return {{"error", code}, {"message", message}};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stochastic Allen-Cahn simulations, diagnostics and rare-event estimates", "sacl"};
    app.require_subcommand(1);
    CommonArgs common;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"simulate", "Run one trajectory"},
        {"ensemble", "Run ensemble.samples independent trajectories"},
        {"diagnose", "Energy reports and current coefficients of stored snapshots"},
        {"rate", "Rate of a sphere path file, or the action of a simulated trajectory"},
        {"moduli", "Moduli of continuity and admissibility of a simulated trajectory"},
        {"rare-event", "Importance-sampled probability estimates and tail scans"},
        {"mcf-study", "Epsilon sweep against the exact shrinking-sphere radius"},
        {"selfcheck", "Built-in identity suite"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", common.config, "Configuration file")->required();
        sub->add_option("--output", common.output, "Output directory (overrides output.dir)");
        sub->add_option("--seed", common.seed, "Master seed (overrides ensemble.seed)");
        sub->add_option("--threads", common.threads, "Worker threads, 0 = all cores");
        sub->add_flag("--quiet", common.quiet, "Suppress the stdout summary");
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << error_json("usage", e.what()).dump() << "\n";
        return 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    Context ctx;
    ctx.args = common;
    std::unique_ptr<RunManifest> manifest;
    try {
        ctx.cfg = load_config(common.config);
        if (common.seed) ctx.cfg.seed = *common.seed;
        if (common.output) ctx.cfg.output_dir = *common.output;
        ctx.dir = ctx.cfg.output_dir;
        manifest = std::make_unique<RunManifest>(ctx.dir, command, config_echo(ctx.cfg), ctx.cfg.seed);
        ctx.manifest = manifest.get();

        ojson result;
        if (command == "simulate") result = cmd_simulate(ctx);
        else if (command == "ensemble") result = cmd_ensemble(ctx);
        else if (command == "diagnose") result = cmd_diagnose(ctx);
        else if (command == "rate") result = cmd_rate(ctx);
        else if (command == "moduli") result = cmd_moduli(ctx);
        else if (command == "rare-event") result = cmd_rare_event(ctx);
        else if (command == "mcf-study") result = cmd_mcf_study(ctx);
        else result = cmd_selfcheck(ctx);

        manifest->finalize("ok");
        if (!common.quiet) out << ojson{{"command", command}, {"status", "ok"}, {"result", result}}.dump() << "\n";
        return 0;
    } catch (const SelfcheckFailed& f) {
        if (manifest) manifest->finalize("failed");
        ojson e = error_json("selfcheck-failed", "one or more identity checks failed");
        e["report"] = f.report;
        err << e.dump() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        if (manifest) manifest->finalize("failed");
        ojson j = error_json(e.code(), e.what());
        j["key"] = e.key();
        err << j.dump() << "\n";
        return 1;
    } catch (const DivergenceError& e) {
        if (manifest) manifest->finalize("failed");
        ojson j = error_json(e.code(), e.what());
        j["time"] = e.time();
        err << j.dump() << "\n";
        return 1;
    } catch (const Error& e) {
        if (manifest) manifest->finalize("failed");
        err << error_json(e.code(), e.what()).dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        if (manifest) manifest->finalize("failed");
        err << error_json("internal", e.what()).dump() << "\n";
        return 1;
    }
}

}  // namespace sacl
