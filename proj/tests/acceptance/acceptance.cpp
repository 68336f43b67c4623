// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are fixed
// here; `sacl_acceptance 3 4` runs a subset.
#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "sacl/cli.hpp"
#include "sacl/current.hpp"
#include "sacl/geometry_rate.hpp"
#include "sacl/io.hpp"
#include "sacl/moduli.hpp"
#include "sacl/parallel.hpp"
#include "sacl/rare_event.hpp"
#include "sacl/studies.hpp"

using namespace sacl;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
    bool pass = false;
    std::string detail;
};

__attribute__((format(printf, 1, 2))) std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double mean(const std::vector<double>& v) {
    return compensated_sum(v) / static_cast<double>(v.size());
}

double std_error(const std::vector<double>& v) {
    const double m = mean(v);
    std::vector<double> sq;
    for (double x : v) sq.push_back((x - m) * (x - m));
    return std::sqrt(compensated_sum(sq) / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

// ---------------------------------------------------------------- 1, 2

Outcome surface_tension_check() {
    const auto t0 = std::chrono::steady_clock::now();
    const double tau = surface_tension(quartic()).tau;
    const double err = std::abs(tau - 2.0 * std::sqrt(2.0) / 3.0);
    const double secs = seconds_since(t0);
    return {err < 1e-9 && std::abs(tau - 0.9428090416) < 1e-9 && secs < 1.0,
            fmt("tau = %.12f, |tau - 2sqrt2/3| = %.1e (< 1e-9), %.3f s (< 1 s)", tau, err, secs)};
}

Outcome stationary_profile() {
    const auto t0 = std::chrono::steady_clock::now();
    const DoubleWell w = quartic();
    const double eps = 0.02;
    const Grid g(1, 512);
    const TorusField u = initial_sphere(g, eps, w, {0.5, 0.5, 0.5}, 0.25);
    const EnergyReport r = energy_report(u, eps, w);
    const double tau = surface_tension(w).tau;
    const double rel = std::abs(r.free_energy - 2.0 * tau) / (2.0 * tau);
    const double secs = seconds_since(t0);
    return {r.willmore < 1e-4 && r.discrepancy_tv < 1e-6 && rel < 1e-4 && secs < 5.0,
            fmt("Willmore %.2e (< 1e-4), xi TV %.2e (< 1e-6), |F - 2 tau|/2 tau %.2e (< 1e-4), %.2f s (< 5 s)",
                r.willmore, r.discrepancy_tv, rel, secs)};
}

// ---------------------------------------------------------------- 3, 4

const std::vector<McfStudyRow>& mcf_rows() {
    static std::optional<std::vector<McfStudyRow>> rows;
    if (!rows) {
        McfStudyConfig c;
        c.eps_list = {0.04, 0.02, 0.01};
        c.n_list = {128, 256, 512};
        c.r0 = 0.35;
        c.T = 0.05;
        c.sample_dt = 0.0025;
        rows = mcf_study(c, 2, quartic(), 0);
    }
    return *rows;
}

Outcome mcf_convergence() {
    const auto& rows = mcf_rows();
    bool decreasing = true;
    std::string s;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && !(rows[i].max_rel_error < rows[i - 1].max_rel_error)) decreasing = false;
        s += fmt("%seps %.2f: %.4f (dt: %.4f, dt/2: %.4f)", i ? "; " : "", rows[i].eps, rows[i].max_rel_error,
                 rows[i].max_rel_error_coarse, rows[i].max_rel_error_fine);
    }
    const double finest = rows.back().max_rel_error;
    return {decreasing && finest < 0.02,
            "max rel radius error (extrapolated in dt) " + s + fmt("; strictly decreasing %s, finest < 0.02",
                                                                   decreasing ? "yes" : "no")};
}

Outcome equipartition() {
    const auto& rows = mcf_rows();
    bool decreasing = true;
    std::string s;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && !(rows[i].xi_tv_integral < rows[i - 1].xi_tv_integral)) decreasing = false;
        s += fmt("%s%.3e", i ? ", " : "", rows[i].xi_tv_integral);
    }
    const double drop = 1.0 - rows.back().xi_tv_integral / rows.front().xi_tv_integral;
    return {decreasing && drop >= 0.4,
            "int ||xi||_TV dt = " + s + fmt(" for eps 0.04, 0.02, 0.01; drop %.1f%% (>= 40%%)", 100 * drop)};
}

// ---------------------------------------------------------------- 5

Outcome energy_decay() {
    const DoubleWell w = quartic();
    double worst_increase = -INFINITY;
    std::size_t steps = 0;
    auto monotone_run = [&](int d, int n, double eps, double r0, double T) {
        const Grid g(d, n);
        SolverState s{initial_sphere(g, eps, w, {0.5, 0.5, 0.5}, r0), 0.0, eps, w, nullptr, stable_dt(eps, w), 0.0,
                      false};
        double prev = free_energy(s.u, eps, w);
        RunOptions o;
        o.T = T;
        o.diagnostics_every = 0;
        o.on_step = [&](const SolverState& st, std::size_t) {
            const double f = free_energy(st.u, eps, w);
            worst_increase = std::max(worst_increase, f - prev);
            prev = f;
            ++steps;
        };
        run(s, o);
    };
    monotone_run(1, 256, 0.02, 0.25, 0.005);
    monotone_run(2, 128, 0.04, 0.3, 0.01);
    monotone_run(3, 32, 0.08, 0.3, 0.01);

    auto balance = [&](double factor) {
        const Grid g(2, 128);
        const double eps = 0.04;
        SolverState s{initial_sphere(g, eps, w, {0.5, 0.5, 0.5}, 0.3), 0.0, eps, w, nullptr,
                      stable_dt(eps, w) * factor, 0.0, false};
        RunOptions o;
        o.T = 0.01;
        return energy_balance(run(s, o)).max_abs;
    };
    const double coarse = balance(1.0), fine = balance(0.25);
    const double ratio = coarse / fine;
    return {worst_increase <= 1e-12 && ratio >= 3.0,
            fmt("max F(u+) - F(u) over %zu steps = %.2e (<= 1e-12); balance residual %.3e -> %.3e under 4x dt "
                "refinement, ratio %.2f (>= 3)",
                steps, worst_increase, coarse, fine, ratio)};
}

// ---------------------------------------------------------------- 6, 7, 8

Outcome first_variation() {
    const DoubleWell w = quartic();
    RandomStream rng(kSeed, 6);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const int d = 1 + i % 3;
        const Grid g(d, d == 3 ? 16 : 32);
        const TorusField u = random_trig_field(g, rng, 3, 1.0);
        const TorusField X = random_trig_vector_field(g, rng, 3, 1.0);
        worst = std::max(worst, first_variation_check(u, 0.1, w, X).residual);
    }
    return {worst < 1e-8, fmt("worst relative residual over 20 pairs (d = 1, 2, 3) %.2e (< 1e-8)", worst)};
}

Outcome current_kernel() {
    const DoubleWell w = quartic();
    const Grid g(2, 32);
    const double eps = 0.1;
    auto noise = std::make_shared<const NoiseModel>(build_noise(g, eps, 0.5, 1.0));
    RandomStream field_rng(kSeed, 7);
    double worst = 0.0;
    for (std::uint64_t r = 0; r < 10; ++r) {
        SolverState s{initial_sphere(g, eps, w, {0.5, 0.5, 0.5}, 0.25), 0.0, eps, w, noise, stable_dt(eps, w), 0.0,
                      false};
        RunOptions o;
        o.T = 20 * s.dt;
        o.record_increments = true;
        o.diagnostics_every = 0;
        RandomStream rng(kSeed, 700 + r);
        const Trajectory tr = run(s, o, &rng);
        for (int k = 0; k < 5; ++k) {
            const TorusField eta = random_trig_vector_field(g, field_rng, 2, 1.0);
            CurrentTestField projected = [&eta](double, const PlaneField& p) { return p.project(eta); };
            CurrentTestField raw = [&eta](double, const PlaneField&) { return eta; };
            worst = std::max(worst, std::abs(current_eval(tr, projected, eps)) / current_scale(tr, raw, eps));
        }
    }
    return {worst < 1e-10, fmt("max |J(P eta)| / scale over 10 trajectories x 5 fields %.2e (< 1e-10)", worst)};
}

Outcome noise_law() {
    const Grid g(2, 32);
    const NoiseModel nm = build_noise(g, 0.1, 0.5, 1.0);
    RandomStream rng(kSeed, 8);
    int passed = 0;
    double worst_z = 0.0;
    for (int p = 0; p < 5; ++p) {
        const TorusField phi = random_trig_field(g, rng, 3, 1.0);
        const TorusField psi = random_trig_field(g, rng, 3, 1.0);
        const CovarianceReport r = covariance_test(nm, phi, psi, 0.3, 0.7, 10000, rng);
        if (r.pass()) ++passed;
        worst_z = std::max({worst_z, std::abs(r.cov - r.cov_analytic) / r.cov_se,
                            std::abs(r.var_phi - r.var_phi_analytic) / r.var_phi_se});
    }
    return {passed == 5, fmt("%d/5 pairs within 3 standard errors at 1e4 draws; worst |z| = %.2f", passed, worst_z)};
}

// ---------------------------------------------------------------- 9

Outcome martingale_second_moment() {
    const DoubleWell w = quartic();
    const Grid g(1, 256);
    const double eps = 0.05;
    auto noise = std::make_shared<const NoiseModel>(build_noise(g, eps, 1.0, 1.0));
    const TorusField u0 = initial_sphere(g, eps, w, {0.5, 0.5, 0.5}, 0.25);
    struct Coef {
        int n;
        MultiIndex k;
        std::array<double, 3> q;
    };
    const std::vector<Coef> coefs{{0, {0, 0, 0}, {0, 0, 0}},
                                  {1, {1, 0, 0}, {0, 0, 0}},
                                  {0, {2, 0, 0}, {0.5, 0, 0}},
                                  {2, {0, 0, 0}, {1.0, 0, 0}},
                                  {1, {-1, 0, 0}, {-0.7, 0, 0}}};
    const std::size_t runs = 500;
    std::vector<std::vector<double>> diff(coefs.size(), std::vector<double>(runs));
    std::vector<std::vector<double>> sq(coefs.size(), std::vector<double>(runs));
    std::vector<std::vector<double>> qv(coefs.size(), std::vector<double>(runs));
    RunOptions opts;
    opts.T = 0.01;
    opts.record_increments = true;
    opts.diagnostics_every = 0;
    parallel_for(runs, resolve_threads(0, runs), [&](std::size_t r) {
        RandomStream rng(kSeed, 900 + r);
        const Trajectory tr =
            run(SolverState{u0, 0.0, eps, w, noise, stable_dt(eps, w), 0.0, false}, opts, &rng);
        for (std::size_t c = 0; c < coefs.size(); ++c) {
            const auto z = current_coefficients(tr, 0, coefs[c].n, coefs[c].k, coefs[c].q, eps, tr.lambda);
            sq[c][r] = std::norm(z.z);
            qv[c][r] = z.qv;
            diff[c][r] = std::norm(z.z) - z.qv;
        }
    });
    bool ok = true;
    std::string s;
    for (std::size_t c = 0; c < coefs.size(); ++c) {
        const double z = mean(diff[c]) / std_error(diff[c]);
        if (!(std::abs(z) < 4.0)) ok = false;
        s += fmt("%sE|Z|^2 %.3e vs E[QV] %.3e (z %.2f)", c ? "; " : "", mean(sq[c]), mean(qv[c]), z);
    }
    return {ok, std::string("500 runs, d=1 n=256 eps=0.05 kappa=1: ") + s + " (|z| < 4)"};
}

// ---------------------------------------------------------------- 10

Outcome rate_zero_level() {
    const double tau = surface_tension(quartic()).tau;
    double mcf_total = 0.0;
    for (int d : {2, 3}) {
        const SpherePath p{d, {mcf_piece(d, 0.3, 0.0, d == 2 ? 0.04 : 0.02)}, {}, tau, std::nullopt};
        mcf_total = std::max(mcf_total, rate_total_sphere(p).total);
    }
    const double sampled = rate_total_sphere(to_sphere_path(exact_mcf_path_file(2, 0.3, 0.04, 401))).total;
    const SpherePath stat{2, {{0.0, 0.1, [](double) { return 0.25; }, [](double) { return 0.0; }}}, {}, tau,
                          std::nullopt};
    const double static_err = std::abs(i_ac_sphere(stat) - tau * kPi * 0.1 / (2 * 0.25));

    const DoubleWell w = quartic();
    double worst_action = 0.0, drift_scale = 0.0;
    auto deterministic = [&](int d, int n, double eps) {
        const Grid g(d, n);
        SolverState s{initial_sphere(g, eps, w, {0.5, 0.5, 0.5}, 0.25), 0.0, eps, w, nullptr, stable_dt(eps, w), 0.0,
                      false};
        RunOptions o;
        o.T = 50 * s.dt;
        o.record_increments = true;
        const Trajectory tr = run(s, o);
        worst_action = std::max(worst_action, action_eps(tr, eps, w));
        // The action of the frozen path u_t = u_0 gives the scale the zero is measured against.
        double frozen = 0.0;
        for (const auto& st : tr.steps) frozen += st.dt * inner(st.increment, st.increment) / (st.dt * st.dt);
        drift_scale = std::max(drift_scale, 0.25 * eps * frozen);
    };
    deterministic(1, 256, 0.02);
    deterministic(2, 64, 0.05);
    const double rel_action = worst_action / drift_scale;
    return {mcf_total < 1e-9 && sampled < 1e-9 && static_err < 1e-8 && rel_action < 1e-28,
            fmt("MCF path rate %.1e, sampled file %.1e (< 1e-9); static circle |I - tau pi T/2r| %.1e (< 1e-8); "
                "deterministic action %.1e = %.1e x drift action (< 1e-28)",
                mcf_total, sampled, static_err, worst_action, rel_action)};
}

// ---------------------------------------------------------------- 11, 12

EnsembleSetup toy_setup(double kappa, std::uint64_t seed) {
    const Grid g(1, 64);
    const DoubleWell w = quartic();
    const double eps = 0.1;
    auto noise = std::make_shared<const NoiseModel>(build_noise(g, eps, 1.0, kappa));
    const TorusField u0 = initial_sphere(g, eps, w, {0.5, 0.5, 0.5}, 0.25);
    EnsembleSetup s;
    s.initial = [=] { return SolverState{u0, 0.0, eps, w, noise, stable_dt(eps, w), 0.0, false}; };
    s.options.T = 0.02;
    s.seed = seed;
    return s;
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    return v[std::min(v.size() - 1, static_cast<std::size_t>(q * static_cast<double>(v.size())))];
}

Outcome importance_sampling() {
    const double eps = 0.1, T = 0.02;
    const auto pilot = run_ensemble(toy_setup(0.0, kSeed + 1), 2000, 0, nullptr, energy_dissipation_sup);
    const double threshold = quantile(pilot, 0.97);

    const EnsembleSetup setup = toy_setup(0.0, kSeed);
    const double lambda = setup.initial().noise->lambda;
    const Grid g = setup.initial().u.grid();
    TiltSpec zero;
    zero.psi = [g](double) { return TorusField::constant(g, 0.1); };
    zero.strength = 0.0;
    const auto untilted = run_weighted(setup, 200, kTiltedStreamOffset, &zero, energy_dissipation_sup);
    bool exact_one = true;
    for (const auto& o : untilted) exact_one = exact_one && o.log_weight == 0.0 && std::exp(o.log_weight) == 1.0;

    TiltSpec tilt;
    tilt.psi = [g, T](double t) { return TorusField::constant(g, 0.1 * std::max(0.0, 1.0 - t / T)); };
    tilt.strength = default_tilt_strength(eps, lambda);
    const TiltedEstimate e = estimate(setup, energy_dissipation_sup, threshold, &tilt, 10000, 1000);
    const double mw_z = (e.mean_weight - 1.0) / e.mean_weight_se;
    const double se = std::hypot(e.p_direct_se, e.p_tilted_se);
    const double pz = (e.p_tilted - e.p_direct) / se;
    const bool in_range = e.p_direct >= 0.01 && e.p_direct <= 0.1;
    return {exact_one && std::abs(mw_z) < 4.0 && std::abs(pz) < 3.0 && in_range && !e.inconclusive,
            fmt("zero-tilt weights bit-exact 1: %s; mean weight %.4f +- %.4f (z %.2f, < 4); p_direct %.4f +- %.4f "
                "(1e4), p_tilted %.4f +- %.4f (1e3, ESS %.0f), z %.2f (< 3)",
                exact_one ? "yes" : "no", e.mean_weight, e.mean_weight_se, mw_z, e.p_direct, e.p_direct_se,
                e.p_tilted, e.p_tilted_se, e.ess, pz)};
}

Outcome tail_trend() {
    const double eps = 0.1;
    // lambda = eps^(2 + kappa); this kappa lowers eps lambda by exactly 4x.
    const double kappa_b = std::log(4.0) / std::log(1.0 / eps);
    struct Setting {
        double kappa;
        TailScan scan;
        double lambda;
    };
    std::vector<Setting> settings;
    for (double kappa : {0.0, kappa_b}) {
        const auto pilot = run_ensemble(toy_setup(kappa, kSeed + 2), 2000, 0, nullptr, energy_dissipation_sup);
        std::vector<double> ells;
        for (double q : {0.5, 0.8, 0.9, 0.97, 0.99, 0.997}) ells.push_back(quantile(pilot, q));
        const EnsembleSetup setup = toy_setup(kappa, kSeed + 3);
        settings.push_back({kappa, tail_scan(setup, ells, 10000), setup.initial().noise->lambda});
    }
    const auto& a = settings[0];
    const auto& b = settings[1];
    const bool ok = a.scan.decreasing && b.scan.decreasing && a.scan.slope < 0.0 && b.scan.slope < a.scan.slope;
    return {ok, fmt("eps lambda %.2e: slope %.1f (decreasing %s); eps lambda %.2e: slope %.1f (decreasing %s); "
                    "steepening factor %.2f (> 1)",
                    eps * a.lambda, a.scan.slope, a.scan.decreasing ? "yes" : "no", eps * b.lambda, b.scan.slope,
                    b.scan.decreasing ? "yes" : "no", b.scan.slope / a.scan.slope)};
}

// ---------------------------------------------------------------- 13

Outcome moduli() {
    double worst = 0.0;
    const Grid g(1, 16);
    const std::size_t M = 256;
    std::vector<double> times(M + 1);
    std::vector<TorusField> ramp, flat, jump;
    for (std::size_t i = 0; i <= M; ++i) {
        times[i] = static_cast<double>(i) / M;
        ramp.push_back(TorusField::constant(g, times[i]));
        flat.push_back(TorusField::constant(g, 0.4));
        jump.push_back(TorusField::constant(g, i < M / 2 ? -1.0 : 1.0));
    }
    std::vector<double> one(M + 1, 1.0), zero(M + 1, 0.0), step(M + 1);
    for (std::size_t i = 0; i <= M; ++i) step[i] = i >= M / 2 ? 1.0 : 0.0;
    for (double delta : dyadic_deltas(1.0, 1.0 / 64)) {
        worst = std::max(worst, std::abs(omega_inf(times, ramp, delta) - delta));
        worst = std::max(worst, omega_inf(times, flat, delta));
        worst = std::max(worst, std::abs(omega_inf(times, jump, delta) - 2.0));
        worst = std::max(worst, std::abs(omega_one(one, 1.0, delta) - 2.0 * delta));
        worst = std::max(worst, omega_one(zero, 1.0, delta));
        if (delta <= 0.5) worst = std::max(worst, std::abs(omega_one(step, 1.0, delta) - 2.0 * delta));
    }

    const DoubleWell w = quartic();
    std::string adm;
    bool all_pass = true;
    auto mcf_run = [&](int d, int n, double eps, double r0, double T) {
        const Grid gd(d, n);
        SolverState s{initial_sphere(gd, eps, w, {0.5, 0.5, 0.5}, r0), 0.0, eps, w, nullptr, stable_dt(eps, w), 0.0,
                      false};
        RunOptions o;
        o.T = T;
        o.sample_every = 4;
        const Trajectory tr = run(s, o);
        const double F0 = tr.reports.front().free_energy;
        const auto tests = trig_test_functions(gd, 8);
        const auto rep = admissibility_report(tr, eps, 0.0, {2.0 * F0, 10.0, 10.0}, tests, 0.05, 0.25);
        all_pass = all_pass && rep.pass();
        adm += fmt("%sd=%d: b %.2f, c %.3f, d %.3f", adm.empty() ? "" : "; ", d, rep.b.worst_ratio,
                   rep.c.worst_ratio, rep.d.worst_ratio);
    };
    mcf_run(2, 128, 0.04, 0.3, 0.02);
    mcf_run(3, 32, 0.08, 0.3, 0.01);
    return {worst < 1e-12 && all_pass,
            fmt("synthetic closed forms max deviation %.1e (< 1e-12); admissibility worst ratios (<= 1) ", worst) +
                adm};
}

// ---------------------------------------------------------------- 14

Outcome reproducibility() {
    const fs::path dir = fs::temp_directory_path() / ("sacl_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "run.ini");
        cfg << "[grid]\nd = 2\nn = 32\n[model]\neps = 0.1\n[noise]\nenabled = true\nbeta = 0.5\n"
               "[time]\nT = 0.005\nrecord_increments = true\n[ensemble]\nsamples = 4\n";
    }
    auto files = [&](const std::string& cmd, const std::string& out) {
        std::ostringstream o, e;
        const int code = run_cli({cmd, "--config", (dir / "run.ini").string(), "--output", (dir / out).string(),
                                  "--seed", "4242", "--threads", "0", "--quiet"},
                                 o, e);
        if (code != 0) return nlohmann::json();
        std::ifstream in(dir / out / "manifest.json");
        return nlohmann::json::parse(in)["files"];
    };
    const auto s1 = files("simulate", "s1"), s2 = files("simulate", "s2");
    const auto e1 = files("ensemble", "e1"), e2 = files("ensemble", "e2");
    const bool ok = !s1.is_null() && !e1.is_null() && !s1.empty() && !e1.empty() && s1 == s2 && e1 == e2;
    fs::remove_all(dir);
    return {ok, fmt("simulate: %zu files, ensemble: %zu files; manifests identical: %s", s1.size(), e1.size(),
                    ok ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    app.add_option("criteria", only, "Criterion numbers to run (default: all)");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"surface tension", surface_tension_check},
        {"stationary profile", stationary_profile},
        {"MCF convergence", mcf_convergence},
        {"equipartition", equipartition},
        {"energy decay", energy_decay},
        {"first-variation identity", first_variation},
        {"current kernel", current_kernel},
        {"noise law", noise_law},
        {"martingale second moment", martingale_second_moment},
        {"rate function zero level", rate_zero_level},
        {"importance sampling", importance_sampling},
        {"tail trend", tail_trend},
        {"moduli", moduli},
        {"reproducibility", reproducibility},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), number) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("[%s] %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", number, criteria[i].first.c_str(),
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
