#include "sacl/studies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "sacl/current.hpp"
#include "sacl/energetics.hpp"
#include "sacl/error.hpp"
#include "sacl/geometry_rate.hpp"
#include "sacl/parallel.hpp"

namespace sacl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

TorusField random_trig_field(const Grid& grid, RandomStream& rng, int kmax, double amplitude) {
    const int d = grid.dim();
    TorusField u(grid);
    MultiIndex k{0, 0, 0};
    const int side = 2 * kmax + 1;
    int total = 1;
    for (int a = 0; a < d; ++a) total *= side;
    for (int idx = 0; idx < total; ++idx) {
        int rem = idx;
        double k2 = 0.0;
        for (int a = 0; a < d; ++a) {
            k[a] = rem % side - kmax;
            rem /= side;
            k2 += k[a] * k[a];
        }
        const double c = rng.normal() / (1.0 + k2);
        const double s = rng.normal() / (1.0 + k2);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Point x = grid.point(i);
            double phase = 0.0;
            for (int a = 0; a < d; ++a) phase += kTwoPi * k[a] * x[a];
            u[i] += c * std::cos(phase) + s * std::sin(phase);
        }
    }
    double sup = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) sup = std::max(sup, std::abs(u[i]));
    if (sup > 0.0)
        for (std::size_t i = 0; i < u.size(); ++i) u[i] *= amplitude / sup;
    return u;
}

TorusField random_trig_vector_field(const Grid& grid, RandomStream& rng, int kmax, double amplitude) {
    TorusField v(grid, grid.dim());
    const std::size_t n = grid.size();
    for (int a = 0; a < grid.dim(); ++a) {
        TorusField c = random_trig_field(grid, rng, kmax, amplitude);
        for (std::size_t i = 0; i < n; ++i) v[a * n + i] = c[i];
    }
    return v;
}

std::vector<McfStudyRow> mcf_study(const McfStudyConfig& cfg, int d, const DoubleWell& w, unsigned threads) {
    if (d < 2) throw ConfigError("grid.d", "grid.d: the curvature-flow study needs d = 2 or 3");
    if (cfg.eps_list.size() != cfg.n_list.size())
        throw ConfigError("mcf_study.n_list", "mcf_study.n_list: one grid size per eps is required");
    const std::size_t m = cfg.eps_list.size();
    std::vector<Trajectory> runs(2 * m);
    std::vector<double> coarse_dt(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double per = std::ceil(cfg.sample_dt / stable_dt(cfg.eps_list[i], w) - 1e-9);
        coarse_dt[i] = cfg.sample_dt / per;
    }
    // Largest runs first so the pool stays busy.
    parallel_for(2 * m, resolve_threads(threads, 2 * m), [&](std::size_t job) {
        const std::size_t i = m - 1 - job / 2;
        const bool fine = job % 2 == 0;
        const double eps = cfg.eps_list[i];
        const Grid g(d, cfg.n_list[i]);
        const double dt = fine ? 0.5 * coarse_dt[i] : coarse_dt[i];
        SolverState s{initial_sphere(g, eps, w, {0.5, 0.5, 0.5}, cfg.r0), 0.0, eps, w, nullptr, dt, 0.0, false};
        RunOptions o;
        o.T = cfg.T;
        o.sample_every = static_cast<std::size_t>(std::llround(cfg.sample_dt / dt));
        o.diagnostics_every = 0;
        runs[2 * i + (fine ? 1 : 0)] = run(std::move(s), o);
    });

    std::vector<McfStudyRow> rows(m);
    for (std::size_t i = 0; i < m; ++i) {
        const Trajectory& c = runs[2 * i];
        const Trajectory& f = runs[2 * i + 1];
        if (c.times.size() != f.times.size())
            throw NumericError("mcf_study: coarse and fine runs sampled at different times");
        McfStudyRow& row = rows[i];
        row.eps = cfg.eps_list[i];
        row.n = cfg.n_list[i];
        row.dt = coarse_dt[i];
        row.steps = f.step_count;
        row.samples = f.times.size();
        for (std::size_t k = 0; k < f.times.size(); ++k) {
            const double exact = mcf_sphere_radius(cfg.r0, d, f.times[k]);
            const double rc = levelset_radius(c.fields[k]);
            const double rf = levelset_radius(f.fields[k]);
            row.max_rel_error_coarse = std::max(row.max_rel_error_coarse, std::abs(rc - exact) / exact);
            row.max_rel_error_fine = std::max(row.max_rel_error_fine, std::abs(rf - exact) / exact);
            row.max_rel_error = std::max(row.max_rel_error, std::abs(2.0 * rf - rc - exact) / exact);
            if (k > 0)
                row.xi_tv_integral += 0.5 * (f.times[k] - f.times[k - 1]) *
                                      (f.reports[k].discrepancy_tv + f.reports[k - 1].discrepancy_tv);
        }
    }
    return rows;
}

std::string mcf_study_csv(const std::vector<McfStudyRow>& rows) {
    std::ostringstream os;
    os << "eps [length],n [points],dt [time],steps [1],samples [1],max_rel_radius_error [1],"
          "max_rel_radius_error_coarse [1],max_rel_radius_error_fine [1],xi_tv_integral [energy*time]\n";
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%zu,%zu,%.17g,%.17g,%.17g,%.17g\n", r.eps, r.n, r.dt, r.steps,
                      r.samples, r.max_rel_error, r.max_rel_error_coarse, r.max_rel_error_fine, r.xi_tv_integral);
        os << buf;
    }
    return os.str();
}

std::vector<CheckResult> selfcheck(std::uint64_t seed) {
    std::vector<CheckResult> out;
    auto add = [&](std::string name, double value, double threshold) {
        out.push_back({std::move(name), value, threshold, std::isfinite(value) && value < threshold});
    };
    const DoubleWell w = quartic();

    const double tau = surface_tension(w).tau;
    add("surface_tension_closed_form", std::abs(tau - 2.0 * std::sqrt(2.0) / 3.0), 1e-9);

    {
        const double eps = 0.02;
        const Grid g(1, 512);
        const TorusField u = initial_sphere(g, eps, w, {0.5, 0.5, 0.5}, 0.25);
        const EnergyReport r = energy_report(u, eps, w);
        add("profile_willmore", r.willmore, 1e-4);
        add("profile_discrepancy_tv", r.discrepancy_tv, 1e-6);
        add("profile_energy_rel_error", std::abs(r.free_energy - 2.0 * tau) / (2.0 * tau), 1e-4);
    }

    {
        RandomStream rng(seed, 0);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const int d = 1 + i % 3;
            const Grid g(d, d == 3 ? 16 : 32);
            const TorusField u = random_trig_field(g, rng, 3, 1.0);
            const TorusField X = random_trig_vector_field(g, rng, 3, 1.0);
            worst = std::max(worst, first_variation_check(u, 0.1, w, X).residual);
        }
        add("first_variation_identity", worst, 1e-8);
    }

    {
        const Grid g(2, 32);
        const double eps = 0.1;
        auto noise = std::make_shared<const NoiseModel>(build_noise(g, eps, 0.5, 1.0));
        RandomStream rng(seed, 1);
        SolverState s{initial_sphere(g, eps, w, {0.5, 0.5, 0.5}, 0.25), 0.0, eps, w, noise, stable_dt(eps, w), 0.0,
                      false};
        RunOptions o;
        o.T = 10 * s.dt;
        o.diagnostics_every = 0;
        o.record_increments = true;
        const Trajectory tr = run(std::move(s), o, &rng);
        const TorusField eta = random_trig_vector_field(g, rng, 2, 1.0);
        CurrentTestField f = [&eta](double, const PlaneField& p) { return p.project(eta); };
        // Scale of the unprojected field, since P eta itself is tiny.
        CurrentTestField raw = [&eta](double, const PlaneField&) { return eta; };
        const double scale = current_scale(tr, raw, eps);
        add("current_kernel", std::abs(current_eval(tr, f, eps)) / std::max(scale, 1e-300), 1e-10);
    }
    return out;
}

}  // namespace sacl
