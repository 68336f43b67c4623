#include "sacl/integrator.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "sacl/error.hpp"

namespace sacl {

namespace {

constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;
constexpr double kBlowUp = 2.0;

TorusField reaction_rhs(const TorusField& u, double eps, const DoubleWell& w, double dt, double S, bool dealias) {
    const double inv_eps2 = 1.0 / (eps * eps);
    TorusField rhs(u.grid());
    if (dealias) {
        TorusField react = sacl::dealias(map(u, w.first));
        for (std::size_t i = 0; i < u.size(); ++i)
            rhs[i] = u[i] + dt * S * inv_eps2 * u[i] - dt * inv_eps2 * react[i];
    } else {
        for (std::size_t i = 0; i < u.size(); ++i)
            rhs[i] = u[i] + dt * S * inv_eps2 * u[i] - dt * inv_eps2 * w.first(u[i]);
    }
    return rhs;
}

TorusField implicit_solve(const TorusField& rhs, double eps, double dt, double S) {
    Spectrum s = forward(rhs);
    const double shift = 1.0 + dt * S / (eps * eps);
    const auto k_sq = wavenumber_sq_table(rhs.grid());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] /= shift + dt * kFourPiSq * k_sq[i];
    return inverse(s);
}

bool noisy(const SolverState& s) { return s.noise && s.noise->lambda > 0.0; }

StepResult step_unchecked(SolverState& s, RandomStream* rng, const TiltSpec* tilt) {
    const double dt = s.dt;
    TorusField rhs = reaction_rhs(s.u, s.eps, s.well, dt, s.stabilization, s.dealias);
    StepResult res{TorusField(s.u.grid()), std::nullopt, 0.0, 0.0};

    const bool tilted = tilt != nullptr && tilt->strength != 0.0;
    if (tilted && !noisy(s)) throw PreconditionError("tilt requires an active noise model");

    if (noisy(s)) {
        if (rng == nullptr) throw PreconditionError("stochastic step needs a random stream");
        const NoiseModel& nm = *s.noise;
        const double amp = std::sqrt(2.0 * nm.lambda);
        TorusField dA = sample_increment(nm, dt, *rng);
        rhs.axpy(amp, dA);

        if (tilted) {
            const double eps = s.eps;
            const double a = tilt->strength;
            Spectrum uh = forward(s.u);
            TorusField g(s.u.grid());
            if (tilt->eta) {
                TorusField eta = tilt->eta(s.t);
                TorusField grad = gradient(uh);
                TorusField ge = dot(grad, eta);
                g.axpy(eps, ge);
            }
            if (tilt->psi) {
                TorusField psi = tilt->psi(s.t);
                TorusField lap = laplacian(uh);
                for (std::size_t i = 0; i < g.size(); ++i)
                    g[i] -= psi[i] * (eps * lap[i] - s.well.first(s.u[i]) / eps);
            }
            TorusField jg = convolve(g, nm.kernel_hat);
            TorusField drift = convolve(jg, nm.kernel_hat);
            drift *= 2.0 * nm.lambda * a;
            rhs.axpy(dt, drift);
            res.tilt_martingale = a * (amp * inner(g, dA) + dt * inner(g, drift));
            res.tilt_qv = a * a * 2.0 * nm.lambda * dt * inner(jg, jg);
        }
        res.noise = std::move(dA);
    }

    TorusField next = implicit_solve(rhs, s.eps, dt, s.stabilization);
    for (double v : next.values()) {
        if (!(std::abs(v) <= kBlowUp)) {
            std::ostringstream os;
            os << "sup|u| exceeded " << kBlowUp << " at t = " << s.t + dt;
            throw DivergenceError(s.t + dt, os.str());
        }
    }
    res.increment = next - s.u;
    s.u = std::move(next);
    s.t += dt;
    return res;
}

}  // namespace

double stable_dt(double eps, const DoubleWell& w) { return eps * eps / (2.0 * max_curvature(w, kBlowUp)); }

void check_state(const SolverState& s) {
    if (!s.u.is_scalar()) throw InvalidFieldError("solver state: u must be scalar");
    s.u.check_finite();
    if (!(s.eps > 0.0)) throw PreconditionError("solver state: eps must be positive");
    if (!(s.dt > 0.0)) throw PreconditionError("solver state: dt must be positive");
    if (!(s.stabilization >= 0.0)) throw PreconditionError("solver state: stabilization must be non-negative");
    if (s.u.max_abs() > kBlowUp) throw DivergenceError(s.t, "initial datum exceeds the blow-up bound");
    if (s.noise && !(s.noise->grid == s.u.grid())) throw GridMismatchError("noise model lives on a different grid");
    if (s.stabilization == 0.0) {
        double guard = stable_dt(s.eps, s.well);
        if (s.dt > guard * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "dt = " << s.dt << " exceeds the stability guard " << guard;
            throw StabilityError(os.str());
        }
    }
}

double default_tilt_strength(double eps, double lambda) {
    if (!(eps > 0.0 && lambda > 0.0)) throw PreconditionError("default tilt strength needs eps, lambda > 0");
    return 1.0 / (eps * lambda);
}

StepResult step(SolverState& s, RandomStream* rng, const TiltSpec* tilt) {
    check_state(s);
    return step_unchecked(s, rng, tilt);
}

TorusField deterministic_update(const TorusField& u, double eps, const DoubleWell& w, double dt, double S,
                                bool dealias) {
    return implicit_solve(reaction_rhs(u, eps, w, dt, S, dealias), eps, dt, S);
}

double Trajectory::weight() const { return std::exp(log_weight); }

Trajectory run(SolverState s, const RunOptions& opts, RandomStream* rng, const TiltSpec* tilt) {
    if (!(opts.T > 0.0)) throw PreconditionError("run: T must be positive");
    if (opts.sample_every == 0) throw PreconditionError("run: sample_every must be at least 1");
    check_state(s);

    Trajectory tr;
    tr.grid = s.u.grid();
    tr.eps = s.eps;
    tr.dt = s.dt;
    tr.stabilization = s.stabilization;
    tr.dealias = s.dealias;
    tr.well = s.well;
    tr.noise = s.noise;
    tr.lambda = s.noise ? s.noise->lambda : 0.0;
    tr.increments_recorded = opts.record_increments;

    const auto nsteps = static_cast<std::size_t>(std::max(1.0, std::ceil(opts.T / s.dt - 1e-9)));
    const bool stochastic = noisy(s);
    const double eps = s.eps;
    const double lambda = tr.lambda;
    const double ito_const = stochastic ? eps * lambda * s.noise->kernel_grad_l2_sq : 0.0;
    const double ito_mass = stochastic ? lambda / eps * s.noise->kernel_l2_sq : 0.0;
    const std::size_t every = opts.diagnostics_every;

    double cum_w = 0.0, ito = 0.0, mart = 0.0, mart_qv = 0.0;
    double last_w = 0.0;

    auto push_row = [&](double t, const EnergyReport& rep) {
        SeriesRow row;
        row.t = t;
        row.free_energy = rep.free_energy;
        row.willmore = rep.willmore;
        row.discrepancy_tv = rep.discrepancy_tv;
        row.grad_sq = rep.grad_sq;
        row.cum_willmore = cum_w;
        row.ito_drift = ito;
        row.energy_martingale = mart;
        row.energy_qv = mart_qv;
        row.log_weight = tr.log_weight;
        tr.series.push_back(row);
    };

    EnergyReport rep0 = energy_report(s.u, eps, s.well);
    tr.times.push_back(s.t);
    tr.fields.push_back(s.u);
    tr.reports.push_back(rep0);
    last_w = rep0.willmore;
    double last_row_t = s.t;
    push_row(s.t, rep0);

    for (std::size_t m = 0; m < nsteps; ++m) {
        if (every > 0 && m > 0 && m % every == 0) {
            EnergyReport rep = energy_report(s.u, eps, s.well);
            last_w = rep.willmore;
            push_row(s.t, rep);
            last_row_t = s.t;
        }

        // Left-point integrands of the energy identity.
        TorusField dF(tr.grid);
        double wpp = 0.0;
        if (stochastic) {
            TorusField lap = laplacian(s.u);
            TorusField w2(tr.grid);
            for (std::size_t i = 0; i < dF.size(); ++i) {
                dF[i] = -eps * lap[i] + s.well.first(s.u[i]) / eps;
                w2[i] = s.well.second(s.u[i]);
            }
            wpp = integrate(w2);
        }

        std::optional<TorusField> u_left;
        if (opts.record_increments) u_left = s.u;
        const double t_left = s.t;

        StepResult r = step_unchecked(s, rng, tilt);
        ++tr.step_count;

        cum_w += s.dt * last_w;
        if (stochastic) {
            ito += s.dt * (ito_const + ito_mass * wpp);
            mart += std::sqrt(2.0 * lambda) * inner(dF, *r.noise);
            TorusField jdF = convolve(dF, s.noise->kernel_hat);
            mart_qv += 2.0 * lambda * s.dt * inner(jdF, jdF);
        }
        tr.tilt_martingale += r.tilt_martingale;
        tr.tilt_qv += r.tilt_qv;
        tr.log_weight += -r.tilt_martingale + 0.5 * r.tilt_qv;

        if (opts.record_increments)
            tr.steps.push_back(RecordedStep{t_left, s.dt, std::move(*u_left), std::move(r.increment), std::move(r.noise)});
        if (opts.on_step) opts.on_step(s, m);

        const bool last = m + 1 == nsteps;
        if ((m + 1) % opts.sample_every == 0 || last) {
            EnergyReport rep = energy_report(s.u, eps, s.well);
            tr.times.push_back(s.t);
            tr.fields.push_back(s.u);
            tr.reports.push_back(rep);
            if (every == 0) last_w = rep.willmore;
            if (every == 0 || (last && s.t > last_row_t)) {
                push_row(s.t, rep);
                last_row_t = s.t;
            }
        }
    }
    return tr;
}

TorusField initial_sphere(const Grid& grid, double eps, const DoubleWell& w, const Point& center, double r0) {
    if (!(eps > 0.0)) throw PreconditionError("initial_sphere: eps must be positive");
    if (!(r0 > 2.0 * eps && r0 < 0.5 - 2.0 * eps)) {
        std::ostringstream os;
        os << "initial_sphere: need 2 eps < r0 < 1/2 - 2 eps (eps = " << eps << ", r0 = " << r0 << ")";
        throw GeometryError(os.str());
    }
    const int d = grid.dim();
    return TorusField::from_function(
        grid, [&](const Point& x) { return optimal_profile(w, eps, r0 - torus_distance(x, center, d)); });
}

EnergyBalance energy_balance(const Trajectory& traj) {
    EnergyBalance b;
    if (traj.series.empty()) throw TrajectoryModeError("energy_balance: trajectory has no diagnostics");
    const double f0 = traj.series.front().free_energy;
    for (const SeriesRow& r : traj.series) {
        b.times.push_back(r.t);
        double v = r.free_energy + r.cum_willmore - f0;
        b.series.push_back(v);
        b.ito_drift.push_back(r.ito_drift);
        b.martingale.push_back(r.energy_martingale);
        b.max_abs = std::max(b.max_abs, std::abs(v));
    }
    return b;
}

}  // namespace sacl
