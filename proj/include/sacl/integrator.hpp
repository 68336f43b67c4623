#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "sacl/energetics.hpp"
#include "sacl/noise.hpp"
#include "sacl/potential.hpp"
#include "sacl/rng.hpp"
#include "sacl/torus_field.hpp"

namespace sacl {

struct SolverState {
    TorusField u;
    double t = 0.0;
    double eps = 0.0;
    DoubleWell well;
    std::shared_ptr<const NoiseModel> noise;  // null for the deterministic flow
    double dt = 0.0;
    double stabilization = 0.0;  // S >= 0
    bool dealias = false;        // 2/3-rule on the reaction term
};

/// eps^2 / (2 max_{|v|<=2} |W''(v)|): the explicit-reaction guard for S = 0.
double stable_dt(double eps, const DoubleWell& w);
/// Throws StabilityError / PreconditionError on an inconsistent state.
void check_state(const SolverState& s);

/// Girsanov tilt: g = eps grad u . eta - psi (eps Lap u - W'(u)/eps),
/// drift 2 lambda a j*j*g.
struct TiltSpec {
    std::function<TorusField(double)> eta;  // vector field at time t (may be empty)
    std::function<TorusField(double)> psi;  // scalar field at time t (may be empty)
    double strength = 0.0;                  // a
};

/// (eps lambda)^-1.
double default_tilt_strength(double eps, double lambda);

struct StepResult {
    TorusField increment;                 // u^{m+1} - u^m
    std::optional<TorusField> noise;      // the sampled j * dB (before the sqrt(2 lambda) factor)
    double tilt_martingale = 0.0;         // dN
    double tilt_qv = 0.0;                 // d[N]
};

/// Semi-implicit step
///   (1 - dt Lap + dt S/eps^2) u+ = u + dt S/eps^2 u - dt W'(u)/eps^2 + sqrt(2 lambda) dA + dt drift.
/// A null rng is only allowed without noise. A tilt with strength 0 is ignored.
StepResult step(SolverState& s, RandomStream* rng = nullptr, const TiltSpec* tilt = nullptr);

/// The deterministic part of one step, u -> u+, with exactly the operations
/// `step` uses; action_eps relies on this.
TorusField deterministic_update(const TorusField& u, double eps, const DoubleWell& w, double dt, double S,
                                bool dealias);

struct RecordedStep {
    double t = 0.0;   // left end point
    double dt = 0.0;
    TorusField u;     // u at t
    TorusField increment;
    std::optional<TorusField> noise;
};

/// Per-step scalar diagnostics. `cum_willmore` is the left Riemann sum of
/// W_eps over the elapsed steps, `ito_drift` the accumulated Ito correction
/// R_t, `energy_martingale`/`energy_qv` the martingale N_t of the energy
/// identity and its bracket, `log_weight` = -N + [N]/2 of the tilt.
struct SeriesRow {
    double t = 0.0;
    double free_energy = 0.0;
    double willmore = 0.0;
    double discrepancy_tv = 0.0;
    double grad_sq = 0.0;
    double cum_willmore = 0.0;
    double ito_drift = 0.0;
    double energy_martingale = 0.0;
    double energy_qv = 0.0;
    double log_weight = 0.0;
};

struct Trajectory {
    Grid grid{1, 8};
    double eps = 0.0;
    double dt = 0.0;
    double stabilization = 0.0;
    bool dealias = false;
    DoubleWell well;
    double lambda = 0.0;
    std::shared_ptr<const NoiseModel> noise;

    std::vector<double> times;               // sample times, strictly increasing
    std::vector<TorusField> fields;          // u at the sample times
    std::vector<EnergyReport> reports;       // diagnostics at the sample times
    std::vector<SeriesRow> series;           // every `diagnostics_every` steps, plus t0
    bool increments_recorded = false;
    std::vector<RecordedStep> steps;

    double log_weight = 0.0;
    double tilt_martingale = 0.0;
    double tilt_qv = 0.0;
    std::size_t step_count = 0;

    double final_time() const { return times.empty() ? 0.0 : times.back(); }
    double weight() const;
};

struct RunOptions {
    double T = 0.0;
    std::size_t sample_every = 1;       // steps between stored samples (the last step is always stored)
    std::size_t diagnostics_every = 1;  // steps between series rows; 0 = sample times only
    bool record_increments = false;
    std::function<void(const SolverState&, std::size_t)> on_step;  // called after every step
};

/// Steps until t >= T (within rounding of the step count).
Trajectory run(SolverState state, const RunOptions& opts, RandomStream* rng = nullptr,
               const TiltSpec* tilt = nullptr);

/// u(x) = m(r0 - |x - center|): one sphere in d = 2, 3 and a symmetric pair of
/// interfaces at center +- r0 in d = 1.
TorusField initial_sphere(const Grid& grid, double eps, const DoubleWell& w, const Point& center, double r0);

struct EnergyBalance {
    std::vector<double> times;
    std::vector<double> series;     // F(u_t) + int_0^t W - F(u_0)
    std::vector<double> ito_drift;  // R_t
    std::vector<double> martingale; // N_t
    double max_abs = 0.0;
};

/// Built from the trajectory's series rows.
EnergyBalance energy_balance(const Trajectory& traj);

}  // namespace sacl
