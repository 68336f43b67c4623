#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sacl/integrator.hpp"

namespace sacl {

/// Everything needed to launch independent trajectories of one model.
struct EnsembleSetup {
    std::function<SolverState()> initial;
    RunOptions options;
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0 = hardware concurrency
};

/// Stream index offset separating tilted from direct trajectories.
inline constexpr std::uint64_t kTiltedStreamOffset = std::uint64_t{1} << 40;

using Observable = std::function<double(const Trajectory&)>;

/// Runs `count` trajectories with streams first_stream, first_stream + 1, ...
/// and maps each through `reduce` in index order. Parallel across trajectories.
std::vector<double> run_ensemble(const EnsembleSetup& setup, std::size_t count, std::uint64_t first_stream,
                                 const TiltSpec* tilt, const std::function<double(const Trajectory&)>& reduce);

/// Per-trajectory outcome of a (possibly tilted) run.
struct WeightedOutcome {
    double observable = 0.0;
    double log_weight = 0.0;
};

std::vector<WeightedOutcome> run_weighted(const EnsembleSetup& setup, std::size_t count, std::uint64_t first_stream,
                                          const TiltSpec* tilt, const Observable& observable);

struct TiltedEstimate {
    std::size_t direct_samples = 0;
    std::size_t tilted_samples = 0;
    double p_direct = 0.0, p_direct_se = 0.0;
    double p_tilted = 0.0, p_tilted_se = 0.0;
    double mean_weight = 1.0, mean_weight_se = 0.0;
    double ess = 0.0;
    bool inconclusive = false;                 // ess < 10
    std::vector<std::size_t> overflow_runs;    // log-weight beyond the overflow bound
    std::vector<double> overflow_log_weights;
    bool weights_exactly_one = false;          // every weight bit-identical to 1
};

/// Direct frequency of {observable > threshold} and the importance-sampled
/// estimate mean(w 1{observable > threshold}) with w = exp(-N_T + [N]_T/2).
/// Without a tilt the tilted estimate reuses the direct runs with unit weights.
TiltedEstimate estimate(const EnsembleSetup& setup, const Observable& observable, double threshold, const TiltSpec* tilt,
                        std::size_t direct_samples, std::size_t tilted_samples);

/// sup_t F_eps + int_0^T W_eps from the series rows (sample reports if none).
double energy_dissipation_sup(const Trajectory& traj);
/// sup_t F_eps from the series rows and samples.
double sup_free_energy(const Trajectory& traj);

struct TailRow {
    double ell = 0.0;
    std::size_t count = 0;
    double probability = 0.0;
    double log_probability = 0.0;
    bool censored = false;  // no event observed
};

struct TailScan {
    std::vector<TailRow> rows;
    double slope = 0.0;      // least-squares slope of log p vs ell over uncensored rows
    double intercept = 0.0;
    bool decreasing = false; // strictly decreasing log p over uncensored rows
    std::vector<double> samples;
};

TailScan tail_scan(const EnsembleSetup& setup, std::span<const double> ells, std::size_t samples);
/// Same table from precomputed observable values.
TailScan tail_table(std::vector<double> values, std::span<const double> ells);

/// Neumaier-compensated sum, independent of the thread schedule.
double compensated_sum(std::span<const double> v);

}  // namespace sacl
