#include "sacl/rare_event.hpp"

#include <algorithm>
#include <cmath>

#include "sacl/error.hpp"
#include "sacl/parallel.hpp"

namespace sacl {

namespace {

constexpr double kLogWeightOverflow = 700.0;

double mean_of(std::span<const double> v) { return compensated_sum(v) / static_cast<double>(v.size()); }

double stderr_of(std::span<const double> v, double mean) {
    if (v.size() < 2) return 0.0;
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
    return std::sqrt(compensated_sum(sq) / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

double compensated_sum(std::span<const double> v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

std::vector<WeightedOutcome> run_weighted(const EnsembleSetup& setup, std::size_t count, std::uint64_t first_stream,
                                          const TiltSpec* tilt, const Observable& observable) {
    std::vector<WeightedOutcome> out(count);
    parallel_for(count, resolve_threads(setup.threads, count), [&](std::size_t i) {
        RandomStream rng(setup.seed, first_stream + i);
        Trajectory tr = run(setup.initial(), setup.options, &rng, tilt);
        out[i] = WeightedOutcome{observable(tr), tr.log_weight};
    });
    return out;
}

std::vector<double> run_ensemble(const EnsembleSetup& setup, std::size_t count, std::uint64_t first_stream,
                                 const TiltSpec* tilt, const std::function<double(const Trajectory&)>& reduce) {
    std::vector<double> out(count);
    parallel_for(count, resolve_threads(setup.threads, count), [&](std::size_t i) {
        RandomStream rng(setup.seed, first_stream + i);
        out[i] = reduce(run(setup.initial(), setup.options, &rng, tilt));
    });
    return out;
}

TiltedEstimate estimate(const EnsembleSetup& setup, const Observable& observable, double threshold, const TiltSpec* tilt,
                        std::size_t direct_samples, std::size_t tilted_samples) {
    if (direct_samples < 100) throw PreconditionError("estimate: need at least 100 direct samples");
    if (tilt != nullptr && tilted_samples < 100) throw PreconditionError("estimate: need at least 100 tilted samples");

    TiltedEstimate e;
    e.direct_samples = direct_samples;
    auto direct = run_weighted(setup, direct_samples, 0, nullptr, observable);
    std::vector<double> hits(direct_samples);
    for (std::size_t i = 0; i < direct_samples; ++i) hits[i] = direct[i].observable > threshold ? 1.0 : 0.0;
    e.p_direct = mean_of(hits);
    e.p_direct_se = std::sqrt(e.p_direct * (1.0 - e.p_direct) / static_cast<double>(direct_samples));

    std::vector<WeightedOutcome> tilted;
    if (tilt == nullptr) {
        tilted = direct;
    } else {
        tilted = run_weighted(setup, tilted_samples, kTiltedStreamOffset, tilt, observable);
    }
    e.tilted_samples = tilted.size();

    std::vector<double> w, wi, w2;
    e.weights_exactly_one = true;
    for (std::size_t i = 0; i < tilted.size(); ++i) {
        double lw = tilted[i].log_weight;
        if (lw != 0.0) e.weights_exactly_one = false;
        if (!(std::abs(lw) <= kLogWeightOverflow)) {
            e.overflow_runs.push_back(i);
            e.overflow_log_weights.push_back(lw);
            continue;
        }
        double wt = std::exp(lw);
        w.push_back(wt);
        w2.push_back(wt * wt);
        wi.push_back(tilted[i].observable > threshold ? wt : 0.0);
    }
    if (w.empty()) {
        e.inconclusive = true;
        return e;
    }
    e.mean_weight = mean_of(w);
    e.mean_weight_se = stderr_of(w, e.mean_weight);
    e.p_tilted = mean_of(wi);
    e.p_tilted_se = stderr_of(wi, e.p_tilted);
    double sw = compensated_sum(w);
    e.ess = sw * sw / compensated_sum(w2);
    e.inconclusive = e.ess < 10.0 || !e.overflow_runs.empty();
    return e;
}

double sup_free_energy(const Trajectory& traj) {
    double s = 0.0;
    for (const SeriesRow& r : traj.series) s = std::max(s, r.free_energy);
    for (const EnergyReport& r : traj.reports) s = std::max(s, r.free_energy);
    return s;
}

double energy_dissipation_sup(const Trajectory& traj) {
    double int_w = 0.0;
    if (!traj.series.empty()) {
        int_w = traj.series.back().cum_willmore;
    } else {
        for (std::size_t i = 1; i < traj.reports.size(); ++i)
            int_w += 0.5 * (traj.times[i] - traj.times[i - 1]) * (traj.reports[i].willmore + traj.reports[i - 1].willmore);
    }
    return sup_free_energy(traj) + int_w;
}

TailScan tail_table(std::vector<double> values, std::span<const double> ells) {
    for (std::size_t i = 1; i < ells.size(); ++i)
        if (!(ells[i] > ells[i - 1])) throw PreconditionError("tail_scan: ell values must increase");
    TailScan scan;
    const double n = static_cast<double>(values.size());
    for (double ell : ells) {
        TailRow row;
        row.ell = ell;
        row.count = static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [&](double v) { return v > ell; }));
        row.probability = row.count / n;
        row.censored = row.count == 0;
        row.log_probability = row.censored ? -INFINITY : std::log(row.probability);
        scan.rows.push_back(row);
    }
    // Fit over rows strictly inside (0, 1).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const TailRow& r : scan.rows) {
        if (r.censored || r.count == values.size()) continue;
        sx += r.ell;
        sy += r.log_probability;
        sxx += r.ell * r.ell;
        sxy += r.ell * r.log_probability;
        ++m;
    }
    if (m >= 2) {
        scan.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        scan.intercept = (sy - scan.slope * sx) / m;
    }
    scan.decreasing = true;
    const TailRow* prev = nullptr;
    int uncensored = 0;
    for (const TailRow& r : scan.rows) {
        if (r.censored) continue;
        ++uncensored;
        if (prev && !(r.log_probability < prev->log_probability)) scan.decreasing = false;
        prev = &r;
    }
    if (uncensored < 2) scan.decreasing = false;
    scan.samples = std::move(values);
    return scan;
}

TailScan tail_scan(const EnsembleSetup& setup, std::span<const double> ells, std::size_t samples) {
    if (samples < 100) throw PreconditionError("tail_scan: need at least 100 samples");
    auto values = run_ensemble(setup, samples, 0, nullptr, energy_dissipation_sup);
    return tail_table(std::move(values), ells);
}

}  // namespace sacl
