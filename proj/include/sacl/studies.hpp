#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sacl/config.hpp"
#include "sacl/integrator.hpp"
#include "sacl/rng.hpp"

namespace sacl {

/// sum over |k_a| <= kmax of random cos/sin modes with amplitudes decaying
/// like 1/(1+|k|^2), rescaled so that sup|u| = amplitude.
TorusField random_trig_field(const Grid& grid, RandomStream& rng, int kmax, double amplitude);
/// Vector field with independent random_trig_field components.
TorusField random_trig_vector_field(const Grid& grid, RandomStream& rng, int kmax, double amplitude);

struct McfStudyRow {
    double eps = 0.0;
    int n = 0;
    double dt = 0.0;               // coarse step; the fine run uses dt / 2
    std::size_t steps = 0;         // steps of the fine run
    std::size_t samples = 0;
    double max_rel_error_coarse = 0.0;
    double max_rel_error_fine = 0.0;
    double max_rel_error = 0.0;    // of the extrapolated radius 2 r_fine - r_coarse
    double xi_tv_integral = 0.0;   // trapezoid rule for int_0^T ||xi||_TV dt on the fine run
};

/// Deterministic shrinking-sphere runs, compared with the exact radius
/// sqrt(r0^2 - 2(d-1)t) at the sample times. Each eps is run at the largest
/// stable dt dividing sample_dt and at half of it; the first-order time error
/// of the semi-implicit step is removed by Richardson extrapolation of the
/// level-set radius, since at dt ~ eps^2 it does not shrink with eps.
/// Runs in parallel.
std::vector<McfStudyRow> mcf_study(const McfStudyConfig& cfg, int d, const DoubleWell& w, unsigned threads);
std::string mcf_study_csv(const std::vector<McfStudyRow>& rows);

struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

/// Identity suite: surface tension closed form, stationary profile
/// residuals, first-variation identity on random resolved pairs and the
/// current kernel on a short stochastic run.
std::vector<CheckResult> selfcheck(std::uint64_t seed);

}  // namespace sacl
