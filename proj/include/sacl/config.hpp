#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sacl/integrator.hpp"
#include "sacl/noise.hpp"
#include "sacl/rare_event.hpp"

namespace sacl {

struct InitialSpec {
    std::string kind = "sphere";  // sphere | constant | sine | snapshot
    std::array<double, 3> center{0.5, 0.5, 0.5};
    double r0 = 0.25;
    double value = 0.0;      // constant
    double amplitude = 0.5;  // sine: amplitude * prod sin(2 pi mode x_a)
    int mode = 1;
    std::string path;        // snapshot
    bool operator==(const InitialSpec&) const = default;
};

struct TiltConfig {
    bool enabled = false;
    bool strength_auto = true;  // (eps lambda)^-1
    double strength = 0.0;
    double psi_amplitude = 0.0;  // psi(t, x) = psi_amplitude (1 - t/T)
    double eta_amplitude = 0.0;  // eta(x) = eta_amplitude sin(2 pi eta_mode x_axis) e_axis
    int eta_mode = 1;
    int eta_axis = 0;
    bool operator==(const TiltConfig&) const = default;
};

struct RareEventConfig {
    std::string mode = "estimate";            // estimate | tail_scan | both
    std::string observable = "sup_free_energy";  // sup_free_energy | energy_dissipation
    double threshold = 0.0;
    std::size_t direct_samples = 1000;
    std::size_t tilted_samples = 100;
    std::vector<double> ells;
    bool operator==(const RareEventConfig&) const = default;
};

struct McfStudyConfig {
    std::vector<double> eps_list{0.04, 0.02, 0.01};
    std::vector<int> n_list{128, 256, 512};
    double r0 = 0.35;
    double T = 0.05;
    double sample_dt = 0.0025;
    bool operator==(const McfStudyConfig&) const = default;
};

struct ModuliConfig {
    bool ell1_auto = true;  // 2 F(u0)
    double ell1 = 0.0;
    double ell2 = 10.0;
    double ell3 = 10.0;
    double alpha2 = 0.1;
    double alpha3 = 0.25;
    std::size_t test_functions = 8;
    bool operator==(const ModuliConfig&) const = default;
};

struct RateConfig {
    std::string sphere_path;  // SpherePath JSON; empty = action of a simulated trajectory
    bool operator==(const RateConfig&) const = default;
};

struct DiagnoseConfig {
    std::string input;       // samples stream (SACF1)
    std::string increments;  // optional recorded-step stream
    bool operator==(const DiagnoseConfig&) const = default;
};

struct RunConfig {
    int d = 1;
    int n = 256;
    std::string well = "quartic";
    double eps = 0.02;
    bool dealias = false;

    bool noise_enabled = false;
    double beta = 1.0;
    double kappa = 1.0;

    bool dt_auto = true;
    double dt = 0.0;  // resolved
    double T = 0.01;
    double stabilization = 0.0;
    std::size_t sample_every = 1;
    std::size_t diagnostics_every = 1;
    bool record_increments = false;

    InitialSpec initial;
    TiltConfig tilt;

    std::size_t samples = 1;
    std::uint64_t seed = 0;
    std::string output_dir = "out";

    RareEventConfig rare_event;
    McfStudyConfig mcf_study;
    ModuliConfig moduli;
    RateConfig rate;
    DiagnoseConfig diagnose;

    bool operator==(const RunConfig&) const = default;
};

/// INI-style text: `key = value` lines inside `[section]` headers, `;` or `#`
/// comments. Unknown keys, type mismatches and violated preconditions raise
/// ConfigError naming `section.key`; an under-resolved noise kernel raises
/// UnderResolvedKernelError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text that parses back to the same config.
std::string config_echo(const RunConfig& cfg);

Grid make_grid(const RunConfig& cfg);
std::shared_ptr<const NoiseModel> make_noise(const RunConfig& cfg);
TorusField make_initial(const RunConfig& cfg);
/// Fresh solver state at t = 0; the noise model is shared.
SolverState make_state(const RunConfig& cfg, std::shared_ptr<const NoiseModel> noise);
RunOptions make_run_options(const RunConfig& cfg);
/// Null when the tilt is disabled.
std::unique_ptr<TiltSpec> make_tilt(const RunConfig& cfg);
EnsembleSetup make_ensemble(const RunConfig& cfg, unsigned threads);

}  // namespace sacl
