#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sacl/geometry_rate.hpp"
#include "sacl/integrator.hpp"

namespace sacl {

/// On-disk form of a SpherePath: pieces sampled on a uniform time grid
/// (r and its analytic derivative), nucleations as (t, r) pairs.
///   {"d": 2, "tau": .., "declared_initial_mass": ..,
///    "pieces": [{"t_start": .., "t_end": .., "r": [..], "rdot": [..]}],
///    "nucleations": [{"t": .., "r": ..}]}
/// `tau` defaults to the quartic surface tension.
struct SampledPiece {
    double t_start = 0.0;
    double t_end = 0.0;
    std::vector<double> r;
    std::vector<double> rdot;
};

struct SpherePathFile {
    int d = 2;
    std::optional<double> tau;
    std::optional<double> declared_initial_mass;
    std::vector<SampledPiece> pieces;
    std::vector<NucleationEvent> nucleations;
};

SpherePathFile parse_sphere_path(const std::string& json_text);
SpherePathFile load_sphere_path(const std::string& path);
std::string sphere_path_json(const SpherePathFile& file);
SpherePath to_sphere_path(const SpherePathFile& file);
/// Samples the exact shrinking sphere r0 -> sqrt(r0^2 - 2(d-1)t) on [0, T].
SpherePathFile exact_mcf_path_file(int d, double r0, double T, std::size_t samples);

/// Series rows with a header naming each column and its units.
std::string series_csv(const Trajectory& traj);

/// Recorded steps as a SACF1 stream: for every step a "u" record (time t,
/// dt), an "increment" record and, when noise was sampled, a "noise" record.
void write_steps(const std::string& path, const Trajectory& traj);
/// Inverse of write_steps; fills traj.steps and sets increments_recorded.
void read_steps(const std::string& path, Trajectory& traj);

}  // namespace sacl
