#include "sacl/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sacl/error.hpp"
#include "sacl/snapshot.hpp"

namespace sacl {

namespace {

using json = nlohmann::json;

template <class T>
T field_of(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ParameterError(where + ": missing \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParameterError(where + ": \"" + key + "\" has the wrong type");
    }
}

}  // namespace

SpherePathFile parse_sphere_path(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("sphere path: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParameterError("sphere path: expected a JSON object");
    SpherePathFile f;
    f.d = field_of<int>(j, "d", "sphere path");
    if (j.contains("tau")) f.tau = field_of<double>(j, "tau", "sphere path");
    if (j.contains("declared_initial_mass"))
        f.declared_initial_mass = field_of<double>(j, "declared_initial_mass", "sphere path");
    for (const auto& p : field_of<json>(j, "pieces", "sphere path")) {
        SampledPiece s;
        s.t_start = field_of<double>(p, "t_start", "sphere path piece");
        s.t_end = field_of<double>(p, "t_end", "sphere path piece");
        s.r = field_of<std::vector<double>>(p, "r", "sphere path piece");
        s.rdot = field_of<std::vector<double>>(p, "rdot", "sphere path piece");
        f.pieces.push_back(std::move(s));
    }
    if (j.contains("nucleations"))
        for (const auto& e : j["nucleations"])
            f.nucleations.push_back({field_of<double>(e, "t", "nucleation"), field_of<double>(e, "r", "nucleation")});
    return f;
}

SpherePathFile load_sphere_path(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot read sphere path " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_sphere_path(ss.str());
}

std::string sphere_path_json(const SpherePathFile& f) {
    nlohmann::ordered_json j;
    j["d"] = f.d;
    if (f.tau) j["tau"] = *f.tau;
    if (f.declared_initial_mass) j["declared_initial_mass"] = *f.declared_initial_mass;
    j["pieces"] = nlohmann::ordered_json::array();
    for (const auto& p : f.pieces)
        j["pieces"].push_back({{"t_start", p.t_start}, {"t_end", p.t_end}, {"r", p.r}, {"rdot", p.rdot}});
    j["nucleations"] = nlohmann::ordered_json::array();
    for (const auto& e : f.nucleations) j["nucleations"].push_back({{"t", e.t}, {"r", e.r}});
    return j.dump(2) + "\n";
}

SpherePath to_sphere_path(const SpherePathFile& f) {
    SpherePath p;
    p.d = f.d;
    p.tau = f.tau ? *f.tau : surface_tension(quartic()).tau;
    p.declared_initial_mass = f.declared_initial_mass;
    p.nucleations = f.nucleations;
    for (const auto& s : f.pieces) p.pieces.push_back(sampled_piece(s.t_start, s.t_end, s.r, s.rdot));
    validate(p);
    return p;
}

SpherePathFile exact_mcf_path_file(int d, double r0, double T, std::size_t samples) {
    if (samples < 2) throw ParameterError("exact_mcf_path_file: need at least 2 samples");
    SpherePathFile f;
    f.d = d;
    SampledPiece s;
    s.t_start = 0.0;
    s.t_end = T;
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = T * static_cast<double>(i) / static_cast<double>(samples - 1);
        const double r = mcf_sphere_radius(r0, d, t);
        s.r.push_back(r);
        s.rdot.push_back(-(d - 1) / r);
    }
    f.pieces.push_back(std::move(s));
    return f;
}

std::string series_csv(const Trajectory& traj) {
    std::ostringstream os;
    os << "t [time],free_energy [energy],willmore [energy/time],discrepancy_tv [energy],grad_sq [1/length^2],"
          "cum_willmore [energy],ito_drift [energy],energy_martingale [energy],energy_qv [energy^2],"
          "log_weight [1]\n";
    char buf[512];
    for (const auto& r : traj.series) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t,
                      r.free_energy, r.willmore, r.discrepancy_tv, r.grad_sq, r.cum_willmore, r.ito_drift,
                      r.energy_martingale, r.energy_qv, r.log_weight);
        os << buf;
    }
    return os.str();
}

void write_steps(const std::string& path, const Trajectory& traj) {
    if (!traj.increments_recorded) throw TrajectoryModeError("write_steps: trajectory has no recorded increments");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SnapshotError("snapshot-io", "cannot open " + path + " for writing");
    for (const auto& s : traj.steps) {
        write_snapshot(out, s.u, {traj.eps, s.t, "u", s.dt});
        write_snapshot(out, s.increment, {traj.eps, s.t, "increment", s.dt});
        if (s.noise) write_snapshot(out, *s.noise, {traj.eps, s.t, "noise", s.dt});
    }
}

void read_steps(const std::string& path, Trajectory& traj) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SnapshotError("snapshot-io", "cannot open " + path);
    traj.steps.clear();
    while (auto rec = read_snapshot(in, traj.grid.dim())) {
        if (rec->meta.kind == "u") {
            if (!rec->meta.dt) throw SnapshotError("snapshot-shape", "step record without dt");
            traj.steps.push_back({rec->meta.time, *rec->meta.dt, std::move(rec->field), TorusField(traj.grid), {}});
        } else if (rec->meta.kind == "increment" && !traj.steps.empty()) {
            traj.steps.back().increment = std::move(rec->field);
        } else if (rec->meta.kind == "noise" && !traj.steps.empty()) {
            traj.steps.back().noise = std::move(rec->field);
        } else {
            throw SnapshotError("snapshot-shape", "unexpected record kind '" + rec->meta.kind + "' in step stream");
        }
    }
    traj.increments_recorded = true;
    if (!traj.steps.empty()) traj.dt = traj.steps.front().dt;
}

}  // namespace sacl
