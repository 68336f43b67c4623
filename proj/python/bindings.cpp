#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "sacl/cli.hpp"
#include "sacl/config.hpp"
#include "sacl/energetics.hpp"
#include "sacl/error.hpp"
#include "sacl/geometry_rate.hpp"
#include "sacl/integrator.hpp"
#include "sacl/io.hpp"
#include "sacl/moduli.hpp"
#include "sacl/noise.hpp"
#include "sacl/potential.hpp"
#include "sacl/rng.hpp"
#include "sacl/studies.hpp"

namespace py = pybind11;
using namespace sacl;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

TorusField field_from_array(const Array& a) {
    const int d = static_cast<int>(a.ndim());
    if (d < 1 || d > 3) throw py::value_error("field must have 1 to 3 axes");
    for (int i = 1; i < d; ++i)
        if (a.shape(i) != a.shape(0)) throw py::value_error("field grid must be cubic");
    TorusField f(Grid(d, static_cast<int>(a.shape(0))));
    std::copy(a.data(), a.data() + f.size(), f.values().begin());
    return f;
}

Array array_from_field(const TorusField& f) {
    std::vector<py::ssize_t> shape(static_cast<std::size_t>(f.grid().dim()), f.grid().n());
    Array a(shape);
    std::copy(f.values().begin(), f.values().end(), a.mutable_data());
    return a;
}

py::dict report_dict(const EnergyReport& r) {
    py::dict d;
    d["free_energy"] = r.free_energy;
    d["willmore"] = r.willmore;
    d["discrepancy_tv"] = r.discrepancy_tv;
    d["mass"] = r.mass;
    d["grad_sq"] = r.grad_sq;
    return d;
}

py::dict simulate(const std::string& config_text, std::optional<std::uint64_t> seed) {
    RunConfig cfg = parse_config(config_text);
    if (seed) cfg.seed = *seed;
    Trajectory tr = [&] {
        py::gil_scoped_release release;
        auto noise = make_noise(cfg);
        auto tilt = make_tilt(cfg);
        std::optional<RandomStream> rng;
        if (noise) rng.emplace(cfg.seed, 0);
        return run(make_state(cfg, noise), make_run_options(cfg), rng ? &*rng : nullptr, tilt.get());
    }();

    py::list fields, reports;
    for (const auto& f : tr.fields) fields.append(array_from_field(f));
    for (const auto& r : tr.reports) reports.append(report_dict(r));
    py::dict series;
    auto column = [&](const char* name, double SeriesRow::*m) {
        std::vector<double> v;
        v.reserve(tr.series.size());
        for (const auto& row : tr.series) v.push_back(row.*m);
        series[name] = py::array(py::cast(v));
    };
    column("t", &SeriesRow::t);
    column("free_energy", &SeriesRow::free_energy);
    column("willmore", &SeriesRow::willmore);
    column("discrepancy_tv", &SeriesRow::discrepancy_tv);
    column("cum_willmore", &SeriesRow::cum_willmore);
    column("ito_drift", &SeriesRow::ito_drift);
    column("energy_martingale", &SeriesRow::energy_martingale);

    py::dict out;
    out["times"] = py::array(py::cast(tr.times));
    out["fields"] = fields;
    out["reports"] = reports;
    out["series"] = series;
    out["eps"] = tr.eps;
    out["dt"] = tr.dt;
    out["lambda"] = tr.lambda;
    out["steps"] = tr.step_count;
    out["log_weight"] = tr.log_weight;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stochastic Allen-Cahn simulations on the flat torus";
    m.attr("__version__") = "0.1.0";

    static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(base, (e.code() + ": " + e.what()).c_str());
        }
    });

    m.def("surface_tension", [](const std::string& well) { return surface_tension(well_by_label(well)).tau; },
          py::arg("well") = "quartic");
    m.def("optimal_profile",
          [](double eps, double x, const std::string& well) { return optimal_profile(well_by_label(well), eps, x); },
          py::arg("eps"), py::arg("x"), py::arg("well") = "quartic");
    m.def("noise_strength", &noise_strength, py::arg("eps"), py::arg("beta"), py::arg("dim"), py::arg("kappa"));
    m.def("mcf_sphere_radius", &mcf_sphere_radius, py::arg("r0"), py::arg("d"), py::arg("t"));

    m.def("free_energy",
          [](const Array& u, double eps, const std::string& well) {
              return free_energy(field_from_array(u), eps, well_by_label(well));
          },
          py::arg("u"), py::arg("eps"), py::arg("well") = "quartic");
    m.def("energy_report",
          [](const Array& u, double eps, const std::string& well) {
              return report_dict(energy_report(field_from_array(u), eps, well_by_label(well)));
          },
          py::arg("u"), py::arg("eps"), py::arg("well") = "quartic");

    m.def("omega_one",
          [](const std::vector<double>& z, double T, double delta) { return omega_one(z, T, delta); },
          py::arg("z"), py::arg("T"), py::arg("delta"));

    m.def("rate_sphere_path",
          [](const std::string& json_text) {
              const RateBreakdown r = rate_total_sphere(to_sphere_path(parse_sphere_path(json_text)));
              py::dict d;
              d["i_ac"] = r.i_ac;
              d["i_nucl"] = r.i_nucl;
              d["total"] = r.total;
              return d;
          },
          py::arg("json_text"));
    m.def("exact_mcf_path_json",
          [](int d, double r0, double T, std::size_t samples) {
              return sphere_path_json(exact_mcf_path_file(d, r0, T, samples));
          },
          py::arg("d"), py::arg("r0"), py::arg("T"), py::arg("samples") = 400);

    m.def("config_echo", [](const std::string& text) { return config_echo(parse_config(text)); },
          py::arg("config_text"));
    m.def("simulate", &simulate, py::arg("config_text"), py::arg("seed") = py::none());
    m.def("action_eps",
          [](const std::string& config_text, std::optional<std::uint64_t> seed) {
              RunConfig cfg = parse_config(config_text);
              if (seed) cfg.seed = *seed;
              py::gil_scoped_release release;
              auto noise = make_noise(cfg);
              std::optional<RandomStream> rng;
              if (noise) rng.emplace(cfg.seed, 0);
              RunOptions opts = make_run_options(cfg);
              opts.record_increments = true;
              Trajectory tr = run(make_state(cfg, noise), opts, rng ? &*rng : nullptr);
              return action_eps(tr, tr.eps, tr.well);
          },
          py::arg("config_text"), py::arg("seed") = py::none());

    m.def("selfcheck",
          [](std::uint64_t seed) {
              std::vector<CheckResult> results;
              {
                  py::gil_scoped_release release;
                  results = selfcheck(seed);
              }
              py::list out;
              for (const auto& r : results) {
                  py::dict d;
                  d["name"] = r.name;
                  d["value"] = r.value;
                  d["threshold"] = r.threshold;
                  d["pass"] = r.pass;
                  out.append(d);
              }
              return out;
          },
          py::arg("seed") = 0);

    m.def("run_cli",
          [](const std::vector<std::string>& args) {
              std::ostringstream out, err;
              int code;
              {
                  py::gil_scoped_release release;
                  code = run_cli(args, out, err);
              }
              return py::make_tuple(code, out.str(), err.str());
          },
          py::arg("args"));
}
