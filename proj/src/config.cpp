#include "sacl/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <span>
#include <sstream>

#include "sacl/error.hpp"
#include "sacl/snapshot.hpp"

namespace sacl {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    auto s = trim(v);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty() || !std::isfinite(x))
        throw ConfigError(key, key + ": expected a finite number, got '" + v + "'");
    return x;
}

long long to_integer(const std::string& key, const std::string& v) {
    long long x = 0;
    auto s = trim(v);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw ConfigError(key, key + ": expected an integer, got '" + v + "'");
    return x;
}

std::size_t to_count(const std::string& key, const std::string& v) {
    long long x = to_integer(key, v);
    if (x < 0) throw ConfigError(key, key + ": expected a non-negative integer");
    return static_cast<std::size_t>(x);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t x = 0;
    auto s = trim(v);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw ConfigError(key, key + ": expected an unsigned 64-bit integer, got '" + v + "'");
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    auto s = trim(v);
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw ConfigError(key, key + ": expected a boolean, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::string s = v;
    for (char& c : s)
        if (c == ',') c = ' ';
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string tok; is >> tok;) out.push_back(tok);
    return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& t : split_list(v)) out.push_back(to_double(key, t));
    return out;
}

std::vector<int> to_ints(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const auto& t : split_list(v)) out.push_back(static_cast<int>(to_integer(key, t)));
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, std::map<std::string, Setter>>& schema() {
    static const std::map<std::string, std::map<std::string, Setter>> s = {
        {"grid",
         {{"d", [](RunConfig& c, auto& k, auto& v) { c.d = static_cast<int>(to_integer(k, v)); }},
          {"n", [](RunConfig& c, auto& k, auto& v) { c.n = static_cast<int>(to_integer(k, v)); }}}},
        {"model",
         {{"well", [](RunConfig& c, auto&, auto& v) { c.well = trim(v); }},
          {"eps", [](RunConfig& c, auto& k, auto& v) { c.eps = to_double(k, v); }},
          {"dealias", [](RunConfig& c, auto& k, auto& v) { c.dealias = to_bool(k, v); }}}},
        {"noise",
         {{"enabled", [](RunConfig& c, auto& k, auto& v) { c.noise_enabled = to_bool(k, v); }},
          {"beta", [](RunConfig& c, auto& k, auto& v) { c.beta = to_double(k, v); }},
          {"kappa", [](RunConfig& c, auto& k, auto& v) { c.kappa = to_double(k, v); }}}},
        {"time",
         {{"dt",
           [](RunConfig& c, auto& k, auto& v) {
               c.dt_auto = trim(v) == "auto";
               c.dt = c.dt_auto ? 0.0 : to_double(k, v);
           }},
          {"T", [](RunConfig& c, auto& k, auto& v) { c.T = to_double(k, v); }},
          {"stabilization", [](RunConfig& c, auto& k, auto& v) { c.stabilization = to_double(k, v); }},
          {"sample_every", [](RunConfig& c, auto& k, auto& v) { c.sample_every = to_count(k, v); }},
          {"diagnostics_every", [](RunConfig& c, auto& k, auto& v) { c.diagnostics_every = to_count(k, v); }},
          {"record_increments", [](RunConfig& c, auto& k, auto& v) { c.record_increments = to_bool(k, v); }}}},
        {"initial",
         {{"kind", [](RunConfig& c, auto&, auto& v) { c.initial.kind = trim(v); }},
          {"center",
           [](RunConfig& c, auto& k, auto& v) {
               auto xs = to_doubles(k, v);
               if (xs.empty() || xs.size() > 3) throw ConfigError(k, k + ": expected 1 to 3 coordinates");
               c.initial.center = {0.5, 0.5, 0.5};
               for (std::size_t i = 0; i < xs.size(); ++i) c.initial.center[i] = xs[i];
           }},
          {"r0", [](RunConfig& c, auto& k, auto& v) { c.initial.r0 = to_double(k, v); }},
          {"value", [](RunConfig& c, auto& k, auto& v) { c.initial.value = to_double(k, v); }},
          {"amplitude", [](RunConfig& c, auto& k, auto& v) { c.initial.amplitude = to_double(k, v); }},
          {"mode", [](RunConfig& c, auto& k, auto& v) { c.initial.mode = static_cast<int>(to_integer(k, v)); }},
          {"path", [](RunConfig& c, auto&, auto& v) { c.initial.path = trim(v); }}}},
        {"tilt",
         {{"enabled", [](RunConfig& c, auto& k, auto& v) { c.tilt.enabled = to_bool(k, v); }},
          {"strength",
           [](RunConfig& c, auto& k, auto& v) {
               c.tilt.strength_auto = trim(v) == "auto";
               c.tilt.strength = c.tilt.strength_auto ? 0.0 : to_double(k, v);
           }},
          {"psi_amplitude", [](RunConfig& c, auto& k, auto& v) { c.tilt.psi_amplitude = to_double(k, v); }},
          {"eta_amplitude", [](RunConfig& c, auto& k, auto& v) { c.tilt.eta_amplitude = to_double(k, v); }},
          {"eta_mode", [](RunConfig& c, auto& k, auto& v) { c.tilt.eta_mode = static_cast<int>(to_integer(k, v)); }},
          {"eta_axis", [](RunConfig& c, auto& k, auto& v) { c.tilt.eta_axis = static_cast<int>(to_integer(k, v)); }}}},
        {"ensemble",
         {{"samples", [](RunConfig& c, auto& k, auto& v) { c.samples = to_count(k, v); }},
          {"seed", [](RunConfig& c, auto& k, auto& v) { c.seed = to_u64(k, v); }}}},
        {"output", {{"dir", [](RunConfig& c, auto&, auto& v) { c.output_dir = trim(v); }}}},
        {"rare_event",
         {{"mode", [](RunConfig& c, auto&, auto& v) { c.rare_event.mode = trim(v); }},
          {"observable", [](RunConfig& c, auto&, auto& v) { c.rare_event.observable = trim(v); }},
          {"threshold", [](RunConfig& c, auto& k, auto& v) { c.rare_event.threshold = to_double(k, v); }},
          {"direct_samples", [](RunConfig& c, auto& k, auto& v) { c.rare_event.direct_samples = to_count(k, v); }},
          {"tilted_samples", [](RunConfig& c, auto& k, auto& v) { c.rare_event.tilted_samples = to_count(k, v); }},
          {"ells", [](RunConfig& c, auto& k, auto& v) { c.rare_event.ells = to_doubles(k, v); }}}},
        {"mcf_study",
         {{"eps_list", [](RunConfig& c, auto& k, auto& v) { c.mcf_study.eps_list = to_doubles(k, v); }},
          {"n_list", [](RunConfig& c, auto& k, auto& v) { c.mcf_study.n_list = to_ints(k, v); }},
          {"r0", [](RunConfig& c, auto& k, auto& v) { c.mcf_study.r0 = to_double(k, v); }},
          {"T", [](RunConfig& c, auto& k, auto& v) { c.mcf_study.T = to_double(k, v); }},
          {"sample_dt", [](RunConfig& c, auto& k, auto& v) { c.mcf_study.sample_dt = to_double(k, v); }}}},
        {"moduli",
         {{"ell1",
           [](RunConfig& c, auto& k, auto& v) {
               c.moduli.ell1_auto = trim(v) == "auto";
               c.moduli.ell1 = c.moduli.ell1_auto ? 0.0 : to_double(k, v);
           }},
          {"ell2", [](RunConfig& c, auto& k, auto& v) { c.moduli.ell2 = to_double(k, v); }},
          {"ell3", [](RunConfig& c, auto& k, auto& v) { c.moduli.ell3 = to_double(k, v); }},
          {"alpha2", [](RunConfig& c, auto& k, auto& v) { c.moduli.alpha2 = to_double(k, v); }},
          {"alpha3", [](RunConfig& c, auto& k, auto& v) { c.moduli.alpha3 = to_double(k, v); }},
          {"test_functions", [](RunConfig& c, auto& k, auto& v) { c.moduli.test_functions = to_count(k, v); }}}},
        {"rate", {{"sphere_path", [](RunConfig& c, auto&, auto& v) { c.rate.sphere_path = trim(v); }}}},
        {"diagnose",
         {{"input", [](RunConfig& c, auto&, auto& v) { c.diagnose.input = trim(v); }},
          {"increments", [](RunConfig& c, auto&, auto& v) { c.diagnose.increments = trim(v); }}}},
    };
    return s;
}

bool power_of_two(int n) { return n >= 8 && (n & (n - 1)) == 0; }

void require(bool ok, const std::string& key, const std::string& msg) {
    if (!ok) throw ConfigError(key, key + ": " + msg);
}

void validate(RunConfig& c) {
    require(c.d >= 1 && c.d <= 3, "grid.d", "must be 1, 2 or 3");
    require(power_of_two(c.n), "grid.n", "must be a power of two >= 8");
    try {
        (void)well_by_label(c.well);
    } catch (const Error&) {
        throw ConfigError("model.well", "model.well: unknown well '" + c.well + "'");
    }
    require(c.eps > 0.0, "model.eps", "must be positive");
    require(c.beta > 0.0 && c.beta <= 1.0, "noise.beta", "must lie in (0, 1]");
    require(c.kappa >= 0.0, "noise.kappa", "must be non-negative");
    require(c.T > 0.0, "time.T", "must be positive");
    require(c.stabilization >= 0.0, "time.stabilization", "must be non-negative");
    require(c.sample_every >= 1, "time.sample_every", "must be at least 1");

    const DoubleWell w = well_by_label(c.well);
    const double guard = stable_dt(c.eps, w);
    if (c.dt_auto) {
        c.dt = guard;
    } else {
        require(c.dt > 0.0, "time.dt", "must be positive or 'auto'");
        if (c.stabilization == 0.0 && c.dt > guard * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "exceeds the stability guard eps^2/(2 max|W''|) = " << guard;
            throw ConfigError("time.dt", "time.dt: " + os.str());
        }
    }

    if (c.noise_enabled) {
        // Surfaces UnderResolvedKernelError before any compute.
        (void)build_noise(Grid(c.d, c.n), c.eps, c.beta, c.kappa);
    }

    const auto& k = c.initial.kind;
    require(k == "sphere" || k == "constant" || k == "sine" || k == "snapshot", "initial.kind",
            "must be sphere, constant, sine or snapshot");
    if (k == "sphere")
        require(c.initial.r0 > 2.0 * c.eps && c.initial.r0 < 0.5 - 2.0 * c.eps, "initial.r0",
                "must satisfy 2 eps < r0 < 1/2 - 2 eps");
    if (k == "constant") require(std::abs(c.initial.value) <= 2.0, "initial.value", "must lie in [-2, 2]");
    if (k == "sine") {
        require(std::abs(c.initial.amplitude) <= 2.0, "initial.amplitude", "must lie in [-2, 2]");
        require(c.initial.mode >= 0 && c.initial.mode < c.n / 2, "initial.mode", "must be a resolved mode");
    }
    if (k == "snapshot") require(!c.initial.path.empty(), "initial.path", "required for kind = snapshot");

    if (c.tilt.enabled) {
        require(c.noise_enabled, "tilt.enabled", "a tilt needs noise.enabled = true");
        require(c.tilt.eta_axis >= 0 && c.tilt.eta_axis < c.d, "tilt.eta_axis", "must be a spatial axis");
        require(c.tilt.eta_mode >= 0 && c.tilt.eta_mode < c.n / 2, "tilt.eta_mode", "must be a resolved mode");
    }
    require(c.samples >= 1, "ensemble.samples", "must be at least 1");
    require(!c.output_dir.empty(), "output.dir", "must not be empty");

    const auto& r = c.rare_event;
    require(r.mode == "estimate" || r.mode == "tail_scan" || r.mode == "both", "rare_event.mode",
            "must be estimate, tail_scan or both");
    require(r.observable == "sup_free_energy" || r.observable == "energy_dissipation", "rare_event.observable",
            "must be sup_free_energy or energy_dissipation");
    for (std::size_t i = 1; i < r.ells.size(); ++i)
        require(r.ells[i] > r.ells[i - 1], "rare_event.ells", "must increase");

    const auto& m = c.mcf_study;
    require(!m.eps_list.empty() && m.eps_list.size() == m.n_list.size(), "mcf_study.n_list",
            "must have one grid size per entry of mcf_study.eps_list");
    for (int n : m.n_list) require(power_of_two(n), "mcf_study.n_list", "entries must be powers of two >= 8");
    for (double e : m.eps_list) require(e > 0.0, "mcf_study.eps_list", "entries must be positive");
    require(m.T > 0.0, "mcf_study.T", "must be positive");
    require(m.sample_dt > 0.0 && m.sample_dt <= m.T, "mcf_study.sample_dt", "must lie in (0, T]");
    require(m.r0 > 0.0 && m.r0 < 0.5, "mcf_study.r0", "must lie in (0, 1/2)");

    require(c.moduli.alpha2 > 0.0 && c.moduli.alpha2 < 0.5, "moduli.alpha2", "must lie in (0, 1/2)");
    require(c.moduli.alpha3 > 0.0 && c.moduli.alpha3 < 0.5, "moduli.alpha3", "must lie in (0, 1/2)");
    require(c.moduli.ell1_auto || c.moduli.ell1 > 0.0, "moduli.ell1", "must be positive or 'auto'");
    require(c.moduli.ell2 > 0.0, "moduli.ell2", "must be positive");
    require(c.moduli.ell3 > 0.0, "moduli.ell3", "must be positive");
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ' ';
        if constexpr (std::is_same_v<T, double>)
            s += num(xs[i]);
        else
            s += std::to_string(xs[i]);
    }
    return s;
}

const char* yn(bool b) { return b ? "true" : "false"; }

}  // namespace

RunConfig parse_config(const std::string& text) {
    // The INI reader only knows ';' comments.
    std::istringstream lines(text);
    std::string cleaned;
    for (std::string line; std::getline(lines, line);) {
        auto t = trim(line);
        if (!t.empty() && t[0] == '#') continue;
        cleaned += line + '\n';
    }
    boost::property_tree::ptree tree;
    try {
        std::istringstream is(cleaned);
        boost::property_tree::ini_parser::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("", std::string("config syntax error: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    RunConfig cfg;
    const auto& sch = schema();
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError(section, "unknown key '" + section + "' outside any section");
        auto sit = sch.find(section);
        if (sit == sch.end()) throw ConfigError(section, "unknown section [" + section + "]");
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            auto kit = sit->second.find(key);
            if (kit == sit->second.end()) throw ConfigError(full, "unknown key " + full);
            kit->second(cfg, full, value.get_value<std::string>());
        }
    }
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_echo(const RunConfig& c) {
    std::ostringstream os;
    os << "[grid]\nd = " << c.d << "\nn = " << c.n << "\n\n";
    os << "[model]\nwell = " << c.well << "\neps = " << num(c.eps) << "\ndealias = " << yn(c.dealias) << "\n\n";
    os << "[noise]\nenabled = " << yn(c.noise_enabled) << "\nbeta = " << num(c.beta) << "\nkappa = " << num(c.kappa)
       << "\n\n";
    os << "[time]\ndt = " << (c.dt_auto ? std::string("auto") : num(c.dt)) << "\nT = " << num(c.T)
       << "\nstabilization = " << num(c.stabilization) << "\nsample_every = " << c.sample_every
       << "\ndiagnostics_every = " << c.diagnostics_every << "\nrecord_increments = " << yn(c.record_increments)
       << "\n\n";
    os << "[initial]\nkind = " << c.initial.kind << "\ncenter = " << num(c.initial.center[0]) << ' '
       << num(c.initial.center[1]) << ' ' << num(c.initial.center[2]) << "\nr0 = " << num(c.initial.r0)
       << "\nvalue = " << num(c.initial.value) << "\namplitude = " << num(c.initial.amplitude)
       << "\nmode = " << c.initial.mode << "\npath = " << c.initial.path << "\n\n";
    os << "[tilt]\nenabled = " << yn(c.tilt.enabled)
       << "\nstrength = " << (c.tilt.strength_auto ? std::string("auto") : num(c.tilt.strength))
       << "\npsi_amplitude = " << num(c.tilt.psi_amplitude) << "\neta_amplitude = " << num(c.tilt.eta_amplitude)
       << "\neta_mode = " << c.tilt.eta_mode << "\neta_axis = " << c.tilt.eta_axis << "\n\n";
    os << "[ensemble]\nsamples = " << c.samples << "\nseed = " << c.seed << "\n\n";
    os << "[output]\ndir = " << c.output_dir << "\n\n";
    os << "[rare_event]\nmode = " << c.rare_event.mode << "\nobservable = " << c.rare_event.observable
       << "\nthreshold = " << num(c.rare_event.threshold) << "\ndirect_samples = " << c.rare_event.direct_samples
       << "\ntilted_samples = " << c.rare_event.tilted_samples << "\nells = " << join(c.rare_event.ells) << "\n\n";
    os << "[mcf_study]\neps_list = " << join(c.mcf_study.eps_list) << "\nn_list = " << join(c.mcf_study.n_list)
       << "\nr0 = " << num(c.mcf_study.r0) << "\nT = " << num(c.mcf_study.T)
       << "\nsample_dt = " << num(c.mcf_study.sample_dt) << "\n\n";
    os << "[moduli]\nell1 = " << (c.moduli.ell1_auto ? std::string("auto") : num(c.moduli.ell1))
       << "\nell2 = " << num(c.moduli.ell2) << "\nell3 = " << num(c.moduli.ell3)
       << "\nalpha2 = " << num(c.moduli.alpha2) << "\nalpha3 = " << num(c.moduli.alpha3)
       << "\ntest_functions = " << c.moduli.test_functions << "\n\n";
    os << "[rate]\nsphere_path = " << c.rate.sphere_path << "\n\n";
    os << "[diagnose]\ninput = " << c.diagnose.input << "\nincrements = " << c.diagnose.increments << "\n";
    return os.str();
}

Grid make_grid(const RunConfig& cfg) { return Grid(cfg.d, cfg.n); }

std::shared_ptr<const NoiseModel> make_noise(const RunConfig& cfg) {
    if (!cfg.noise_enabled) return nullptr;
    return std::make_shared<const NoiseModel>(build_noise(make_grid(cfg), cfg.eps, cfg.beta, cfg.kappa));
}

TorusField make_initial(const RunConfig& cfg) {
    const Grid g = make_grid(cfg);
    const DoubleWell w = well_by_label(cfg.well);
    const auto& in = cfg.initial;
    if (in.kind == "sphere") return initial_sphere(g, cfg.eps, w, in.center, in.r0);
    if (in.kind == "constant") return TorusField::constant(g, in.value);
    if (in.kind == "sine") {
        return TorusField::from_function(g, [&](const Point& x) {
            double v = in.amplitude;
            for (int a = 0; a < g.dim(); ++a) v *= std::sin(2.0 * std::numbers::pi * in.mode * x[a]);
            return v;
        });
    }
    Snapshot s = read_snapshot(in.path, g.dim());
    if (!(s.field.grid() == g)) throw ConfigError("initial.path", "initial.path: snapshot grid differs from [grid]");
    return s.field;
}

SolverState make_state(const RunConfig& cfg, std::shared_ptr<const NoiseModel> noise) {
    SolverState s{make_initial(cfg), 0.0, cfg.eps, well_by_label(cfg.well), std::move(noise), cfg.dt,
                  cfg.stabilization, cfg.dealias};
    return s;
}

RunOptions make_run_options(const RunConfig& cfg) {
    RunOptions o;
    o.T = cfg.T;
    o.sample_every = cfg.sample_every;
    o.diagnostics_every = cfg.diagnostics_every;
    o.record_increments = cfg.record_increments;
    return o;
}

std::unique_ptr<TiltSpec> make_tilt(const RunConfig& cfg) {
    if (!cfg.tilt.enabled) return nullptr;
    auto tilt = std::make_unique<TiltSpec>();
    const Grid g = make_grid(cfg);
    const double lambda = noise_strength(cfg.eps, cfg.beta, cfg.d, cfg.kappa);
    tilt->strength = cfg.tilt.strength_auto ? default_tilt_strength(cfg.eps, lambda) : cfg.tilt.strength;
    const TiltConfig tc = cfg.tilt;
    const double T = cfg.T;
    if (tc.psi_amplitude != 0.0) {
        tilt->psi = [g, tc, T](double t) { return TorusField::constant(g, tc.psi_amplitude * std::max(0.0, 1.0 - t / T)); };
    }
    if (tc.eta_amplitude != 0.0) {
        TorusField eta = TorusField::vector_from_function(g, [tc](const Point& x, std::span<double> out) {
            out[tc.eta_axis] = tc.eta_amplitude * std::sin(2.0 * std::numbers::pi * tc.eta_mode * x[tc.eta_axis]);
        });
        tilt->eta = [eta](double) { return eta; };
    }
    return tilt;
}

EnsembleSetup make_ensemble(const RunConfig& cfg, unsigned threads) {
    auto noise = make_noise(cfg);
    auto u0 = std::make_shared<const TorusField>(make_initial(cfg));
    const DoubleWell w = well_by_label(cfg.well);
    EnsembleSetup e;
    e.initial = [cfg, noise, u0, w] {
        return SolverState{*u0, 0.0, cfg.eps, w, noise, cfg.dt, cfg.stabilization, cfg.dealias};
    };
    e.options = make_run_options(cfg);
    e.seed = cfg.seed;
    e.threads = threads;
    return e;
}

}  // namespace sacl
