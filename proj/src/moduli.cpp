#include "sacl/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

#include "sacl/energetics.hpp"
#include "sacl/error.hpp"

namespace sacl {

namespace {

double l1_distance(const TorusField& a, const TorusField& b) {
    TorusField d(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = std::abs(a[i] - b[i]);
    return integrate(d);
}

void fit_loglog(ModulusReport& r) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < r.deltas.size(); ++i) {
        if (!(r.values[i] > 0.0)) continue;
        double x = std::log(r.deltas[i]), y = std::log(r.values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2 || sxx * n - sx * sx == 0.0) return;
    r.alpha_hat = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.ell_hat = std::exp((sy - r.alpha_hat * sx) / n);
}

void check_monotone(ModulusReport& r) {
    std::vector<std::size_t> order(r.deltas.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return r.deltas[a] < r.deltas[b]; });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (r.values[order[i]] < r.values[order[i - 1]]) r.monotone = false;
}

double trapezoid(const std::vector<double>& f, std::size_t lo, std::size_t hi, double h) {
    if (hi <= lo) return 0.0;
    double s = 0.5 * (f[lo] + f[hi]);
    for (std::size_t i = lo + 1; i < hi; ++i) s += f[i];
    return s * h;
}

}  // namespace

double omega_inf(std::span<const double> times, std::span<const TorusField> fields, double delta) {
    if (times.size() != fields.size()) throw PreconditionError("omega_inf: times and fields differ in length");
    if (times.empty()) return 0.0;
    const double T = times.back() - times.front();
    if (!(delta > 0.0) || delta > T * (1.0 + 1e-12)) throw PreconditionError("omega_inf: delta must lie in (0, T]");
    const double slack = 1e-12 * std::max(T, 1.0);
    double m = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
        for (std::size_t j = i + 1; j < times.size() && times[j] - times[i] <= delta + slack; ++j)
            m = std::max(m, l1_distance(fields[i], fields[j]));
    return m;
}

double omega_inf(const Trajectory& traj, double delta) { return omega_inf(traj.times, traj.fields, delta); }

double omega_one(std::span<const double> z, double T, double delta) {
    if (z.size() < 2) throw PreconditionError("omega_one: need at least two samples");
    if (!(T > 0.0) || !(delta > 0.0) || delta > T * (1.0 + 1e-12)) throw PreconditionError("omega_one: delta must lie in (0, T]");
    const std::size_t M = z.size() - 1;
    const double h = T / static_cast<double>(M);
    const auto J = static_cast<std::size_t>(std::floor(delta / h + 1e-9));
    std::vector<double> a(z.size());
    for (std::size_t i = 0; i <= M; ++i) a[i] = std::abs(z[i]);
    std::vector<double> diff(z.size());
    double best = 0.0;
    for (std::size_t j = 1; j <= std::min(J, M); ++j) {
        double boundary = trapezoid(a, 0, j, h) + trapezoid(a, M - j, M, h);
        std::fill(diff.begin(), diff.end(), 0.0);
        for (std::size_t i = j; i <= M; ++i) diff[i] = std::abs(z[i] - z[i - j]);
        double shift = trapezoid(diff, j, M, h);
        best = std::max(best, boundary + shift);
    }
    return best;
}

ModulusReport omega_inf_report(const Trajectory& traj, std::span<const double> deltas) {
    ModulusReport r;
    for (double d : deltas) {
        r.deltas.push_back(d);
        r.values.push_back(omega_inf(traj, d));
    }
    check_monotone(r);
    fit_loglog(r);
    return r;
}

ModulusReport omega_one_report(std::span<const double> z, double T, std::span<const double> deltas) {
    ModulusReport r;
    for (double d : deltas) {
        r.deltas.push_back(d);
        r.values.push_back(omega_one(z, T, d));
    }
    check_monotone(r);
    fit_loglog(r);
    return r;
}

std::vector<double> dyadic_deltas(double T, double min_delta) {
    std::vector<double> out;
    for (double d = T; d >= min_delta * (1.0 - 1e-9); d *= 0.5) out.push_back(d);
    return out;
}

std::vector<TestFunction> trig_test_functions(const Grid& grid, std::size_t count) {
    const int d = grid.dim();
    // Each axis carries (frequency, use_sin); sin is only used for frequency > 0.
    using Axis = std::pair<int, bool>;
    std::vector<std::array<Axis, 3>> specs;
    for (int kmax = 0; specs.size() < count && kmax < grid.n() / 2; ++kmax) {
        std::vector<std::array<Axis, 3>> level;
        int per_axis = 2 * kmax + 1;
        int total = static_cast<int>(std::pow(per_axis, d));
        for (int flat = 0; flat < total; ++flat) {
            std::array<Axis, 3> s{Axis{0, false}, Axis{0, false}, Axis{0, false}};
            int rem = flat, top = 0;
            bool valid = true;
            for (int a = 0; a < d; ++a) {
                int code = rem % per_axis;
                rem /= per_axis;
                int k = code <= kmax ? code : code - kmax;
                bool use_sin = code > kmax;
                if (use_sin && k == 0) valid = false;
                s[a] = Axis{k, use_sin};
                top = std::max(top, k);
            }
            if (valid && top == kmax) level.push_back(s);
        }
        std::sort(level.begin(), level.end());
        for (auto& s : level) {
            if (specs.size() == count) break;
            specs.push_back(s);
        }
    }
    std::vector<TestFunction> out;
    for (const auto& s : specs) {
        TorusField phi = TorusField::from_function(grid, [&](const Point& x) {
            double v = 1.0;
            for (int a = 0; a < d; ++a) {
                double arg = 2.0 * std::numbers::pi * s[a].first * x[a];
                v *= s[a].second ? std::sin(arg) : std::cos(arg);
            }
            return v;
        });
        TorusField grad = gradient(phi);
        TorusField g2 = dot(grad, grad);
        double c1 = phi.max_abs() + std::sqrt(g2.max_abs());
        phi *= 1.0 / c1;
        std::ostringstream label;
        for (int a = 0; a < d; ++a) label << (a ? "." : "") << (s[a].second ? "sin" : "cos") << s[a].first;
        out.push_back(TestFunction{std::move(phi), 1.0, label.str()});
    }
    return out;
}

AdmissibilityReport admissibility_report(const Trajectory& traj, double eps, double lambda, const std::array<double, 3>& ell,
                                         std::span<const TestFunction> tests, double alpha2, double alpha3) {
    const int dim = traj.grid.dim();
    if (!(alpha2 > 0.0 && alpha2 < 0.5)) throw PreconditionError("admissibility_report: alpha2 must lie in (0, 1/2)");
    if (!(alpha3 > 0.0 && alpha3 < 0.5)) throw PreconditionError("admissibility_report: alpha3 must lie in (0, 1/2)");
    if (traj.times.size() < 2) throw PreconditionError("admissibility_report: need at least two samples");

    AdmissibilityReport rep;
    if (alpha2 >= 1.0 / (4.0 * dim)) {
        std::ostringstream os;
        os << "alpha2 = " << alpha2 << " lies outside (0, 1/(4d)) = (0, " << 1.0 / (4.0 * dim) << ")";
        rep.warnings.push_back(os.str());
    }

    // b) energy plus dissipation.
    double sup_f = 0.0, int_w = 0.0;
    if (!traj.series.empty()) {
        for (const SeriesRow& r : traj.series) sup_f = std::max(sup_f, r.free_energy);
        int_w = traj.series.back().cum_willmore;
    } else {
        for (std::size_t i = 0; i < traj.reports.size(); ++i) {
            sup_f = std::max(sup_f, traj.reports[i].free_energy);
            if (i > 0)
                int_w += 0.5 * (traj.times[i] - traj.times[i - 1]) * (traj.reports[i].willmore + traj.reports[i - 1].willmore);
        }
    }
    rep.sup_energy_plus_dissipation = sup_f + int_w;
    rep.b.worst_ratio = rep.sup_energy_plus_dissipation / ell[0];
    rep.b.pass = rep.sup_energy_plus_dissipation <= ell[0];

    // Uniformly spaced prefix of the samples.
    const double h = traj.times[1] - traj.times[0];
    std::size_t M = 1;
    while (M + 1 < traj.times.size() && std::abs((traj.times[M + 1] - traj.times[M]) - h) <= 1e-9 * h) ++M;
    if (M + 1 < traj.times.size()) rep.warnings.push_back("irregular final sample dropped from the moduli");
    const double T = traj.times[M] - traj.times[0];
    std::span<const double> times(traj.times.data(), M + 1);
    std::span<const TorusField> fields(traj.fields.data(), M + 1);
    rep.deltas = dyadic_deltas(T, h);

    // c) omega_inf.
    for (double delta : rep.deltas) {
        double v = omega_inf(times, fields, delta);
        double ratio = v / (ell[1] * std::pow(delta, alpha2));
        if (ratio > rep.c.worst_ratio) {
            rep.c.worst_ratio = ratio;
            rep.c.witness_delta = delta;
        }
    }
    rep.c.pass = rep.c.worst_ratio <= 1.0;

    // d) omega_one of the mass measure tested against phi_j.
    std::size_t J = tests.size();
    if (lambda > 0.0) {
        double cap = std::floor(1.0 / (eps * lambda));
        if (cap < static_cast<double>(J)) J = static_cast<std::size_t>(cap);
    }
    rep.test_functions_used = J;
    std::vector<TorusField> mu;
    for (std::size_t i = 0; i <= M; ++i) mu.push_back(energy_density(fields[i], eps, traj.well));
    for (std::size_t j = 0; j < J; ++j) {
        std::vector<double> z(M + 1);
        for (std::size_t i = 0; i <= M; ++i) z[i] = inner(tests[j].phi, mu[i]);
        for (double delta : rep.deltas) {
            double v = omega_one(z, T, delta);
            double ratio = v / (tests[j].c1_norm * ell[2] * std::pow(delta, alpha3));
            if (ratio > rep.d.worst_ratio) {
                rep.d.worst_ratio = ratio;
                rep.d.witness_delta = delta;
                rep.d.witness_index = static_cast<int>(j);
            }
        }
    }
    rep.d.pass = rep.d.worst_ratio <= 1.0;
    return rep;
}

}  // namespace sacl
