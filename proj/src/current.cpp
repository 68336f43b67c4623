#include "sacl/current.hpp"

#include <cmath>
#include <numbers>

#include "sacl/error.hpp"

namespace sacl {

namespace {

void require_increments(const Trajectory& traj, const char* what) {
    if (!traj.increments_recorded)
        throw TrajectoryModeError(std::string(what) + ": trajectory was run without recorded increments");
}

double horizon(const Trajectory& traj) {
    if (traj.steps.empty()) return 0.0;
    return traj.steps.back().t + traj.steps.back().dt - traj.steps.front().t;
}

struct StepGeometry {
    TorusField grad;
    TorusField normal;
};

StepGeometry geometry(const TorusField& u) {
    TorusField grad = gradient(u);
    TorusField n = unit_normals(grad);
    return {std::move(grad), std::move(n)};
}

// h = c(t) d_m u e^{2 pi i k.x} e^{i q.n} / (2 pi)^{d/2}, returned as (Re h, Im h).
std::pair<TorusField, TorusField> frame_integrand(const StepGeometry& geo, double time_factor, int m,
                                                  const MultiIndex& k, const std::array<double, 3>& q) {
    const Grid& g = geo.grad.grid();
    const int d = g.dim();
    const double norm = time_factor / std::pow(2.0 * std::numbers::pi, 0.5 * d);
    TorusField re(g), im(g);
    auto dm = geo.grad.component(m);
    for (std::size_t i = 0; i < g.size(); ++i) {
        Point x = g.point(i);
        double phase = 0.0;
        for (int a = 0; a < d; ++a) phase += 2.0 * std::numbers::pi * k[a] * x[a] + q[a] * geo.normal.component(a)[i];
        re[i] = norm * dm[i] * std::cos(phase);
        im[i] = norm * dm[i] * std::sin(phase);
    }
    return {std::move(re), std::move(im)};
}

double time_factor(int n, double t, double T) {
    return (n == 0 ? 1.0 : 2.0) / std::sqrt(T) * std::cos(n * std::numbers::pi * t / T);
}

std::complex<double> coefficient_only(const Trajectory& traj, const std::vector<StepGeometry>& geos, int m, int n,
                                      const MultiIndex& k, const std::array<double, 3>& q, double amp) {
    const double T = horizon(traj);
    const double t0 = traj.steps.front().t;
    std::complex<double> z = 0.0;
    for (std::size_t s = 0; s < traj.steps.size(); ++s) {
        const RecordedStep& st = traj.steps[s];
        if (!st.noise) continue;
        auto [re, im] = frame_integrand(geos[s], time_factor(n, st.t - t0, T), m, k, q);
        z += amp * std::complex<double>(inner(re, *st.noise), inner(im, *st.noise));
    }
    return z;
}

}  // namespace

TorusField PlaneField::project(const TorusField& v) const {
    const Grid& g = normal.grid();
    if (!(v.grid() == g) || v.components() != g.dim()) throw GridMismatchError("PlaneField::project: shape mismatch");
    TorusField out = v;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double nv = 0.0;
        for (int a = 0; a < g.dim(); ++a) nv += normal.component(a)[i] * v.component(a)[i];
        for (int a = 0; a < g.dim(); ++a) out.component(a)[i] -= nv * normal.component(a)[i];
    }
    return out;
}

double current_eval(const Trajectory& traj, const CurrentTestField& f, double eps) {
    require_increments(traj, "current_eval");
    double j = 0.0;
    for (const RecordedStep& st : traj.steps) {
        StepGeometry geo = geometry(st.u);
        TorusField fv = f(st.t, PlaneField{geo.normal});
        j -= eps * inner(dot(geo.grad, fv), st.increment);
    }
    return j;
}

double current_scale(const Trajectory& traj, const CurrentTestField& f, double eps) {
    require_increments(traj, "current_scale");
    double s = 0.0;
    for (const RecordedStep& st : traj.steps) {
        StepGeometry geo = geometry(st.u);
        TorusField fv = f(st.t, PlaneField{geo.normal});
        TorusField g2 = dot(geo.grad, geo.grad);
        TorusField f2 = dot(fv, fv);
        TorusField a(traj.grid);
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::sqrt(g2[i] * f2[i]) * std::abs(st.increment[i]);
        s += eps * integrate(a);
    }
    return s;
}

CurrentCoefficient current_coefficients(const Trajectory& traj, int m, int n, const MultiIndex& k,
                                        const std::array<double, 3>& q, double eps, double lambda) {
    require_increments(traj, "current_coefficients");
    if (m < 0 || m >= traj.grid.dim()) throw ParameterError("current_coefficients: component index out of range");
    if (n < 0) throw ParameterError("current_coefficients: time mode must be non-negative");
    CurrentCoefficient c{0.0, 0.0};
    if (traj.steps.empty() || lambda == 0.0) return c;
    const double T = horizon(traj);
    const double t0 = traj.steps.front().t;
    const double amp = std::sqrt(2.0 * eps * lambda);
    for (const RecordedStep& st : traj.steps) {
        if (!st.noise) continue;
        StepGeometry geo = geometry(st.u);
        auto [re, im] = frame_integrand(geo, time_factor(n, st.t - t0, T), m, k, q);
        c.z += amp * std::complex<double>(inner(re, *st.noise), inner(im, *st.noise));
        if (traj.noise) {
            TorusField jre = convolve(re, traj.noise->kernel_hat);
            TorusField jim = convolve(im, traj.noise->kernel_hat);
            c.qv += 2.0 * eps * lambda * st.dt * (inner(jre, jre) + inner(jim, jim));
        }
    }
    return c;
}

SobolevBound current_sobolev_bound(const Trajectory& traj, const SobolevTruncation& trunc,
                                   const std::array<double, 3>& s, double eps, double lambda, double C) {
    const int d = traj.grid.dim();
    if (!(s[0] > 0.5 && s[0] < 1.0) || !(s[1] > 0.5 * d) || !(s[2] > 0.5 * (d - 1)))
        throw ParameterError("current_sobolev_bound: s must lie in (1/2,1) x (d/2,inf) x ((d-1)/2,inf)");
    if (trunc.n_max < 0 || trunc.k_max < 0 || trunc.q_points < 1 || !(trunc.q_radius > 0.0))
        throw ParameterError("current_sobolev_bound: empty truncation");
    if (traj.series.empty()) throw TrajectoryModeError("current_sobolev_bound: trajectory has no diagnostics");

    SobolevBound b;
    for (std::size_t r = 1; r < traj.series.size(); ++r) {
        const SeriesRow& a = traj.series[r - 1];
        const SeriesRow& z = traj.series[r];
        b.c1_grad += 0.5 * (z.t - a.t) * (a.grad_sq + z.grad_sq);
        b.c1_willmore += 0.5 * (z.t - a.t) * (a.willmore + z.willmore);
    }
    b.c1 = b.c1_grad * b.c1_willmore;

    // Uniform cell-centred q grid restricted to the ball.
    const double hq = 2.0 * trunc.q_radius / trunc.q_points;
    std::vector<std::array<double, 3>> qs;
    std::array<int, 3> qi{0, 0, 0};
    const int qn = trunc.q_points;
    const int qtotal = static_cast<int>(std::pow(qn, d));
    for (int flat = 0; flat < qtotal; ++flat) {
        int rem = flat;
        std::array<double, 3> q{0.0, 0.0, 0.0};
        double q2 = 0.0;
        for (int a = 0; a < d; ++a) {
            qi[a] = rem % qn;
            rem /= qn;
            q[a] = -trunc.q_radius + (qi[a] + 0.5) * hq;
            q2 += q[a] * q[a];
        }
        if (q2 <= trunc.q_radius * trunc.q_radius) qs.push_back(q);
    }
    if (qs.empty()) throw ParameterError("current_sobolev_bound: empty truncation");
    const double cell = std::pow(hq, d);

    std::vector<MultiIndex> ks;
    const int kw = 2 * trunc.k_max + 1;
    const int ktotal = static_cast<int>(std::pow(kw, d));
    for (int flat = 0; flat < ktotal; ++flat) {
        int rem = flat;
        MultiIndex k{0, 0, 0};
        for (int a = 0; a < d; ++a) {
            k[a] = rem % kw - trunc.k_max;
            rem /= kw;
        }
        ks.push_back(k);
    }

    if (lambda != 0.0) require_increments(traj, "current_sobolev_bound");
    const bool have_noise = !traj.steps.empty() && lambda != 0.0;
    std::vector<StepGeometry> geos;
    if (have_noise)
        for (const RecordedStep& st : traj.steps) geos.push_back(geometry(st.u));
    const double amp = std::sqrt(2.0 * eps * lambda);

    for (int m = 0; m < d; ++m)
        for (int n = 0; n <= trunc.n_max; ++n)
            for (const MultiIndex& k : ks)
                for (const auto& q : qs) {
                    ++b.terms;
                    if (!have_noise) continue;
                    double k2 = 0.0, q2 = 0.0;
                    for (int a = 0; a < d; ++a) {
                        k2 += static_cast<double>(k[a]) * k[a];
                        q2 += q[a] * q[a];
                    }
                    double w = std::pow(1.0 + n * n, -s[0]) * std::pow(1.0 + k2, -s[1]) *
                               std::pow(1.0 + q2, -s[2] - 0.5);
                    b.c2 += cell * w * std::norm(coefficient_only(traj, geos, m, n, k, q, amp));
                }
    b.bound = C * (b.c1 + b.c2);
    return b;
}

}  // namespace sacl
