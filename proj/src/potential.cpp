#include "sacl/potential.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sacl/error.hpp"

namespace sacl {

namespace {

constexpr double kQuadTol = 1e-10;

double integrate_gk(const std::function<double(double)>& f, double a, double b, double tol) {
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 30, tol, &err);
    if (!std::isfinite(v) || err > std::max(tol, tol * std::abs(v)) * 10.0) {
        std::ostringstream os;
        os << "quadrature did not converge on [" << a << ", " << b << "], error estimate " << err;
        throw NumericError(os.str());
    }
    return v;
}

}  // namespace

DoubleWell quartic() {
    DoubleWell w;
    w.label = "quartic";
    w.value = [](double u) {
        double s = 1.0 - u * u;
        return 0.25 * s * s;
    };
    w.first = [](double u) { return u * u * u - u; };
    w.second = [](double u) { return 3.0 * u * u - 1.0; };
    w.growth_constant = 6.0;
    return w;
}

DoubleWell scaled(const DoubleWell& w, double c) {
    DoubleWell s;
    std::ostringstream os;
    os << w.label << "*" << c;
    s.label = os.str();
    s.value = [f = w.value, c](double u) { return c * f(u); };
    s.first = [f = w.first, c](double u) { return c * f(u); };
    s.second = [f = w.second, c](double u) { return c * f(u); };
    // |cW''| <= cC(sqrt(W)+1) <= max(c, sqrt c) C (sqrt(cW)+1)
    s.growth_constant = w.growth_constant * std::max({c, std::sqrt(c), 1.0});
    return s;
}

DoubleWell well_by_label(const std::string& label) {
    if (label == "quartic") return quartic();
    throw ParameterError("unknown double-well label '" + label + "'");
}

double max_curvature(const DoubleWell& w, double bound) {
    double m = 0.0;
    const int samples = 4001;
    for (int i = 0; i < samples; ++i) {
        double v = -bound + 2.0 * bound * i / (samples - 1);
        m = std::max(m, std::abs(w.second(v)));
    }
    return m;
}

bool AssumptionReport::all_pass() const noexcept {
    return std::all_of(items.begin(), items.end(), [](const AssumptionItem& it) { return it.pass; });
}

AssumptionReport check_assumptions(const DoubleWell& w, int sample_count) {
    if (sample_count < 100) throw PreconditionError("check_assumptions needs at least 100 samples");
    AssumptionReport r;
    const double C = w.growth_constant;

    auto& i1 = r.items[0];
    for (double pm : {-1.0, 1.0}) {
        if (std::abs(w.value(pm)) > 1e-14) {
            i1 = {false, pm, "W does not vanish at a pure phase"};
        } else if (!(w.second(pm) > 0.0) && i1.pass) {
            i1 = {false, pm, "W'' is not positive at a pure phase"};
        }
    }

    double worst[3] = {0.0, 0.0, 0.0};
    double where[3] = {0.0, 0.0, 0.0};
    for (int i = 0; i < sample_count; ++i) {
        double u = -3.0 + 6.0 * i / (sample_count - 1);
        double W = w.value(u);
        bool near_phase = std::min(std::abs(u - 1.0), std::abs(u + 1.0)) <= 1e-12;
        if (i1.pass) {
            if (W < 0.0) i1 = {false, u, "W is negative"};
            else if (!near_phase && W <= 0.0) i1 = {false, u, "W vanishes away from the pure phases"};
            else if (std::abs(u) >= 2.0 && !(w.second(u) > 0.0))
                i1 = {false, u, "W is not convex towards the ends of the sampled range"};
        }
        double ratios[3] = {
            std::abs(W) / (C * (std::pow(std::abs(u), 4) + 1.0)),
            std::abs(w.first(u)) / (C * (std::pow(std::abs(u), 3) + 1.0)),
            std::abs(w.second(u)) / (C * (std::sqrt(std::max(W, 0.0)) + 1.0)),
        };
        for (int k = 0; k < 3; ++k) {
            if (ratios[k] > worst[k]) {
                worst[k] = ratios[k];
                where[k] = u;
            }
        }
    }
    const char* names[3] = {"quartic growth of W", "cubic growth of W'", "W'' bounded by sqrt(W)"};
    for (int k = 0; k < 3; ++k) {
        auto& it = r.items[k + 1];
        it.witness = where[k];
        it.pass = worst[k] <= 1.0;
        std::ostringstream os;
        os << names[k] << ": worst ratio " << worst[k] << " at u = " << where[k];
        it.detail = os.str();
    }
    if (i1.pass) i1.detail = "non-negative, zeros exactly at +-1, convex at the ends";
    return r;
}

SurfaceTension surface_tension(const DoubleWell& w) {
    AssumptionReport rep = check_assumptions(w);
    if (!rep.items[0].pass)
        throw PreconditionError("surface_tension: " + rep.items[0].detail);
    double tau = integrate_gk([&](double s) { return std::sqrt(2.0 * std::max(w.value(s), 0.0)); },
                              -1.0, 1.0, kQuadTol);
    return {tau};
}

double optimal_profile(const DoubleWell& w, double eps, double x) {
    if (!(eps > 0.0)) throw PreconditionError("optimal_profile: eps must be positive");
    if (w.label == "quartic") return std::tanh(x / (eps * std::numbers::sqrt2));
    if (x == 0.0) return 0.0;

    // Invert x(u) = int_0^u eps / sqrt(2 W(v)) dv by bisection. The integrand
    // blows up at the wells, so the integral is split on the dyadic points
    // 1 - 2^-j: each piece stays a segment length away from the singularity,
    // where a single 61-point Kronrod rule is accurate to rounding. Adaptive
    // refinement is useless here because its error estimate has an absolute
    // floor far above the tiny pieces bisection produces.
    const double sign = x > 0.0 ? 1.0 : -1.0;
    auto integrand = [&](double v) { return eps / std::sqrt(2.0 * w.value(sign * v)); };
    auto position = [&](double u) {
        double total = 0.0, a = 0.0;
        for (int j = 1; a < u; ++j) {
            const double b = std::min(u, 1.0 - std::ldexp(1.0, -j));
            total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, a, b, 0);
            a = b;
        }
        return total;
    };
    const double target = std::abs(x);
    double lo = 0.0, hi = 0.5;
    for (int j = 2; position(hi) < target; ++j) {
        lo = hi;
        hi = 1.0 - std::ldexp(1.0, -j);
        if (j > 45) return sign * hi;
    }
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (position(mid) < target) lo = mid;
        else hi = mid;
    }
    return sign * 0.5 * (lo + hi);
}

}  // namespace sacl
