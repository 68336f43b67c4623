#include "sacl/geometry_rate.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "sacl/error.hpp"

namespace sacl {

namespace {

constexpr double kQuadTol = 1e-10;

double sphere_volume_constant(int d) { return d == 2 ? std::numbers::pi : 4.0 * std::numbers::pi / 3.0; }

}  // namespace

double mcf_sphere_radius(double r0, int d, double t) {
    if (!(r0 > 0.0)) throw PreconditionError("mcf_sphere_radius: r0 must be positive");
    if (d < 2 || d > 3) throw PreconditionError("mcf_sphere_radius: d must be 2 or 3");
    if (t < 0.0) throw PreconditionError("mcf_sphere_radius: t must be non-negative");
    const double t_ext = r0 * r0 / (2.0 * (d - 1));
    if (t >= t_ext) {
        std::ostringstream os;
        os << "sphere extinct at t = " << t_ext;
        throw ExtinctError(t_ext, os.str());
    }
    return std::sqrt(r0 * r0 - 2.0 * (d - 1) * t);
}

double sphere_area(int d, double r) {
    if (d == 2) return 2.0 * std::numbers::pi * r;
    if (d == 3) return 4.0 * std::numbers::pi * r * r;
    throw PreconditionError("sphere_area: d must be 2 or 3");
}

SpherePiece sampled_piece(double t0, double t1, std::vector<double> r, std::vector<double> rdot) {
    if (!(t1 > t0)) throw GeometryError("sampled piece: t_end must exceed t_start");
    if (r.size() < 2 || r.size() != rdot.size()) throw GeometryError("sampled piece: need >= 2 matching samples");
    struct Data {
        double t0, h;
        std::vector<double> r, rd;
        // Locates the interval and local coordinate s in [0, 1].
        std::pair<std::size_t, double> locate(double t) const {
            double x = (t - t0) / h;
            auto last = r.size() - 2;
            auto i = static_cast<std::size_t>(std::clamp(std::floor(x), 0.0, static_cast<double>(last)));
            return {i, x - static_cast<double>(i)};
        }
    };
    auto data = std::make_shared<Data>(Data{t0, (t1 - t0) / static_cast<double>(r.size() - 1), std::move(r), std::move(rdot)});
    SpherePiece p;
    p.t_start = t0;
    p.t_end = t1;
    p.r = [data](double t) {
        auto [i, s] = data->locate(t);
        double s2 = s * s, s3 = s2 * s;
        double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
        return h00 * data->r[i] + h10 * data->h * data->rd[i] + h01 * data->r[i + 1] + h11 * data->h * data->rd[i + 1];
    };
    p.rdot = [data](double t) {
        auto [i, s] = data->locate(t);
        double s2 = s * s;
        double d00 = 6 * s2 - 6 * s, d10 = 3 * s2 - 4 * s + 1, d01 = -6 * s2 + 6 * s, d11 = 3 * s2 - 2 * s;
        return (d00 * data->r[i] + d01 * data->r[i + 1]) / data->h + d10 * data->rd[i] + d11 * data->rd[i + 1];
    };
    return p;
}

SpherePiece mcf_piece(int d, double r0, double t0, double t1) {
    if (d < 2 || d > 3) throw PreconditionError("mcf_piece: d must be 2 or 3");
    SpherePiece p;
    p.t_start = t0;
    p.t_end = t1;
    p.r = [=](double t) { return std::sqrt(r0 * r0 - 2.0 * (d - 1) * (t - t0)); };
    p.rdot = [=](double t) { return -(d - 1) / std::sqrt(r0 * r0 - 2.0 * (d - 1) * (t - t0)); };
    return p;
}

void validate(const SpherePath& path) {
    if (path.d < 2 || path.d > 3) throw GeometryError("sphere path: d must be 2 or 3");
    if (!(path.tau > 0.0)) throw GeometryError("sphere path: tau must be positive");
    for (std::size_t i = 0; i < path.pieces.size(); ++i) {
        const SpherePiece& p = path.pieces[i];
        if (!(p.t_end > p.t_start)) throw GeometryError("sphere path: piece with empty time interval");
        if (!p.r || !p.rdot) throw GeometryError("sphere path: piece without radius function");
        if (i > 0 && p.t_start < path.pieces[i - 1].t_end) throw GeometryError("sphere path: pieces overlap or are not time-ordered");
        for (int k = 0; k <= 64; ++k) {
            double t = p.t_start + (p.t_end - p.t_start) * k / 64.0;
            if (!(p.r(t) > 0.0)) throw GeometryError("sphere path: radius must stay positive");
        }
    }
    for (const NucleationEvent& e : path.nucleations)
        if (!(e.r > 0.0)) throw GeometryError("sphere path: nucleation radius must be positive");
}

double i_ac_sphere(const SpherePath& path) {
    validate(path);
    using boost::math::quadrature::gauss_kronrod;
    const int d = path.d;
    double total = 0.0;
    for (const SpherePiece& p : path.pieces) {
        auto f = [&](double t) {
            double r = p.r(t);
            double v = p.rdot(t) + (d - 1) / r;
            return v * v * sphere_area(d, r);
        };
        double err = 0.0;
        total += gauss_kronrod<double, 61>::integrate(f, p.t_start, p.t_end, 15, kQuadTol, &err);
        if (!(err <= 1e-8 * std::max(1.0, std::abs(total))) || !std::isfinite(total))
            throw NumericError("i_ac_sphere: quadrature did not converge");
    }
    return 0.25 * path.tau * total;
}

double i_nucl_sphere(const SpherePath& path) {
    validate(path);
    double m = 0.0;
    for (const NucleationEvent& e : path.nucleations) m += path.tau * sphere_area(path.d, e.r);
    if (path.declared_initial_mass && !path.pieces.empty()) {
        const SpherePiece& first = path.pieces.front();
        double initial = path.tau * sphere_area(path.d, first.r(first.t_start));
        m += std::max(0.0, initial - *path.declared_initial_mass);
    }
    return m;
}

RateBreakdown rate_total_sphere(const SpherePath& path) {
    RateBreakdown b;
    b.i_ac = i_ac_sphere(path);
    b.i_nucl = i_nucl_sphere(path);
    b.total = b.i_ac + b.i_nucl;
    return b;
}

double action_eps(const Trajectory& traj, double eps, const DoubleWell& w) {
    if (!traj.increments_recorded) throw TrajectoryModeError("action_eps: trajectory was run without recorded increments");
    double total = 0.0;
    for (const RecordedStep& st : traj.steps) {
        TorusField det = deterministic_update(st.u, eps, w, st.dt, traj.stabilization, traj.dealias);
        det -= st.u;
        TorusField dev = st.increment - det;
        dev *= 1.0 / st.dt;
        total += st.dt * inner(dev, dev);
    }
    return 0.25 * eps * total;
}

double levelset_radius(const TorusField& u) {
    const Grid& g = u.grid();
    const int d = g.dim();
    if (d < 2) throw PreconditionError("levelset_radius: d must be 2 or 3");
    if (!u.is_scalar()) throw InvalidFieldError("levelset_radius: expected a scalar field");
    u.check_finite();
    const double h = g.spacing();
    double vol = 0.0;
    std::size_t positive = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const bool pos = u[i] > 0.0;
        if (pos) ++positive;
        MultiIndex idx = g.multi_index(i);
        bool boundary = false;
        double slope = 0.0;
        for (int a = 0; a < d; ++a) {
            MultiIndex lo = idx, hi = idx;
            --lo[a];
            ++hi[a];
            double ul = u[g.flat(lo)], uh = u[g.flat(hi)];
            if ((ul > 0.0) != pos || (uh > 0.0) != pos) boundary = true;
            slope = std::max(slope, std::abs(uh - ul) / (2.0 * h));
        }
        double f = pos ? 1.0 : 0.0;
        // Fraction of the cell on the positive side of a locally planar interface.
        if (boundary && slope > 0.0) f = std::clamp(0.5 + u[i] / (h * slope), 0.0, 1.0);
        vol += f;
    }
    if (positive == 0 || positive == g.size()) throw DegenerateSetError("levelset_radius: {u > 0} is empty or the whole torus");
    vol *= g.cell_volume();
    return std::pow(vol / sphere_volume_constant(d), 1.0 / d);
}

}  // namespace sacl
