#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sacl/integrator.hpp"
#include "sacl/potential.hpp"
#include "sacl/torus_field.hpp"

namespace sacl {

/// sqrt(r0^2 - 2(d-1)t); ExtinctError at or past r0^2 / (2(d-1)).
double mcf_sphere_radius(double r0, int d, double t);

/// Area (d = 2) or surface (d = 3) of a sphere of radius r: 2 pi r, 4 pi r^2.
double sphere_area(int d, double r);

struct SpherePiece {
    double t_start = 0.0;
    double t_end = 0.0;
    std::function<double(double)> r;
    std::function<double(double)> rdot;
};

/// Cubic Hermite interpolant through uniform samples of r and r' on [t0, t1].
SpherePiece sampled_piece(double t0, double t1, std::vector<double> r, std::vector<double> rdot);
/// Exact mean-curvature-flow piece starting from radius r0 at t0.
SpherePiece mcf_piece(int d, double r0, double t0, double t1);

struct NucleationEvent {
    double t = 0.0;
    double r = 0.0;
};

struct SpherePath {
    int d = 2;
    std::vector<SpherePiece> pieces;
    std::vector<NucleationEvent> nucleations;
    double tau = 0.0;
    /// Declared initial mass; any positive excess of the path's initial mass
    /// over it is charged as nucleation.
    std::optional<double> declared_initial_mass;
};

/// Throws GeometryError on overlapping pieces, r <= 0 or a bad dimension.
void validate(const SpherePath& path);

struct RateBreakdown {
    double i_ac = 0.0;
    double i_nucl = 0.0;
    double total = 0.0;
};

/// 1/4 tau sum int (r' + (d-1)/r)^2 A_d(r) dt, adaptive quadrature tol 1e-10.
double i_ac_sphere(const SpherePath& path);
double i_nucl_sphere(const SpherePath& path);
RateBreakdown rate_total_sphere(const SpherePath& path);

/// (eps/4) sum_m dt integral ((du_m - dt D(u_m)) / dt)^2 where D is the
/// deterministic map of the integrator.
double action_eps(const Trajectory& traj, double eps, const DoubleWell& w);

/// (vol{u > 0} / omega_d)^(1/d), with a linear sub-cell correction at cells
/// next to a sign change.
double levelset_radius(const TorusField& u);

}  // namespace sacl
