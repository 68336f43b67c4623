#pragma once

#include <array>
#include <complex>
#include <functional>

#include "sacl/integrator.hpp"

namespace sacl {

/// Field of unoriented planes, one per grid point, stored by unit normal;
/// the plane acts as the projector P = I - n n^T.
struct PlaneField {
    TorusField normal;
    /// P v pointwise.
    TorusField project(const TorusField& v) const;
};

/// Test field f(t, x, P) evaluated on the whole grid at time t.
using CurrentTestField = std::function<TorusField(double t, const PlaneField& planes)>;

/// J(f) = -eps sum_m < grad u_m . f(t_m, ., P_m), du_m >, left-point Ito sum
/// over the recorded steps.
double current_eval(const Trajectory& traj, const CurrentTestField& f, double eps);

/// eps sum_m integral |grad u_m| |f| |du_m|; a natural scale for J(f).
double current_scale(const Trajectory& traj, const CurrentTestField& f, double eps);

struct CurrentCoefficient {
    std::complex<double> z;  // Z^m_n(k, q)
    double qv = 0.0;         // its accumulated quadratic variation E|Z|^2 integrand
};

/// Ito sum of < grad u . e^m_{n,k,q}(t, ., n^u), sqrt(2 eps lambda) dA > over
/// the stored noise increments, together with
/// 2 eps lambda sum dt (||j*Re h||^2 + ||j*Im h||^2).
CurrentCoefficient current_coefficients(const Trajectory& traj, int m, int n, const MultiIndex& k,
                                        const std::array<double, 3>& q, double eps, double lambda);

struct SobolevTruncation {
    int n_max = 0;       // time modes 0..n_max
    int k_max = 0;       // space modes with |k_a| <= k_max
    double q_radius = 0.0;
    int q_points = 1;    // uniform grid points per axis on [-q_radius, q_radius]
};

struct SobolevBound {
    double c1_grad = 0.0;      // int int |grad u|^2
    double c1_willmore = 0.0;  // int W_eps
    double c1 = 0.0;
    double c2 = 0.0;           // truncated, hence a lower bound of the full sum
    double bound = 0.0;        // C (c1 + c2)
    std::size_t terms = 0;
};

SobolevBound current_sobolev_bound(const Trajectory& traj, const SobolevTruncation& trunc,
                                   const std::array<double, 3>& s, double eps, double lambda, double C = 1.0);

}  // namespace sacl
