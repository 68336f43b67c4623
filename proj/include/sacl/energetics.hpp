#pragma once

#include "sacl/potential.hpp"
#include "sacl/torus_field.hpp"

namespace sacl {

/// F_eps(u) = integral eps/2 |grad u|^2 + W(u)/eps.
double free_energy(const TorusField& u, double eps, const DoubleWell& w);
/// Density of the free-energy measure mu_eps.
TorusField energy_density(const TorusField& u, double eps, const DoubleWell& w);
/// W_eps(u) = eps^-1 integral (eps Lap u - W'(u)/eps)^2.
double willmore(const TorusField& u, double eps, const DoubleWell& w);

struct Discrepancy {
    TorusField density;  // eps/2 |grad u|^2 - W(u)/eps
    double tv = 0.0;     // integral of |density|
};

Discrepancy discrepancy(const TorusField& u, double eps, const DoubleWell& w);

struct EnergyReport {
    double free_energy = 0.0;
    double willmore = 0.0;
    double discrepancy_tv = 0.0;
    double mass = 0.0;     // total mass of mu_eps (same quadrature as free_energy)
    double grad_sq = 0.0;  // integral |grad u|^2
};

/// All of the above in one pass (one forward transform).
EnergyReport energy_report(const TorusField& u, double eps, const DoubleWell& w);

/// Unit normals grad u / |grad u|, replaced by e0 = (1, 0, ..) where
/// |grad u| < threshold.
TorusField unit_normals(const TorusField& grad, double grad_threshold = 1e-12);

struct DiscreteVarifold {
    TorusField weight;  // mu_eps density times the cell volume
    TorusField normal;  // vector field of unit normals
    double mass() const;
};

DiscreteVarifold varifold(const TorusField& u, double eps, const DoubleWell& w, double grad_threshold = 1e-12);

struct FirstVariation {
    double lhs = 0.0;  // integral grad u . X (eps Lap u - W'(u)/eps)
    double rhs = 0.0;  // delta V(X) - integral n.DX n dxi
    double residual = 0.0;
};

FirstVariation first_variation_check(const TorusField& u, double eps, const DoubleWell& w, const TorusField& X);

}  // namespace sacl
