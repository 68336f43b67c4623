#pragma once

#include <span>
#include <string>
#include <vector>

#include "sacl/integrator.hpp"

namespace sacl {

/// max over sample pairs with |t - s| <= delta of ||u_t - u_s||_L1.
double omega_inf(std::span<const double> times, std::span<const TorusField> fields, double delta);
double omega_inf(const Trajectory& traj, double delta);

/// sup over sampled delta' in (0, delta] of
///   int_0^delta' (|z_t| + |z_{T-t}|) dt + int_delta'^T |z_t - z_{t-delta'}| dt
/// for z sampled uniformly on [0, T] (z.size() = M + 1 samples), trapezoid rule.
double omega_one(std::span<const double> z, double T, double delta);

struct ModulusReport {
    std::vector<double> deltas;
    std::vector<double> values;
    double alpha_hat = 0.0;  // slope of log value vs log delta
    double ell_hat = 0.0;    // exp(intercept)
    bool monotone = true;
};

ModulusReport omega_inf_report(const Trajectory& traj, std::span<const double> deltas);
ModulusReport omega_one_report(std::span<const double> z, double T, std::span<const double> deltas);
/// T / 2^k for k = 0, 1, ... while >= min_delta.
std::vector<double> dyadic_deltas(double T, double min_delta);

/// Smooth test function with its C1 norm sup|phi| + sup|grad phi|.
struct TestFunction {
    TorusField phi;
    double c1_norm = 1.0;
    std::string label;
};

/// Tensor-product trigonometric polynomials prod_a cos/sin(2 pi k_a x_a),
/// enumerated by increasing max frequency and scaled to unit C1 norm.
std::vector<TestFunction> trig_test_functions(const Grid& grid, std::size_t count);

struct ConditionResult {
    bool pass = true;
    double worst_ratio = 0.0;  // max of value / allowed over the checks
    double witness_delta = 0.0;
    int witness_index = -1;    // test function index for condition d)
};

struct AdmissibilityReport {
    ConditionResult b;  // sup F + int W <= l1
    ConditionResult c;  // omega_inf(delta) <= l2 delta^alpha2
    ConditionResult d;  // omega_one(|V_t|(phi_j); delta) <= ||phi_j||_C1 l3 delta^alpha3
    double sup_energy_plus_dissipation = 0.0;
    std::size_t test_functions_used = 0;
    std::vector<double> deltas;
    std::vector<std::string> warnings;
    bool pass() const noexcept { return b.pass && c.pass && d.pass; }
};

AdmissibilityReport admissibility_report(const Trajectory& traj, double eps, double lambda, const std::array<double, 3>& ell,
                                         std::span<const TestFunction> tests, double alpha2, double alpha3);

}  // namespace sacl
