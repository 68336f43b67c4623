#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sacl/rng.hpp"
#include "sacl/torus_field.hpp"

namespace sacl {

/// Mollified space-time noise: increments j_eps * dB with a smooth compactly
/// supported bump j_eps of width eps^beta, and strength
/// lambda_eps = eps^(1 + beta d + kappa).
struct NoiseModel {
    Grid grid;
    double eps;
    double beta;
    double kappa;
    double lambda;
    double support_width;     // eps^beta
    TorusField kernel;        // j_eps sampled on the grid, unit discrete integral
    Spectrum kernel_hat;
    double kernel_l2_sq;      // ||j_eps||^2 = (j_eps * j_eps)(0)
    double kernel_grad_l2_sq; // ||grad j_eps||^2
};

/// lambda_eps = eps^(1 + beta d + kappa).
double noise_strength(double eps, double beta, int dim, double kappa);

/// Radial C-infinity bump exp(-1 / (1 - (2r/width)^2)) on the torus, centred
/// at the origin and renormalized to unit discrete integral.
TorusField bump_kernel(const Grid& grid, double width);

/// Throws UnderResolvedKernelError when eps^beta < 4 / n.
NoiseModel build_noise(const Grid& grid, double eps, double beta, double kappa);

struct ScalingRow {
    double eps;
    double lambda;
    double gradient_term;  // eps lambda ||grad j_eps||^2
    double mass_term;      // lambda ||j_eps||^2 / eps
    double value;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    /// Decreasing sequence whose last value is below a tenth of the first.
    bool pass = false;
};

ScalingReport scaling_condition(const Grid& grid, double beta,
                                const std::function<double(double)>& lambda_of_eps,
                                std::span<const double> eps_list);
ScalingReport scaling_condition(const Grid& grid, double beta, double kappa,
                                std::span<const double> eps_list);

/// One increment of the noise over a step dt: j_eps * dB with dB independent
/// N(0, dt n^d) per grid point, so that <increment, phi> ~ N(0, dt ||j_eps * phi||^2).
TorusField sample_increment(const NoiseModel& model, double dt, RandomStream& rng);

struct CovarianceReport {
    int draws = 0;
    double t = 0.0, t_prime = 0.0;
    double mean_phi = 0.0, mean_phi_se = 0.0;
    double mean_psi = 0.0, mean_psi_se = 0.0;
    double var_phi = 0.0, var_phi_se = 0.0, var_phi_analytic = 0.0;
    double cov = 0.0, cov_se = 0.0, cov_analytic = 0.0;
    bool means_ok = false;      // both means within 4 standard errors of 0
    bool variance_ok = false;   // within 3 standard errors
    bool covariance_ok = false; // within 3 standard errors
    bool pass() const noexcept { return means_ok && variance_ok && covariance_ok; }
};

/// Empirical law of (alpha_t(phi), alpha_t'(psi)) against
/// E = 0 and Cov = min(t, t') <j * phi, j * psi>.
CovarianceReport covariance_test(const NoiseModel& model, const TorusField& phi, const TorusField& psi,
                                 double t, double t_prime, int draws, RandomStream& rng);

}  // namespace sacl
