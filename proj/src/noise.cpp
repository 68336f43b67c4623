#include "sacl/noise.hpp"

#include <cmath>
#include <sstream>

#include "sacl/error.hpp"

namespace sacl {

double noise_strength(double eps, double beta, int dim, double kappa) {
    return std::pow(eps, 1.0 + beta * dim + kappa);
}

TorusField bump_kernel(const Grid& grid, double width) {
    const Point origin{0.0, 0.0, 0.0};
    TorusField k = TorusField::from_function(grid, [&](const Point& x) {
        double s = 2.0 * torus_distance(x, origin, grid.dim()) / width;
        if (s >= 1.0) return 0.0;
        return std::exp(-1.0 / (1.0 - s * s));
    });
    k *= 1.0 / integrate(k);
    return k;
}

NoiseModel build_noise(const Grid& grid, double eps, double beta, double kappa) {
    if (!(eps > 0.0)) throw PreconditionError("noise: eps must be positive");
    if (!(beta > 0.0 && beta <= 1.0)) throw PreconditionError("noise: beta must lie in (0, 1]");
    if (!(kappa >= 0.0)) throw PreconditionError("noise: kappa must be non-negative");
    const double width = std::pow(eps, beta);
    if (width < 4.0 * grid.spacing()) {
        std::ostringstream os;
        os << "kernel width eps^beta = " << width << " is below 4 grid spacings (" << 4.0 * grid.spacing()
           << "); refine the grid or raise eps";
        throw UnderResolvedKernelError(os.str());
    }
    TorusField kernel = bump_kernel(grid, width);
    Spectrum kernel_hat = forward(kernel);
    TorusField grad = gradient(kernel_hat);
    NoiseModel m{grid,
                 eps,
                 beta,
                 kappa,
                 noise_strength(eps, beta, grid.dim(), kappa),
                 width,
                 kernel,
                 kernel_hat,
                 inner(kernel, kernel),
                 integrate(dot(grad, grad))};
    return m;
}

ScalingReport scaling_condition(const Grid& grid, double beta,
                                const std::function<double(double)>& lambda_of_eps,
                                std::span<const double> eps_list) {
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1])) throw PreconditionError("scaling_condition: eps list must decrease");
    ScalingReport rep;
    for (double eps : eps_list) {
        // kappa only enters lambda, which is supplied separately here.
        NoiseModel m = build_noise(grid, eps, beta, 0.0);
        double lambda = lambda_of_eps(eps);
        ScalingRow row{eps, lambda, eps * lambda * m.kernel_grad_l2_sq, lambda * m.kernel_l2_sq / eps, 0.0};
        row.value = row.gradient_term + row.mass_term;
        rep.rows.push_back(row);
    }
    bool decreasing = rep.rows.size() >= 2;
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        decreasing = decreasing && rep.rows[i].value < rep.rows[i - 1].value;
    rep.pass = decreasing && rep.rows.back().value < rep.rows.front().value / 10.0;
    return rep;
}

ScalingReport scaling_condition(const Grid& grid, double beta, double kappa, std::span<const double> eps_list) {
    const int d = grid.dim();
    return scaling_condition(
        grid, beta, [=](double eps) { return noise_strength(eps, beta, d, kappa); }, eps_list);
}

TorusField sample_increment(const NoiseModel& model, double dt, RandomStream& rng) {
    if (!(dt > 0.0)) throw PreconditionError("sample_increment: dt must be positive");
    TorusField white(model.grid);
    const double sd = std::sqrt(dt * static_cast<double>(model.grid.size()));
    for (double& v : white.values()) v = sd * rng.normal();
    return convolve(white, model.kernel_hat);
}

CovarianceReport covariance_test(const NoiseModel& model, const TorusField& phi, const TorusField& psi,
                                 double t, double t_prime, int draws, RandomStream& rng) {
    if (draws < 1000) throw PreconditionError("covariance_test needs at least 1000 draws");
    if (!(t > 0.0 && t_prime > 0.0)) throw PreconditionError("covariance_test: times must be positive");
    const double t_lo = std::min(t, t_prime);
    const double t_hi = std::max(t, t_prime);

    double sx = 0, sy = 0, sxx = 0, sxy = 0, sxy2 = 0, sx4 = 0, syy = 0;
    for (int k = 0; k < draws; ++k) {
        TorusField a_lo = sample_increment(model, t_lo, rng);
        TorusField a_hi = a_lo;
        if (t_hi > t_lo) a_hi += sample_increment(model, t_hi - t_lo, rng);
        const TorusField& at = t <= t_prime ? a_lo : a_hi;
        const TorusField& atp = t <= t_prime ? a_hi : a_lo;
        double x = inner(at, phi);
        double y = inner(atp, psi);
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
        sxy2 += (x * y) * (x * y);
        sx4 += x * x * x * x;
    }
    const double n = draws;
    CovarianceReport r;
    r.draws = draws;
    r.t = t;
    r.t_prime = t_prime;
    r.mean_phi = sx / n;
    r.mean_psi = sy / n;
    r.mean_phi_se = std::sqrt(std::max(sxx / n - r.mean_phi * r.mean_phi, 0.0) / n);
    r.mean_psi_se = std::sqrt(std::max(syy / n - r.mean_psi * r.mean_psi, 0.0) / n);
    r.var_phi = sxx / n - r.mean_phi * r.mean_phi;
    r.var_phi_se = std::sqrt(std::max(sx4 / n - (sxx / n) * (sxx / n), 0.0) / n);
    r.cov = sxy / n - r.mean_phi * r.mean_psi;
    r.cov_se = std::sqrt(std::max(sxy2 / n - (sxy / n) * (sxy / n), 0.0) / n);

    TorusField jphi = convolve(phi, model.kernel_hat);
    TorusField jpsi = convolve(psi, model.kernel_hat);
    r.var_phi_analytic = t * inner(jphi, jphi);
    r.cov_analytic = t_lo * inner(jphi, jpsi);

    r.means_ok = std::abs(r.mean_phi) <= 4.0 * r.mean_phi_se && std::abs(r.mean_psi) <= 4.0 * r.mean_psi_se;
    r.variance_ok = std::abs(r.var_phi - r.var_phi_analytic) <= 3.0 * r.var_phi_se;
    r.covariance_ok = std::abs(r.cov - r.cov_analytic) <= 3.0 * r.cov_se;
    return r;
}

}  // namespace sacl
