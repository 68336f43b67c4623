#include "sacl/energetics.hpp"

#include <cmath>

#include "sacl/error.hpp"

namespace sacl {

namespace {

void require_scalar(const TorusField& u, const char* what) {
    if (!u.is_scalar()) throw InvalidFieldError(std::string(what) + ": expected a scalar field");
    u.check_finite();
}

}  // namespace

TorusField energy_density(const TorusField& u, double eps, const DoubleWell& w) {
    require_scalar(u, "energy_density");
    TorusField grad = gradient(u);
    TorusField g2 = dot(grad, grad);
    TorusField out(u.grid());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = 0.5 * eps * g2[i] + w.value(u[i]) / eps;
    return out;
}

double free_energy(const TorusField& u, double eps, const DoubleWell& w) {
    return integrate(energy_density(u, eps, w));
}

double willmore(const TorusField& u, double eps, const DoubleWell& w) {
    require_scalar(u, "willmore");
    TorusField lap = laplacian(u);
    TorusField r(u.grid());
    for (std::size_t i = 0; i < u.size(); ++i) {
        double v = eps * lap[i] - w.first(u[i]) / eps;
        r[i] = v * v;
    }
    return integrate(r) / eps;
}

Discrepancy discrepancy(const TorusField& u, double eps, const DoubleWell& w) {
    require_scalar(u, "discrepancy");
    TorusField grad = gradient(u);
    TorusField g2 = dot(grad, grad);
    Discrepancy d{TorusField(u.grid()), 0.0};
    TorusField abs(u.grid());
    for (std::size_t i = 0; i < u.size(); ++i) {
        d.density[i] = 0.5 * eps * g2[i] - w.value(u[i]) / eps;
        abs[i] = std::abs(d.density[i]);
    }
    d.tv = integrate(abs);
    return d;
}

EnergyReport energy_report(const TorusField& u, double eps, const DoubleWell& w) {
    require_scalar(u, "energy_report");
    Spectrum uh = forward(u);
    TorusField grad = gradient(uh);
    TorusField lap = laplacian(uh);
    TorusField g2 = dot(grad, grad);
    TorusField mu(u.grid()), xi(u.grid()), res(u.grid());
    for (std::size_t i = 0; i < u.size(); ++i) {
        double pot = w.value(u[i]) / eps;
        mu[i] = 0.5 * eps * g2[i] + pot;
        xi[i] = std::abs(0.5 * eps * g2[i] - pot);
        double v = eps * lap[i] - w.first(u[i]) / eps;
        res[i] = v * v;
    }
    EnergyReport r;
    r.free_energy = integrate(mu);
    r.mass = r.free_energy;
    r.willmore = integrate(res) / eps;
    r.discrepancy_tv = integrate(xi);
    r.grad_sq = integrate(g2);
    return r;
}

TorusField unit_normals(const TorusField& grad, double grad_threshold) {
    const Grid& g = grad.grid();
    if (grad.components() != g.dim()) throw InvalidFieldError("unit_normals: expected a vector field");
    TorusField n(g, g.dim());
    for (std::size_t i = 0; i < g.size(); ++i) {
        double s = 0.0;
        for (int a = 0; a < g.dim(); ++a) s += grad.component(a)[i] * grad.component(a)[i];
        s = std::sqrt(s);
        if (s < grad_threshold) {
            n.component(0)[i] = 1.0;
            continue;
        }
        for (int a = 0; a < g.dim(); ++a) n.component(a)[i] = grad.component(a)[i] / s;
    }
    return n;
}

double DiscreteVarifold::mass() const {
    // weight carries the cell volume 1/n^d, a power of two, so this is exact.
    return integrate(weight) * static_cast<double>(weight.size());
}

DiscreteVarifold varifold(const TorusField& u, double eps, const DoubleWell& w, double grad_threshold) {
    require_scalar(u, "varifold");
    TorusField grad = gradient(u);
    TorusField mu = energy_density(u, eps, w);
    mu *= u.grid().cell_volume();
    return DiscreteVarifold{mu, unit_normals(grad, grad_threshold)};
}

FirstVariation first_variation_check(const TorusField& u, double eps, const DoubleWell& w, const TorusField& X) {
    require_scalar(u, "first_variation_check");
    const Grid& g = u.grid();
    const int d = g.dim();
    if (!(X.grid() == g) || X.components() != d) throw GridMismatchError("first_variation_check: X must be a vector field on the grid of u");
    X.check_finite();

    Spectrum uh = forward(u);
    TorusField grad = gradient(uh);
    TorusField lap = laplacian(uh);
    TorusField n = unit_normals(grad);
    TorusField divX = divergence(X);

    // DX[a][b] = d_b X_a
    std::array<TorusField, 3> dX{TorusField(g, d), TorusField(g, d), TorusField(g, d)};
    for (int a = 0; a < d; ++a) dX[a] = gradient(X.component_field(a));

    TorusField lhs_density(g), first(g), second(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double gx = 0.0, g2 = 0.0, ndxn = 0.0;
        for (int a = 0; a < d; ++a) {
            gx += grad.component(a)[i] * X.component(a)[i];
            g2 += grad.component(a)[i] * grad.component(a)[i];
            for (int b = 0; b < d; ++b) ndxn += n.component(a)[i] * dX[a].component(b)[i] * n.component(b)[i];
        }
        double pot = w.value(u[i]) / eps;
        double mu = 0.5 * eps * g2 + pot;
        double xi = 0.5 * eps * g2 - pot;
        lhs_density[i] = gx * (eps * lap[i] - w.first(u[i]) / eps);
        first[i] = (divX[i] - ndxn) * mu;
        second[i] = ndxn * xi;
    }
    FirstVariation fv;
    fv.lhs = integrate(lhs_density);
    fv.rhs = integrate(first) - integrate(second);
    fv.residual = std::abs(fv.lhs - fv.rhs) / (1.0 + std::abs(fv.lhs));
    return fv;
}

}  // namespace sacl
