#include <doctest.h>

#include <vector>

#include "sacl/error.hpp"
#include "sacl/noise.hpp"
#include "support.hpp"

using namespace sacl;
using namespace sacl::test;

namespace {

struct Moments {
    double mean = 0, var = 0;
};

Moments moments(const std::vector<double>& v) {
    Moments m;
    for (double x : v) m.mean += x;
    m.mean /= v.size();
    for (double x : v) m.var += (x - m.mean) * (x - m.mean);
    m.var /= (v.size() - 1);
    return m;
}

}  // namespace

TEST_CASE("kernel is a normalized, non-negative, even bump") {
    const Grid g(1, 256);
    const NoiseModel m = build_noise(g, 0.1, 1.0, 1.0);
    CHECK(std::abs(integrate(m.kernel) - 1.0) < 1e-8);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(m.kernel[i] >= 0.0);
        CHECK(m.kernel[i] == m.kernel[(g.size() - i) % g.size()]);
    }
    CHECK(m.support_width == doctest::Approx(0.1));
    // Outside the support radius 0.05 the kernel vanishes.
    CHECK(m.kernel[g.flat({20, 0, 0})] == 0.0);

    const Grid g2(2, 64);
    const NoiseModel m2 = build_noise(g2, 0.2, 1.0, 1.0);
    for (std::size_t i = 0; i < g2.size(); ++i) {
        const auto k = g2.multi_index(i);
        CHECK(m2.kernel[i] == m2.kernel[g2.flat({-k[0], -k[1], 0})]);
        CHECK(m2.kernel[i] == m2.kernel[g2.flat({k[1], k[0], 0})]);
    }
}

TEST_CASE("resolution guard and strength rule") {
    CHECK_THROWS_AS(build_noise(Grid(1, 256), 0.01, 1.0, 1.0), UnderResolvedKernelError);
    CHECK_NOTHROW(build_noise(Grid(1, 256), 0.01, 0.5, 1.0));
    CHECK(rel(noise_strength(0.1, 1.0, 2, 1.0), 1e-4) < 1e-12);
    CHECK(rel(build_noise(Grid(2, 64), 0.1, 1.0, 1.0).lambda, 1e-4) < 1e-12);
    CHECK_THROWS(build_noise(Grid(1, 256), 0.1, 1.5, 1.0));
    CHECK_THROWS(build_noise(Grid(1, 256), 0.1, 1.0, -1.0));
}

TEST_CASE("scaling condition") {
    const Grid g(2, 256);
    const std::vector<double> eps{0.32, 0.16, 0.08, 0.04, 0.02};

    const auto pass = scaling_condition(g, 1.0, 1.0, eps);
    CHECK(pass.pass);
    // ||j_eps||^2 = eps^-2 ||j||^2 in d = 2, so the mass term eps^3 ||j_eps||^2
    // halves with eps on well-resolved kernels.
    for (std::size_t i = 1; i < 3; ++i)
        CHECK(std::abs(pass.rows[i].mass_term / pass.rows[i - 1].mass_term - 0.5) < 1e-3);

    const auto borderline = scaling_condition(g, 1.0, [](double e) { return e * e * e; }, eps);
    CHECK_FALSE(borderline.pass);
    const auto diverging = scaling_condition(g, 1.0, [](double e) { return e * e; }, eps);
    CHECK_FALSE(diverging.pass);
    CHECK(diverging.rows.back().value > diverging.rows.front().value);
}

TEST_CASE("increment pairings: mean, variance, linearity, independence") {
    const Grid g(1, 256);
    const NoiseModel m = build_noise(g, 0.1, 1.0, 1.0);
    const double dt = 1e-3;
    const auto phi = TorusField::from_function(g, [](const Point& x) { return std::cos(kTwoPi * 3 * x[0]) + 0.4; });
    const auto psi = TorusField::from_function(g, [](const Point& x) { return std::sin(kTwoPi * 7 * x[0]); });
    const auto one = TorusField::constant(g, 1.0);

    RandomStream rng(11, 0);
    const int draws = 10000;
    std::vector<double> a, b, c;
    double worst_linear = 0.0;
    for (int i = 0; i < draws; ++i) {
        const TorusField inc = sample_increment(m, dt, rng);
        a.push_back(inner(inc, phi));
        b.push_back(inner(inc, one));
        c.push_back(inner(inc, psi));
        const double lhs = inner(inc, 2.0 * phi + (-3.0) * psi);
        worst_linear = std::max(worst_linear, std::abs(lhs - (2.0 * a.back() - 3.0 * c.back())));
    }
    CHECK(worst_linear < 1e-14);

    const auto ma = moments(a), mb = moments(b);
    CHECK(std::abs(ma.mean) < 4 * std::sqrt(ma.var / draws));

    CHECK(std::abs(mb.var - dt) < 3 * dt * std::sqrt(2.0 / (draws - 1)));

    const auto jphi = convolve(phi, m.kernel);
    const double analytic = dt * inner(jphi, jphi);
    CHECK(std::abs(ma.var - analytic) < 3 * analytic * std::sqrt(2.0 / (draws - 1)));

    double lag = 0.0;
    for (int i = 1; i < draws; ++i) lag += (a[i] - ma.mean) * (a[i - 1] - ma.mean);
    lag /= (draws - 1);
    CHECK(std::abs(lag) < 3 * ma.var / std::sqrt(double(draws - 1)));
}

TEST_CASE("covariance test") {
    const Grid g(2, 32);
    const NoiseModel m = build_noise(g, 0.3, 1.0, 1.0);
    RandomStream rng(5, 1);
    const auto phi = TorusField::from_function(g, [](const Point& x) { return std::cos(kTwoPi * x[0]); });
    const auto psi = TorusField::from_function(
        g, [](const Point& x) { return std::cos(kTwoPi * x[0]) + std::sin(kTwoPi * (x[0] + x[1])); });
    const auto rep = covariance_test(m, phi, psi, 0.5, 0.8, 10000, rng);
    const auto jphi = convolve(phi, m.kernel), jpsi = convolve(psi, m.kernel);
    CHECK(rel(rep.cov_analytic, 0.5 * inner(jphi, jpsi)) < 1e-12);
    CHECK(rel(rep.var_phi_analytic, 0.5 * inner(jphi, jphi)) < 1e-12);
    CHECK(rep.pass());
    CHECK_THROWS(covariance_test(m, phi, psi, 0.5, 0.8, 999, rng));
}
