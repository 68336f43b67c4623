#include <doctest.h>

#include <random>

#include "sacl/error.hpp"
#include "sacl/moduli.hpp"
#include "support.hpp"

using namespace sacl;
using namespace sacl::test;

namespace {

std::vector<double> uniform_times(std::size_t M, double T) {
    std::vector<double> t(M + 1);
    for (std::size_t i = 0; i <= M; ++i) t[i] = T * static_cast<double>(i) / static_cast<double>(M);
    return t;
}

double trapezoid_abs(const std::vector<double>& z, double T) {
    const double h = T / static_cast<double>(z.size() - 1);
    double s = 0.5 * (std::abs(z.front()) + std::abs(z.back()));
    for (std::size_t i = 1; i + 1 < z.size(); ++i) s += std::abs(z[i]);
    return s * h;
}

}  // namespace

TEST_CASE("sup-in-time L1 modulus") {
    const Grid g(1, 16);
    const auto times = uniform_times(100, 1.0);
    std::vector<TorusField> ramp, flat, jump;
    for (double t : times) {
        ramp.push_back(TorusField::constant(g, t));
        flat.push_back(TorusField::constant(g, 0.3));
        jump.push_back(TorusField::constant(g, t < 0.5 ? -1.0 : 1.0));
    }
    CHECK(std::abs(omega_inf(times, ramp, 0.1) - 0.1) < 1e-12);
    CHECK(std::abs(omega_inf(times, ramp, 1.0) - 1.0) < 1e-12);
    CHECK(omega_inf(times, flat, 0.5) == 0.0);
    CHECK(omega_inf(times, jump, 0.05) == 2.0);
    CHECK(omega_inf(times, jump, 0.001) == 0.0);
    CHECK_THROWS_AS(omega_inf(times, ramp, 1.5), PreconditionError);
    CHECK_THROWS_AS(omega_inf(times, ramp, 0.0), PreconditionError);

    // Monotone and subadditive on random data at multiples of the spacing.
    std::mt19937_64 gen(11);
    std::normal_distribution<double> nd;
    const auto t32 = uniform_times(32, 1.0);
    std::vector<TorusField> rnd;
    for (std::size_t i = 0; i < t32.size(); ++i) {
        TorusField f(g);
        for (auto& v : f.values()) v = nd(gen);
        rnd.push_back(std::move(f));
    }
    const auto deltas = dyadic_deltas(1.0, 1.0 / 32);
    REQUIRE(deltas.size() == 6);
    for (std::size_t i = 0; i + 1 < deltas.size(); ++i) {
        const double big = omega_inf(t32, rnd, deltas[i]), small = omega_inf(t32, rnd, deltas[i + 1]);
        CHECK(big >= small);
        CHECK(big <= 2.0 * small + 1e-12);
    }
}

TEST_CASE("L1-in-time modulus") {
    const std::size_t M = 1024;
    std::vector<double> one(M + 1, 1.0), zero(M + 1, 0.0), step(M + 1);
    for (std::size_t i = 0; i <= M; ++i) step[i] = i >= M / 2 ? 1.0 : 0.0;
    CHECK(std::abs(omega_one(one, 1.0, 0.125) - 0.25) < 1e-12);
    CHECK(omega_one(zero, 1.0, 0.125) == 0.0);
    CHECK(std::abs(omega_one(step, 1.0, 0.125) - 0.25) < 1.0 / M);
    CHECK_THROWS_AS(omega_one(one, 1.0, 2.0), PreconditionError);
    CHECK_THROWS_AS(omega_one(std::vector<double>{1.0}, 1.0, 0.5), PreconditionError);

    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    std::vector<double> z(257);
    for (auto& v : z) v = nd(gen);
    const double l1 = trapezoid_abs(z, 2.0);
    double prev = 0.0;
    for (double delta : {2.0 / 256, 2.0 / 64, 2.0 / 16, 0.5, 2.0}) {
        const double w = omega_one(z, 2.0, delta);
        CHECK(w >= prev);
        CHECK(w <= 4.0 * l1 + 1e-12);
        prev = w;
    }

    const auto rep = omega_one_report(one, 1.0, dyadic_deltas(1.0, 1.0 / 64));
    CHECK(rep.monotone);
    CHECK(std::abs(rep.alpha_hat - 1.0) < 1e-9);
    CHECK(std::abs(rep.ell_hat - 2.0) < 1e-9);
}

TEST_CASE("trigonometric test functions") {
    const Grid g(2, 32);
    const auto tf = trig_test_functions(g, 8);
    REQUIRE(tf.size() == 8);
    CHECK(tf[0].label == "cos0.cos0");
    for (const auto& t : tf) {
        const double c1 = t.phi.max_abs() + std::sqrt(dot(gradient(t.phi), gradient(t.phi)).max_abs());
        CHECK(std::abs(c1 - t.c1_norm) < 1e-12);
    }
}

TEST_CASE("admissibility") {
    const DoubleWell w = quartic();
    const Grid g(2, 64);
    const double eps = 0.04;
    SolverState s{initial_sphere(g, eps, w, {0.5, 0.5, 0.5}, 0.3), 0.0, eps, w, nullptr, stable_dt(eps, w), 0.0, false};
    RunOptions o;
    o.T = 0.008;
    o.sample_every = 5;
    const auto tr = run(s, o);
    const auto tf = trig_test_functions(g, 4);
    const double F0 = free_energy(s.u, eps, w);

    SUBCASE("energy bound on a deterministic run") {
        const auto rep = admissibility_report(tr, eps, 0.0, {2.0 * F0, 10.0, 10.0}, tf, 0.05, 0.25);
        CHECK(rep.b.pass);
        // sup F = F(u0) on the gradient flow, so the ratio is (F0 + int W) / (2 F0).
        CHECK(rep.b.worst_ratio == doctest::Approx((F0 + tr.series.back().cum_willmore) / (2.0 * F0)).epsilon(1e-12));
        CHECK(rep.test_functions_used == 4);
        CHECK(rep.warnings.empty());
        const auto tight = admissibility_report(tr, eps, 0.0, {0.5 * F0, 10.0, 10.0}, tf, 0.05, 0.25);
        CHECK_FALSE(tight.b.pass);
    }
    SUBCASE("a frozen trajectory satisfies the moduli bounds") {
        // omega_one of a constant z is its boundary mass 2 delta |z| <= 2 F0 delta.
        Trajectory frozen = tr;
        for (auto& f : frozen.fields) f = s.u;
        const auto rep = admissibility_report(frozen, eps, 0.0, {2.0 * F0, 1e-6, 2.0 * F0}, tf, 0.05, 0.25);
        CHECK(rep.c.pass);
        CHECK(rep.d.pass);
        CHECK(rep.c.worst_ratio == 0.0);
    }
    SUBCASE("exponent range") {
        CHECK_THROWS_AS(admissibility_report(tr, eps, 0.0, {1, 1, 1}, tf, 0.5, 0.25), PreconditionError);
        CHECK_THROWS_AS(admissibility_report(tr, eps, 0.0, {1, 1, 1}, tf, 0.1, 0.0), PreconditionError);
        const auto rep = admissibility_report(tr, eps, 0.0, {1, 1, 1}, tf, 0.2, 0.25);
        CHECK(rep.warnings.size() == 1);
    }
    SUBCASE("test functions are capped by the noise strength") {
        const auto rep = admissibility_report(tr, eps, 1.0 / (2.5 * eps), {1, 1, 1}, tf, 0.1, 0.25);
        CHECK(rep.test_functions_used == 2);
    }
}

TEST_CASE("failing fraction decreases as the constants grow") {
    const DoubleWell w = quartic();
    const Grid g(1, 128);
    const double eps = 0.04;
    auto noise = std::make_shared<const NoiseModel>(build_noise(g, eps, 1.0, 1.0));
    const auto tf = trig_test_functions(g, 4);
    std::vector<double> c_ratio, d_ratio;
    for (std::uint64_t r = 0; r < 40; ++r) {
        SolverState s{initial_sphere(g, eps, w, {0.5, 0.5, 0.5}, 0.25), 0.0, eps, w, noise, stable_dt(eps, w), 0.0,
                      false};
        RunOptions o;
        o.T = 0.004;
        o.sample_every = 4;
        RandomStream rng(77, r);
        const auto tr = run(s, o, &rng);
        const auto rep = admissibility_report(tr, eps, tr.lambda, {1e3, 1.0, 1.0}, tf, 0.1, 0.25);
        c_ratio.push_back(rep.c.worst_ratio);
        d_ratio.push_back(rep.d.worst_ratio);
    }
    auto failing = [](const std::vector<double>& ratios, double scale) {
        return std::count_if(ratios.begin(), ratios.end(), [&](double x) { return x / scale > 1.0; });
    };
    // Calibrate l2, l3 at the median so the first fraction is about one half.
    auto median = [](std::vector<double> v) {
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        return v[v.size() / 2];
    };
    const double l2 = median(c_ratio), l3 = median(d_ratio);
    CHECK(l2 > 0.0);
    CHECK(l3 > 0.0);
    CHECK(failing(c_ratio, 2 * l2) < failing(c_ratio, l2));
    CHECK(failing(d_ratio, 2 * l3) < failing(d_ratio, l3));
    CHECK(failing(c_ratio, 4 * l2) <= failing(c_ratio, 2 * l2));
}
