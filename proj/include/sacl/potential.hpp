#pragma once

#include <array>
#include <functional>
#include <string>

namespace sacl {

/// Double-well potential with minima at the pure phases u = +-1.
struct DoubleWell {
    std::string label;
    std::function<double(double)> value;   // W
    std::function<double(double)> first;   // W'
    std::function<double(double)> second;  // W''
    /// Constant C of the growth bounds |W| <= C(|u|^4+1), |W'| <= C(|u|^3+1),
    /// |W''| <= C(sqrt(W)+1).
    double growth_constant = 1.0;
};

/// W(u) = (1 - u^2)^2 / 4.
DoubleWell quartic();
/// c * W, with the growth constant scaled accordingly.
DoubleWell scaled(const DoubleWell& w, double c);
/// Looks up a built-in well by label ("quartic"); throws ParameterError otherwise.
DoubleWell well_by_label(const std::string& label);

/// max |W''(v)| over |v| <= bound (sampled).
double max_curvature(const DoubleWell& w, double bound = 2.0);

struct AssumptionItem {
    bool pass = true;
    double witness = 0.0;  // sample point where the item failed (or the worst point)
    std::string detail;
};

/// Pass/fail for the four structural conditions on W, evaluated on a uniform
/// sample of [-3, 3]: (1) non-negative with zeros exactly at +-1, W''(+-1) > 0
/// and convex towards the ends of the range; (2) quartic growth of W;
/// (3) cubic growth of W'; (4) |W''| <= C(sqrt(W) + 1).
struct AssumptionReport {
    std::array<AssumptionItem, 4> items;
    bool all_pass() const noexcept;
};

AssumptionReport check_assumptions(const DoubleWell& w, int sample_count = 601);

/// tau = integral_{-1}^{1} sqrt(2 W(s)) ds.
struct SurfaceTension {
    double tau;
};

SurfaceTension surface_tension(const DoubleWell& w);

/// Monotone one-dimensional stationary profile m with m(0) = 0 and
/// eps^2 m'' = W'(m). Closed form tanh(x / (eps sqrt 2)) for the quartic well.
double optimal_profile(const DoubleWell& w, double eps, double x);

}  // namespace sacl
