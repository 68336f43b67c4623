#include "sacl/torus_field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "sacl/error.hpp"

namespace sacl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct FftPlans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    std::vector<double> k_sq;  // |k|^2 per coefficient of the r2c layout
};

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans live for the lifetime of the process.
const FftPlans& plans_for(const Grid& grid) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, FftPlans> cache;
    std::lock_guard lock(mutex);
    auto key = std::make_pair(grid.dim(), grid.n());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    int dims[3] = {grid.n(), grid.n(), grid.n()};
    std::size_t complex_size = grid.size() / grid.n() * (grid.n() / 2 + 1);
    RealVector real(grid.size());
    ComplexVector cplx(complex_size);
    auto* in = real.data();
    auto* out = reinterpret_cast<fftw_complex*>(cplx.data());
    // FFTW_ESTIMATE keeps the algorithm choice (and therefore the bits) fixed.
    FftPlans p;
    p.r2c = fftw_plan_dft_r2c(grid.dim(), dims, in, out, FFTW_ESTIMATE);
    p.c2r = fftw_plan_dft_c2r(grid.dim(), dims, out, in, FFTW_ESTIMATE);
    if (p.r2c == nullptr || p.c2r == nullptr) throw NumericError("FFTW planning failed");
    Spectrum probe(grid);
    p.k_sq.resize(complex_size);
    for (std::size_t i = 0; i < complex_size; ++i) p.k_sq[i] = probe.wavenumber_sq(i);
    return cache.emplace(key, std::move(p)).first->second;
}

void require_same_grid(const TorusField& a, const TorusField& b, const char* what) {
    if (!(a.grid() == b.grid()) || a.components() != b.components())
        throw GridMismatchError(std::string(what) + ": fields live on different grids or shapes");
}

void require_scalar(const TorusField& f, const char* what) {
    if (!f.is_scalar()) throw InvalidFieldError(std::string(what) + ": expected a scalar field");
}

}  // namespace

// ---------------------------------------------------------------- Grid

Grid::Grid(int dim, int n) : dim_(dim), n_(n), size_(1) {
    if (dim < 1 || dim > 3) throw PreconditionError("grid dimension must be 1, 2 or 3");
    if (n < 8 || !is_power_of_two(n)) throw PreconditionError("grid n must be a power of two >= 8");
    for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(n);
}

MultiIndex Grid::multi_index(std::size_t flat) const noexcept {
    MultiIndex idx{0, 0, 0};
    for (int a = dim_ - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % n_);
        flat /= n_;
    }
    return idx;
}

std::size_t Grid::flat(MultiIndex idx) const noexcept {
    std::size_t f = 0;
    for (int a = 0; a < dim_; ++a) {
        int i = ((idx[a] % n_) + n_) % n_;
        f = f * n_ + static_cast<std::size_t>(i);
    }
    return f;
}

Point Grid::point(std::size_t flat) const noexcept {
    MultiIndex idx = multi_index(flat);
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) x[a] = idx[a] * spacing();
    return x;
}

// ---------------------------------------------------------------- TorusField

TorusField::TorusField(Grid grid, int components)
    : grid_(grid), components_(components), values_(grid.size() * components, 0.0) {
    if (components != 1 && components != grid.dim())
        throw InvalidFieldError("field components must be 1 or the grid dimension");
}

TorusField TorusField::constant(const Grid& grid, double value) {
    TorusField f(grid);
    std::fill(f.values_.begin(), f.values_.end(), value);
    return f;
}

TorusField TorusField::from_function(const Grid& grid, const std::function<double(const Point&)>& fn) {
    TorusField f(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) f.values_[i] = fn(grid.point(i));
    return f;
}

TorusField TorusField::vector_from_function(const Grid& grid,
                                            const std::function<void(const Point&, std::span<double>)>& fn) {
    TorusField f(grid, grid.dim());
    std::array<double, 3> buf{};
    const std::size_t n = grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        buf.fill(0.0);
        fn(grid.point(i), std::span<double>(buf.data(), grid.dim()));
        for (int a = 0; a < grid.dim(); ++a) f.values_[a * n + i] = buf[a];
    }
    return f;
}

std::span<double> TorusField::component(int a) noexcept {
    return std::span<double>(values_).subspan(a * grid_.size(), grid_.size());
}

std::span<const double> TorusField::component(int a) const noexcept {
    return std::span<const double>(values_).subspan(a * grid_.size(), grid_.size());
}

TorusField TorusField::component_field(int a) const {
    TorusField f(grid_);
    auto src = component(a);
    std::copy(src.begin(), src.end(), f.values_.begin());
    return f;
}

void TorusField::check_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) throw InvalidFieldError("field contains non-finite values");
}

double TorusField::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

TorusField& TorusField::operator+=(const TorusField& other) {
    require_same_grid(*this, other, "operator+=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

TorusField& TorusField::operator-=(const TorusField& other) {
    require_same_grid(*this, other, "operator-=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

TorusField& TorusField::operator*=(double s) noexcept {
    for (double& v : values_) v *= s;
    return *this;
}

TorusField& TorusField::axpy(double s, const TorusField& other) {
    require_same_grid(*this, other, "axpy");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * other.values_[i];
    return *this;
}

TorusField operator+(TorusField a, const TorusField& b) { return a += b; }
TorusField operator-(TorusField a, const TorusField& b) { return a -= b; }
TorusField operator*(double s, TorusField a) { return a *= s; }

TorusField multiply(const TorusField& a, const TorusField& b) {
    require_scalar(a, "multiply");
    require_same_grid(a, b, "multiply");
    TorusField out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

TorusField map(const TorusField& f, const std::function<double(double)>& fn) {
    require_scalar(f, "map");
    TorusField out(f.grid());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = fn(f[i]);
    return out;
}

TorusField dot(const TorusField& a, const TorusField& b) {
    require_same_grid(a, b, "dot");
    TorusField out(a.grid());
    for (int c = 0; c < a.components(); ++c) {
        auto x = a.component(c);
        auto y = b.component(c);
        for (std::size_t i = 0; i < a.size(); ++i) out[i] += x[i] * y[i];
    }
    return out;
}

// ---------------------------------------------------------------- Spectrum

Spectrum::Spectrum(Grid grid)
    : grid_(grid), coeffs_(grid.size() / grid.n() * (grid.n() / 2 + 1)) {}

MultiIndex Spectrum::wavenumber(std::size_t i) const noexcept {
    const int n = grid_.n();
    const int half = n / 2 + 1;
    MultiIndex k{0, 0, 0};
    const int d = grid_.dim();
    k[d - 1] = static_cast<int>(i % half);
    i /= half;
    for (int a = d - 2; a >= 0; --a) {
        int j = static_cast<int>(i % n);
        i /= n;
        k[a] = j <= n / 2 ? j : j - n;
    }
    return k;
}

double Spectrum::wavenumber_sq(std::size_t i) const noexcept {
    MultiIndex k = wavenumber(i);
    return static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1] +
           static_cast<double>(k[2]) * k[2];
}

bool Spectrum::is_nyquist(std::size_t i, int axis) const noexcept {
    return wavenumber(i)[axis] == grid_.n() / 2;
}

double Spectrum::hermitian_weight(std::size_t i) const noexcept {
    int last = wavenumber(i)[grid_.dim() - 1];
    return (last == 0 || last == grid_.n() / 2) ? 1.0 : 2.0;
}

std::span<const double> wavenumber_sq_table(const Grid& grid) { return plans_for(grid).k_sq; }

Spectrum forward(const TorusField& f) {
    require_scalar(f, "forward");
    const Grid& g = f.grid();
    Spectrum s(g);
    RealVector in(f.values().begin(), f.values().end());
    fftw_execute_dft_r2c(plans_for(g).r2c, in.data(),
                         reinterpret_cast<fftw_complex*>(s.coefficients().data()));
    const double norm = 1.0 / static_cast<double>(g.size());
    for (auto& c : s.coefficients()) c *= norm;
    return s;
}

TorusField inverse(const Spectrum& s) {
    const Grid& g = s.grid();
    ComplexVector work(s.coefficients().begin(), s.coefficients().end());
    TorusField out(g);
    fftw_execute_dft_c2r(plans_for(g).c2r, reinterpret_cast<fftw_complex*>(work.data()),
                         out.values().data());
    return out;
}

// ---------------------------------------------------------------- operators

double integrate(const TorusField& f) {
    require_scalar(f, "integrate");
    f.check_finite();
    // Neumaier summation: results must not depend on grid size beyond rounding.
    double sum = 0.0, comp = 0.0;
    for (double v : f.values()) {
        double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return (sum + comp) / static_cast<double>(f.size());
}

double inner(const TorusField& f, const TorusField& g) { return integrate(multiply(f, g)); }

double spectral_energy(const TorusField& f) {
    Spectrum s = forward(f);
    double e = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) e += s.hermitian_weight(i) * std::norm(s[i]);
    return e;
}

TorusField gradient(const Spectrum& f_hat) {
    const Grid& g = f_hat.grid();
    TorusField out(g, g.dim());
    for (int a = 0; a < g.dim(); ++a) {
        Spectrum d(g);
        for (std::size_t i = 0; i < f_hat.size(); ++i) {
            MultiIndex k = f_hat.wavenumber(i);
            // Odd derivative of the Nyquist mode is not representable as a real field.
            if (k[a] == g.n() / 2) continue;
            d[i] = std::complex<double>(0.0, kTwoPi * k[a]) * f_hat[i];
        }
        TorusField comp = inverse(d);
        auto dst = out.component(a);
        std::copy(comp.values().begin(), comp.values().end(), dst.begin());
    }
    return out;
}

TorusField gradient(const TorusField& f) {
    require_scalar(f, "gradient");
    f.check_finite();
    return gradient(forward(f));
}

TorusField laplacian(const Spectrum& f_hat) {
    Spectrum d(f_hat.grid());
    const auto k_sq = wavenumber_sq_table(f_hat.grid());
    for (std::size_t i = 0; i < f_hat.size(); ++i) d[i] = -kTwoPi * kTwoPi * k_sq[i] * f_hat[i];
    return inverse(d);
}

TorusField laplacian(const TorusField& f) {
    require_scalar(f, "laplacian");
    f.check_finite();
    return laplacian(forward(f));
}

TorusField divergence(const TorusField& v) {
    if (v.components() != v.grid().dim()) throw InvalidFieldError("divergence: expected a vector field");
    v.check_finite();
    const Grid& g = v.grid();
    Spectrum acc(g);
    for (int a = 0; a < g.dim(); ++a) {
        Spectrum s = forward(v.component_field(a));
        for (std::size_t i = 0; i < s.size(); ++i) {
            MultiIndex k = s.wavenumber(i);
            if (k[a] == g.n() / 2) continue;
            acc[i] += std::complex<double>(0.0, kTwoPi * k[a]) * s[i];
        }
    }
    return inverse(acc);
}

TorusField convolve(const TorusField& f, const TorusField& kernel) {
    require_scalar(f, "convolve");
    require_same_grid(f, kernel, "convolve");
    f.check_finite();
    kernel.check_finite();
    Spectrum a = forward(f);
    Spectrum b = forward(kernel);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
    return inverse(a);
}

TorusField convolve(const TorusField& f, const Spectrum& kernel_hat) {
    require_scalar(f, "convolve");
    if (!(f.grid() == kernel_hat.grid())) throw GridMismatchError("convolve: kernel lives on a different grid");
    Spectrum a = forward(f);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= kernel_hat[i];
    return inverse(a);
}

TorusField dealias(const TorusField& f) {
    require_scalar(f, "dealias");
    Spectrum s = forward(f);
    const int cutoff = f.grid().n() / 3;
    for (std::size_t i = 0; i < s.size(); ++i) {
        MultiIndex k = s.wavenumber(i);
        for (int a = 0; a < f.grid().dim(); ++a)
            if (std::abs(k[a]) > cutoff) s[i] = 0.0;
    }
    return inverse(s);
}

double torus_delta(double x, double y) noexcept {
    double d = x - y;
    d -= std::floor(d + 0.5);
    return d;
}

double torus_distance(const Point& x, const Point& y, int dim) noexcept {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) {
        double d = torus_delta(x[a], y[a]);
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace sacl
