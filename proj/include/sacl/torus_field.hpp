#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <new>
#include <span>
#include <vector>

namespace sacl {

/// Coordinates of a point on the unit torus; unused trailing entries are 0.
using Point = std::array<double, 3>;
using MultiIndex = std::array<int, 3>;

/// Minimal 64-byte aligned allocator so FFTW plans can be reused on any buffer.
template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() noexcept = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        return static_cast<T*>(::operator new(n * sizeof(T), alignment));
    }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using RealVector = std::vector<double, AlignedAllocator<double>>;
using ComplexVector = std::vector<std::complex<double>, AlignedAllocator<std::complex<double>>>;

/// Uniform periodic grid on the unit d-torus, n points per axis, row-major
/// with the last axis fastest.
class Grid {
public:
    Grid(int dim, int n);

    int dim() const noexcept { return dim_; }
    int n() const noexcept { return n_; }
    std::size_t size() const noexcept { return size_; }
    double spacing() const noexcept { return 1.0 / n_; }
    double cell_volume() const noexcept { return 1.0 / static_cast<double>(size_); }

    MultiIndex multi_index(std::size_t flat) const noexcept;
    /// Flat index of a multi-index; components are wrapped periodically.
    std::size_t flat(MultiIndex idx) const noexcept;
    Point point(std::size_t flat) const noexcept;

    bool operator==(const Grid&) const = default;

private:
    int dim_;
    int n_;
    std::size_t size_;
};

/// Sampled scalar (components == 1) or vector (components == d) field.
/// Vector components are stored as d consecutive blocks of grid.size().
class TorusField {
public:
    explicit TorusField(Grid grid, int components = 1);

    static TorusField constant(const Grid& grid, double value);
    static TorusField from_function(const Grid& grid, const std::function<double(const Point&)>& f);
    /// Vector field; `f` fills one entry per spatial dimension.
    static TorusField vector_from_function(const Grid& grid,
                                           const std::function<void(const Point&, std::span<double>)>& f);

    const Grid& grid() const noexcept { return grid_; }
    int components() const noexcept { return components_; }
    bool is_scalar() const noexcept { return components_ == 1; }
    std::size_t size() const noexcept { return grid_.size(); }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> component(int a) noexcept;
    std::span<const double> component(int a) const noexcept;
    TorusField component_field(int a) const;

    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    /// Throws InvalidFieldError on NaN/Inf.
    void check_finite() const;
    double max_abs() const noexcept;

    TorusField& operator+=(const TorusField& other);
    TorusField& operator-=(const TorusField& other);
    TorusField& operator*=(double s) noexcept;
    /// Adds s * other.
    TorusField& axpy(double s, const TorusField& other);

private:
    Grid grid_;
    int components_;
    RealVector values_;
};

TorusField operator+(TorusField a, const TorusField& b);
TorusField operator-(TorusField a, const TorusField& b);
TorusField operator*(double s, TorusField a);
/// Pointwise product of two scalar fields.
TorusField multiply(const TorusField& a, const TorusField& b);
/// Pointwise map of a scalar field.
TorusField map(const TorusField& f, const std::function<double(double)>& fn);
/// Pointwise dot product of two vector fields.
TorusField dot(const TorusField& a, const TorusField& b);

/// Normalized Fourier coefficients u_hat(k) = n^{-d} sum_x u(x) e^{-2 pi i k.x}
/// in real-to-complex layout (last axis holds n/2+1 entries).
class Spectrum {
public:
    explicit Spectrum(Grid grid);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return coeffs_.size(); }
    std::complex<double>& operator[](std::size_t i) noexcept { return coeffs_[i]; }
    std::complex<double> operator[](std::size_t i) const noexcept { return coeffs_[i]; }
    std::span<std::complex<double>> coefficients() noexcept { return coeffs_; }
    std::span<const std::complex<double>> coefficients() const noexcept { return coeffs_; }

    /// Signed wavenumber of entry i; the Nyquist index maps to +n/2.
    MultiIndex wavenumber(std::size_t i) const noexcept;
    /// |k|^2 of entry i.
    double wavenumber_sq(std::size_t i) const noexcept;
    bool is_nyquist(std::size_t i, int axis) const noexcept;
    /// Multiplicity of entry i in the full Hermitian spectrum (1 or 2).
    double hermitian_weight(std::size_t i) const noexcept;

private:
    Grid grid_;
    ComplexVector coeffs_;
};

/// |k|^2 for every coefficient of the r2c layout, cached per grid.
std::span<const double> wavenumber_sq_table(const Grid& grid);

Spectrum forward(const TorusField& f);
TorusField inverse(const Spectrum& s);

/// Quadrature on the unit-volume torus: mean of the samples.
double integrate(const TorusField& f);
/// L2 inner product of two scalar fields.
double inner(const TorusField& f, const TorusField& g);
/// Sum of |u_hat(k)|^2 over the full spectrum (Parseval partner of inner(f, f)).
double spectral_energy(const TorusField& f);

TorusField gradient(const TorusField& f);
TorusField gradient(const Spectrum& f_hat);
TorusField laplacian(const TorusField& f);
TorusField laplacian(const Spectrum& f_hat);
TorusField divergence(const TorusField& v);
/// Periodic convolution (f * k)(x) = integral f(y) k(x - y) dy.
TorusField convolve(const TorusField& f, const TorusField& kernel);
/// Same, with the kernel already transformed.
TorusField convolve(const TorusField& f, const Spectrum& kernel_hat);
/// 2/3-rule truncation: zeroes every mode with |k_a| > n/3 on some axis.
TorusField dealias(const TorusField& f);

/// Signed displacement x - y on the torus, per axis in [-1/2, 1/2).
double torus_delta(double x, double y) noexcept;
/// Euclidean distance between two torus points in the first `dim` axes.
double torus_distance(const Point& x, const Point& y, int dim) noexcept;

}  // namespace sacl
