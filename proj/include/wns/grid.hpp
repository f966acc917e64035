// Discretization of R^d x (0, inf) with the weighted measure
//   d mu(x) = x_{d+1}^{2 alpha + 1} / ((2 pi)^{d/2} 2^alpha Gamma(alpha+1)) dx,
// field containers, L^p_alpha norms and field snapshots.

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace wns {

using cplx = std::complex<double>;

/// Grid of a field on R^d x (0, R_max]. The first d axes are periodic
/// Fourier axes of length L with N samples each; the last axis carries
/// Gauss-Jacobi nodes for the weight x^{2 alpha + 1}. The spectral dual has
/// the discrete Fourier frequencies on the first d axes and N_lambda
/// Gauss-Jacobi nodes on (0, Lambda_max] for the radial frequency.
struct GridSpec {
    int d = 1;
    double alpha = 0.0;
    double L = 8.0 * 3.14159265358979323846;
    int N = 96;
    double R_max = 16.0;
    int N_r = 128;
    double Lambda_max = 8.0;
    int N_lambda = 128;
    /// Admits alpha = -1/2 (cosine kernel). Only the classical comparison
    /// path sets this.
    bool classical_limit = false;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    std::size_t fourier_size() const;  // N^d
    std::size_t physical_size() const { return fourier_size() * std::size_t(N_r); }
    std::size_t spectral_size() const { return fourier_size() * std::size_t(N_lambda); }

    double dx() const { return L / double(N); }
    double dk() const;

    /// Fourier frequency of FFT index m on one axis (Nyquist mapped to -N/2).
    double fourier_frequency(int m) const;
    /// Sample position of index m on one Fourier axis, in [-L/2, L/2).
    double fourier_position(int m) const { return -0.5 * L + double(m) * dx(); }

    /// 1/((2 pi)^{d/2} 2^alpha Gamma(alpha+1)).
    double measure_constant() const;

    bool operator==(const GridSpec&) const = default;

    /// Desk-scale default grid.
    static GridSpec desk(int d = 1, double alpha = 0.0);
};

/// Radial quadrature on (0, R]: nodes and weights that already contain
/// the x^{2 alpha + 1} factor (but not the measure constant).
struct RadialQuadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

RadialQuadrature radial_quadrature(double alpha, double R, int n);
RadialQuadrature radial_nodes(const GridSpec& grid);
RadialQuadrature frequency_nodes(const GridSpec& grid);

/// Real samples on the physical grid, row-major over (i_1, ..., i_d, j) with
/// the radial index fastest. Represents the even extension in x_{d+1}.
class PhysicalField {
public:
    explicit PhysicalField(GridSpec grid);
    PhysicalField(GridSpec grid, std::vector<double> values);

    const GridSpec& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

private:
    GridSpec grid_;
    std::vector<double> values_;
};

/// Weinstein-frequency coefficients, same layout with N_lambda radial slots.
class SpectralField {
public:
    explicit SpectralField(GridSpec grid);
    SpectralField(GridSpec grid, std::vector<cplx> coeffs);

    const GridSpec& grid() const { return grid_; }
    std::span<const cplx> coeffs() const { return coeffs_; }
    std::span<cplx> coeffs() { return coeffs_; }
    std::size_t size() const { return coeffs_.size(); }
    const cplx& operator[](std::size_t i) const { return coeffs_[i]; }
    cplx& operator[](std::size_t i) { return coeffs_[i]; }

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(cplx c);

private:
    GridSpec grid_;
    std::vector<cplx> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx c, SpectralField a);

/// Velocity field u = (u_1, ..., u_{d+1}) at time t.
///
/// The Weinstein gradient of a real field has a purely imaginary last
/// component, and the divergence-free subspace reachable from real data keeps
/// u_1..u_d real and u_{d+1} imaginary. The last component is therefore held
/// in real form: components[d] stores u_{d+1} / i.
struct VelocityState {
    double t = 0.0;
    std::vector<PhysicalField> components;
    double div_norm = 0.0;

    const GridSpec& grid() const { return components.front().grid(); }
};

/// Per-node weights w with sum w f ~ integral of f d mu_{alpha,d}.
std::vector<double> measure_weights(const GridSpec& grid);
/// Same on the spectral node set.
std::vector<double> spectral_measure_weights(const GridSpec& grid);

/// Weighted norm (sum w |f|^p)^{1/p}; p = infinity gives max |f|.
double weighted_lp_norm(std::span<const double> abs_values, std::span<const double> weights, double p);
double lp_norm(const PhysicalField& f, double p);
/// L^p norm of the pointwise Euclidean magnitude of a velocity field.
double lp_norm(const VelocityState& u, double p);

struct Gaussian {
    double s = 1.0;  // E_s(x) = exp(-s |x|^2)
};
struct BandLimitedRandom {
    std::uint64_t seed = 0;
    double cutoff = 0.0;  // spectral radius; 0 selects Lambda_max
};
struct Constant {
    double c = 0.0;
};
using TestFieldKind = std::variant<Gaussian, BandLimitedRandom, Constant>;

PhysicalField make_test_field(const GridSpec& grid, const TestFieldKind& kind);

/// Apply a function of the physical coordinates (x_1..x_d, x_{d+1}).
template <class F>
PhysicalField sample_field(const GridSpec& grid, F&& f);

/// Binary snapshot (little endian): "WNSF", u32 version, u32 d, f64 alpha,
/// u32 N, u32 N_r, f64 L, f64 R_max, f64 time, u32 component count, then
/// row-major f64 arrays per component.
struct Snapshot {
    GridSpec grid;
    double time = 0.0;
    std::vector<std::vector<double>> components;
};

constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const std::filesystem::path& path, const VelocityState& state);
void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot read_snapshot(const std::filesystem::path& path);

// ---------------------------------------------------------------------------

template <class F>
PhysicalField sample_field(const GridSpec& grid, F&& f) {
    grid.validate();
    const RadialQuadrature rq = radial_nodes(grid);
    PhysicalField out(grid);
    std::vector<double> x(std::size_t(grid.d) + 1);
    const std::size_t nf = grid.fourier_size();
    for (std::size_t p = 0; p < nf; ++p) {
        std::size_t rem = p;
        for (int a = grid.d - 1; a >= 0; --a) {
            x[std::size_t(a)] = grid.fourier_position(int(rem % std::size_t(grid.N)));
            rem /= std::size_t(grid.N);
        }
        for (int j = 0; j < grid.N_r; ++j) {
            x[std::size_t(grid.d)] = rq.nodes[std::size_t(j)];
            out[p * std::size_t(grid.N_r) + std::size_t(j)] = f(std::span<const double>(x));
        }
    }
    return out;
}

}  // namespace wns
