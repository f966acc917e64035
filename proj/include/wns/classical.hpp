// Independent Fourier/cosine pseudospectral solver for the alpha = -1/2 case,
// where j_{-1/2}(x) = cos x and the radial transform is a cosine transform.
// Periodic axes use a hand-rolled DFT and the last axis a midpoint-rule
// cosine transform, so nothing is shared with the main transform stack.

#pragma once

#include "wns/grid.hpp"
#include "wns/solver.hpp"

#include <functional>
#include <span>
#include <vector>

namespace wns {

/// Periodic axes as in a GridSpec; last axis: midpoint nodes (k + 1/2) R / M
/// with cosine modes m pi / R, m < M. Modes above `band` are discarded.
struct CosineGrid {
    int d = 1;
    int N = 32;
    double L = 4.0 * 3.14159265358979323846;
    int M = 128;
    double R = 16.0;
    double band = 8.0;

    void validate() const;
    std::size_t fourier_size() const;
    std::size_t size() const { return fourier_size() * std::size_t(M); }
    std::vector<double> radii() const;
    std::vector<double> modes() const;
    double fourier_position(int n) const { return -0.5 * L + n * L / N; }
    double fourier_frequency(int m) const;
};

/// Periodic axes and band from the grid, radial resolution given separately.
CosineGrid cosine_grid_for(const GridSpec& grid, int M, double R);

/// Pointwise initial velocity in real form (last component is u_{d+1} / i).
using VectorFunction = std::function<void(std::span<const double> x, std::span<double> out)>;

struct ClassicalState {
    double t = 0.0;
    std::vector<std::vector<double>> components;  // real form, radial index fastest
};

struct ClassicalOptions {
    double p = 6.0;
    bool dealias = true;
    bool nonlinear = true;
    /// Step end times to follow instead of uniform dt steps (e.g. the
    /// times recorded by a main-stack run).
    std::vector<double> times;
};

struct ClassicalResult {
    NormSeries series;
    std::vector<ClassicalState> states;
};

/// Same exponential trapezoid rule as march, fixed step dt.
ClassicalResult classical_march(const CosineGrid& grid, const VectorFunction& u0, double nu, double dt,
                                double T_end, const ClassicalOptions& opt = {});

/// Closed form at alpha = -1/2 of the stream data
///   phi = amplitude exp(-|lambda'|^2/2 - (lambda_{d+1} - center)^2 / width),
/// up to terms of size exp(-center^2 / width).
VectorFunction classical_vortex(int d, double amplitude, double center = 4.5, double width = 0.6);

/// Sample a vector function on the cosine grid.
ClassicalState sample_classical(const CosineGrid& grid, const VectorFunction& f, double t = 0.0);

/// L^p norm with the alpha = -1/2 measure dx / ((2 pi)^{d/2} sqrt(pi/2)) by the midpoint rule.
double classical_lp_norm(const CosineGrid& grid, const ClassicalState& s, double p);

/// ||u_main - u_oracle||_2 / ||u_oracle||_2 on the cosine grid nodes, the main
/// state synthesized at the oracle radii.
double relative_l2_gap(const VelocityState& main, const CosineGrid& grid, const ClassicalState& oracle);

}  // namespace wns
