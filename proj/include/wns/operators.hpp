// Spectral multipliers of the Weinstein calculus: Laplacian, gradient,
// divergence, heat semigroup and the Leray projector. Every operator acts on
// Weinstein coefficients, where it is a per-node multiplication.

#pragma once

#include "wns/grid.hpp"
#include "wns/transform.hpp"

#include <Eigen/Core>

#include <memory>
#include <span>
#include <vector>

namespace wns {

using SpectralVector = std::vector<SpectralField>;

/// Frequency vector lambda = (lambda_1, ..., lambda_{d+1}) at every spectral node.
class FrequencyGrid {
public:
    explicit FrequencyGrid(const GridSpec& grid);
    static std::shared_ptr<const FrequencyGrid> get(const GridSpec& grid);

    const GridSpec& grid() const { return grid_; }
    /// lambda_j over all nodes, j = 0..d (j = d is the radial frequency).
    std::span<const double> component(int j) const { return lambda_[std::size_t(j)]; }
    std::span<const double> norm2() const { return norm2_; }
    /// Per-node dealiasing mask: 2/3 rule on Fourier axes, radial frequencies
    /// above 2/3 Lambda_max removed.
    std::span<const unsigned char> dealias_mask() const { return mask_; }

private:
    GridSpec grid_;
    std::vector<std::vector<double>> lambda_;
    std::vector<double> norm2_;
    std::vector<unsigned char> mask_;
};

SpectralField laplacian(const SpectralField& F);

/// Components i lambda_j F.
SpectralVector gradient_w(const SpectralField& F);

/// sum_j i lambda_j V_j.
SpectralField div_w(const SpectralVector& V);

/// e^{-nu t |lambda|^2} F. Throws std::invalid_argument for t < 0 or nu <= 0.
SpectralField heat_semigroup(const SpectralField& F, double nu, double t);
SpectralVector heat_semigroup(const SpectralVector& V, double nu, double t);

/// M(xi) = I - xi xi^T / |xi|^2, identity at xi = 0.
Eigen::MatrixXd leray_matrix(std::span<const double> xi);

SpectralVector leray_project(const SpectralVector& V);

/// Zero the coefficients outside the dealiasing mask.
void dealias(SpectralField& F);

/// Real-form velocity state <-> true Weinstein coefficients of u.
/// The last component is stored as u_{d+1}/i, so its coefficients are i F(w).
SpectralVector to_spectral(const VelocityState& u, const TransformPlan& plan);
VelocityState to_velocity(const SpectralVector& U, const TransformPlan& plan, double t);

/// L^2_alpha norm of div_w(u), evaluated through Plancherel on the spectral side.
double divergence_norm(const SpectralVector& U);
double divergence_norm(const VelocityState& u);

/// Coefficient-space helpers for vector fields.
SpectralVector zeros(const GridSpec& grid, int components);
SpectralVector axpy(cplx a, const SpectralVector& x, const SpectralVector& y);  // a x + y
/// Weighted spectral L^2 norm of the Euclidean magnitude.
double spectral_l2_norm(const SpectralVector& V);

}  // namespace wns
