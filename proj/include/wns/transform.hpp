// Forward and inverse Weinstein transform
//   F(f)(lambda) = int f(x) exp(-i <x', lambda'>) j_alpha(lambda_{d+1} x_{d+1}) d mu(x),
// discretized as an FFT over the periodic axes times a dense Hankel-type
// matrix over the radial axis.

#pragma once

#include "wns/grid.hpp"

#include <Eigen/Core>

#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace wns {

class TransformPlan {
public:
    explicit TransformPlan(const GridSpec& grid);
    ~TransformPlan();
    TransformPlan(const TransformPlan&) = delete;
    TransformPlan& operator=(const TransformPlan&) = delete;

    /// Shared plan for a grid; built once and cached process-wide.
    static std::shared_ptr<const TransformPlan> get(const GridSpec& grid);

    const GridSpec& grid() const { return grid_; }
    const RadialQuadrature& radial() const { return radial_; }
    const RadialQuadrature& frequencies() const { return freq_; }

    /// hankel_fwd(m, j) = c_alpha w_r(x_j) j_alpha(lambda_m x_j), with
    /// c_alpha = 1 / (2^alpha Gamma(alpha+1)).
    const Eigen::MatrixXd& hankel_fwd() const { return fwd_; }
    /// hankel_inv(j, m) = c_alpha w_lambda(lambda_m) j_alpha(lambda_m x_j).
    const Eigen::MatrixXd& hankel_inv() const { return inv_; }

    SpectralField forward(const PhysicalField& f) const;
    /// Complex-valued physical data in the physical layout.
    SpectralField forward(std::span<const cplx> values) const;

    /// Real part of the inverse transform.
    PhysicalField inverse(const SpectralField& F) const;
    std::vector<cplx> inverse_values(const SpectralField& F) const;

    /// Inverse transform evaluated on the Fourier grid times arbitrary radii
    /// (layout: fourier index major, radius fastest). Radii beyond R_max are
    /// still synthesized; callers decide about truncation.
    std::vector<cplx> synthesize(const SpectralField& F, std::span<const double> radii) const;

    /// Row c_alpha w_lambda(lambda_m) j_alpha(lambda_m r) for radial synthesis at r.
    std::vector<double> synthesis_row(double r) const;

    /// Inverse transform over the periodic axes only, keeping the radial
    /// frequency index: result layout fourier index x N_lambda.
    std::vector<cplx> fourier_inverse(const SpectralField& F) const;

    /// Radial-only forward transform (no FFT): fourier index x N_lambda.
    std::vector<cplx> radial_forward(std::span<const cplx> values) const;

private:
    void fft(std::vector<cplx>& data, int sign) const;

    GridSpec grid_;
    RadialQuadrature radial_;
    RadialQuadrature freq_;
    Eigen::MatrixXd fwd_;
    Eigen::MatrixXd inv_;
    Eigen::MatrixXcd fwd_c_;
    Eigen::MatrixXcd inv_c_;
    std::vector<double> phase_;  // (-1)^{sum m} per fourier index
    double fwd_scale_ = 1.0;
    double inv_scale_ = 1.0;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
};

SpectralField forward(const PhysicalField& f, const TransformPlan& plan);
PhysicalField inverse(const SpectralField& F, const TransformPlan& plan);

/// |‖f‖²_{α,2} − ‖F f‖²_{α,2}| / ‖f‖²_{α,2}; zero for the zero field.
double plancherel_defect(const PhysicalField& f, const TransformPlan& plan);

/// Weighted spectral-side L^p norm of |F|.
double spectral_lp_norm(const SpectralField& F, double p);

}  // namespace wns
