// Weinstein translation
//   T_x f(y) = (a_alpha / 2) int_0^pi f(x' + y', sqrt(x_r^2 + y_r^2 + 2 x_r y_r cos t)) sin^{2 alpha} t dt,
// with a_alpha = 2 Gamma(alpha+1) / (sqrt(pi) Gamma(alpha+1/2)), and the
// Weinstein convolution, by quadrature and through the transform.

#pragma once

#include "wns/grid.hpp"
#include "wns/transform.hpp"

#include <functional>
#include <span>

namespace wns {

/// 2 Gamma(alpha+1) / (sqrt(pi) Gamma(alpha+1/2)); makes T_x 1 = 1.
double translation_constant(double alpha);

/// Psi(x, lambda) = exp(-i <x', lambda'>) j_alpha(lambda_{d+1} x_{d+1}).
cplx weinstein_kernel(double alpha, std::span<const double> x, std::span<const double> lambda);

using PointFunction = std::function<cplx(std::span<const double>)>;

/// T_x f(y) for a function given pointwise. n_theta = 0 picks a node count
/// from band_hint * (x_r + y_r).
cplx translate_at(const PointFunction& f, double alpha, std::span<const double> x, std::span<const double> y,
                  double band_hint = 0.0, std::size_t n_theta = 0);

/// T_x f on the grid nodes. Off-grid values of f come from spectral synthesis:
/// a phase shift on the periodic axes (which wrap around the box) and the
/// j_alpha series on the radial axis. Throws for x_{d+1} < 0 or a wrong
/// dimension.
PhysicalField translate(const PhysicalField& f, std::span<const double> x);

/// |Psi(x,lambda) Psi(y,lambda) - T_x[Psi(., lambda)](y)|, the translation
/// evaluated by theta-quadrature of the exact eigenfunction.
double product_formula_defect(double alpha, std::span<const double> x, std::span<const double> y,
                              std::span<const double> lambda);

enum class ConvolutionMethod { spectral, direct };

/// f *_W g (x) = int T_x f(y~) g(y) d mu(y), y~ = (-y', y_{d+1}).
/// spectral: inverse(F f . F g). direct: node-by-node quadrature, O((N^d N_r)^2 N_lambda),
/// intended for small oracle grids only.
PhysicalField convolve(const PhysicalField& f, const PhysicalField& g, ConvolutionMethod method);

}  // namespace wns
