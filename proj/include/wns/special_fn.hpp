// Scalar special functions: Gamma, the normalized Bessel function j_alpha and
// Gauss-Jacobi quadrature.

#pragma once

#include <cstddef>
#include <vector>

namespace wns {

/// Order of the normalized Bessel function. The harmonic analysis requires
/// alpha > -1/2; alpha = -1/2 (j = cos) is admitted only when explicitly
/// requested, which is how the classical reduction is exercised.
class BesselOrder {
public:
    explicit BesselOrder(double alpha, bool allow_classical = false);

    double value() const { return alpha_; }
    bool is_classical() const { return alpha_ == -0.5; }

private:
    double alpha_;
};

/// Gamma function for x > 0 (Lanczos, g = 7). Throws std::domain_error for
/// x <= 0 or non-finite x.
double gamma_fn(double x);

/// j_alpha(xi) = Gamma(alpha+1) sum_n (-1)^n / (n! Gamma(n+alpha+1)) (xi/2)^{2n}.
/// Kahan-summed power series for |xi| < 12, J_alpha based evaluation above.
/// Even in xi by construction.
double normalized_bessel_j(const BesselOrder& order, double xi);

/// Unchecked variant for hot loops; alpha must already be validated.
double normalized_bessel_j(double alpha, double xi);

/// Gauss rule on [-1, 1] for the weight (1-t)^a (1+t)^b, a, b > -1.
struct GaussRule {
    std::vector<double> nodes;    // ascending
    std::vector<double> weights;  // positive
};

/// n-point Gauss-Jacobi rule. Nodes from the Jacobi matrix eigenvalues,
/// polished by Newton iteration on P_n^{(a,b)}; weights from the derivative
/// formula. Throws std::invalid_argument for n == 0 or a, b <= -1.
GaussRule gauss_jacobi_rule(std::size_t n, double a, double b);

/// Quadrature on (0, pi) for the weight (sin theta)^{2 alpha} d theta.
struct JacobiQuadrature {
    std::vector<double> nodes;    // angles in (0, pi), ascending
    std::vector<double> weights;  // positive, sum = sqrt(pi) Gamma(alpha+1/2) / Gamma(alpha+1)
};

/// n-point rule exact for polynomials in cos(theta) of degree <= 2n-1 against
/// (sin theta)^{2 alpha}. Requires alpha > -1/2.
JacobiQuadrature gauss_jacobi(const BesselOrder& order, std::size_t n);

/// Closed form of the integral of (sin theta)^{2 alpha} over (0, pi).
double sine_power_integral(double alpha);

}  // namespace wns
