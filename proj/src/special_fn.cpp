#include "wns/special_fn.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wns {

BesselOrder::BesselOrder(double alpha, bool allow_classical) : alpha_(alpha) {
    if (!std::isfinite(alpha) || alpha < -0.5 || (alpha == -0.5 && !allow_classical)) {
        throw std::invalid_argument("Bessel order must satisfy alpha > -1/2 (got " +
                                    std::to_string(alpha) + ")");
    }
}

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_gamma(double x) {
    // valid for x >= 0.5
    x -= 1.0;
    double a = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (x + double(i));
    const double t = x + kLanczosG + 0.5;
    // split the power so that t^(x+1/2) does not overflow before e^-t is applied
    const double half = std::pow(t, 0.5 * (x + 0.5));
    return std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-t)) * a;
}

// Power series in extended precision with compensated summation; the terms
// grow to ~e^{|xi|} before cancelling, so double accumulation would lose
// about four digits near the switch point.
double bessel_series(double alpha, double xi) {
    using ld = long double;
    const ld q = -0.25L * ld(xi) * ld(xi);
    ld term = 1.0L;
    ld sum = 1.0L;
    ld comp = 0.0L;
    for (int n = 1; n < 500; ++n) {
        term *= q / (ld(n) * (ld(n) + ld(alpha)));
        const ld y = term - comp;
        const ld s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        if (std::abs(term) < 1e-22L * std::max(1.0L, std::abs(sum)) && double(n) > 0.5 * std::abs(xi)) break;
    }
    return double(sum);
}

// J_nu(x) for x > 0 and nu > -1 via the standard library; negative orders by
// one step of the three-term recurrence.
double bessel_J(double nu, double x) {
    if (nu >= 0.0) return std::cyl_bessel_j(nu, x);
    const double j1 = std::cyl_bessel_j(nu + 1.0, x);
    const double j2 = std::cyl_bessel_j(nu + 2.0, x);
    return 2.0 * (nu + 1.0) / x * j1 - j2;
}

constexpr double kSeriesSwitch = 12.0;

// Jacobi polynomial P_n^{(a,b)}(x) and P_{n-1}^{(a,b)}(x).
std::pair<double, double> jacobi_pair(std::size_t n, double a, double b, double x) {
    double p0 = 1.0;
    if (n == 0) return {p0, 0.0};
    double p1 = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
    for (std::size_t k = 2; k <= n; ++k) {
        const double kk = double(k);
        const double s = 2.0 * kk + a + b;
        const double c1 = 2.0 * kk * (kk + a + b) * (s - 2.0);
        const double c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        const double c3 = 2.0 * (kk + a - 1.0) * (kk + b - 1.0) * s;
        const double p2 = (c2 * p1 - c3 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    return {p1, p0};
}

double jacobi_derivative(std::size_t n, double a, double b, double x, double pn, double pnm1) {
    const double nn = double(n);
    const double s = 2.0 * nn + a + b;
    return (nn * ((a - b) - s * x) * pn + 2.0 * (nn + a) * (nn + b) * pnm1) /
           (s * (1.0 - x * x));
}

}  // namespace

double gamma_fn(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::domain_error("gamma_fn requires a positive finite argument");
    }
    if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
    return lanczos_gamma(x);
}

double normalized_bessel_j(double alpha, double xi) {
    const double ax = std::abs(xi);
    if (alpha == -0.5) return std::cos(ax);
    if (ax < kSeriesSwitch) return bessel_series(alpha, ax);
    // j_alpha(x) = Gamma(alpha+1) (2/x)^alpha J_alpha(x)
    const double logpref = std::lgamma(alpha + 1.0) + alpha * std::log(2.0 / ax);
    return std::exp(logpref) * bessel_J(alpha, ax);
}

double normalized_bessel_j(const BesselOrder& order, double xi) {
    return normalized_bessel_j(order.value(), xi);
}

GaussRule gauss_jacobi_rule(std::size_t n, double a, double b) {
    if (n == 0) throw std::invalid_argument("Gauss-Jacobi rule needs at least one node");
    if (!(a > -1.0) || !(b > -1.0)) throw std::invalid_argument("Jacobi exponents must exceed -1");

    // Jacobi matrix of the monic recurrence (Golub-Welsch) for initial nodes.
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(n > 1 ? n - 1 : 1);
    const double ab = a + b;
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = double(k);
        const double s = 2.0 * kk + ab;
        if (k == 0) {
            diag[0] = (b - a) / (ab + 2.0);
        } else {
            diag[k] = (b * b - a * a) / (s * (s + 2.0));
        }
        if (k + 1 < n) {
            const double m = kk + 1.0;
            const double sm = 2.0 * m + ab;
            double v;
            if (m == 1.0) {
                v = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
            } else {
                v = 4.0 * m * (m + a) * (m + b) * (m + ab) / (sm * sm * (sm + 1.0) * (sm - 1.0));
            }
            sub[k] = std::sqrt(v);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub.head(n > 1 ? n - 1 : 0), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = solver.eigenvalues();

    const double log_const = (ab + 1.0) * std::log(2.0) + std::lgamma(double(n) + a + 1.0) +
                             std::lgamma(double(n) + b + 1.0) - std::lgamma(double(n) + ab + 1.0) -
                             std::lgamma(double(n) + 1.0);
    const double cn = std::exp(log_const);

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = std::clamp(ev[Eigen::Index(i)], -1.0 + 1e-300, 1.0 - 1e-300);
        double dp = 1.0;
        for (int it = 0; it < 8; ++it) {
            auto [pn, pnm1] = jacobi_pair(n, a, b, x);
            dp = jacobi_derivative(n, a, b, x, pn, pnm1);
            const double step = pn / dp;
            x -= step;
            if (std::abs(step) < 1e-16 * std::max(1e-3, std::abs(x))) break;
        }
        auto [pn, pnm1] = jacobi_pair(n, a, b, x);
        dp = jacobi_derivative(n, a, b, x, pn, pnm1);
        rule.nodes[i] = x;
        rule.weights[i] = cn / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

double sine_power_integral(double alpha) {
    return std::sqrt(std::numbers::pi) * std::exp(std::lgamma(alpha + 0.5) - std::lgamma(alpha + 1.0));
}

JacobiQuadrature gauss_jacobi(const BesselOrder& order, std::size_t n) {
    const double alpha = order.value();
    if (order.is_classical()) {
        throw std::invalid_argument("the (sin theta)^{2 alpha} rule requires alpha > -1/2");
    }
    // With c = cos(theta): (sin theta)^{2 alpha} d theta = (1 - c^2)^{alpha - 1/2} dc.
    GaussRule r = gauss_jacobi_rule(n, alpha - 0.5, alpha - 0.5);
    // the weight is even in c: enforce exact mirror symmetry
    for (std::size_t i = 0; i < n / 2; ++i) {
        const std::size_t j = n - 1 - i;
        const double x = 0.5 * (r.nodes[j] - r.nodes[i]);
        const double w = 0.5 * (r.weights[i] + r.weights[j]);
        r.nodes[i] = -x;
        r.nodes[j] = x;
        r.weights[i] = r.weights[j] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    JacobiQuadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // reverse so that angles ascend
        q.nodes[i] = std::acos(r.nodes[n - 1 - i]);
        q.weights[i] = r.weights[n - 1 - i];
    }
    return q;
}

}  // namespace wns
