#include "wns/translation.hpp"

#include "wns/special_fn.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace wns {

namespace {

void check_point(const GridSpec& g, std::span<const double> x, const char* what) {
    if (int(x.size()) != g.d + 1) throw std::invalid_argument(std::string(what) + " must have d+1 coordinates");
    if (x.back() < 0.0) throw std::invalid_argument(std::string(what) + " must have a non-negative last coordinate");
}

double radius(double a, double b, double c) {
    // sqrt(a^2 + b^2 + 2ab c) without cancellation going negative
    return std::sqrt(std::max(0.0, a * a + b * b + 2.0 * a * b * c));
}

std::size_t theta_nodes(double band, double a, double b, std::size_t extra) {
    return std::size_t(std::ceil(0.5 * band * (a + b))) + extra;
}

// (a_alpha / 2) w_theta, summing to one.
std::vector<double> normalized_weights(const JacobiQuadrature& q, double alpha) {
    std::vector<double> w = q.weights;
    const double half = 0.5 * translation_constant(alpha);
    for (auto& v : w) v *= half;
    return w;
}

struct ThetaRule {
    JacobiQuadrature q;
    std::vector<double> w;
};

// pointwise translation is called in loops with few distinct node counts
const ThetaRule& cached_rule(double alpha, std::size_t n) {
    thread_local std::map<std::pair<double, std::size_t>, ThetaRule> cache;
    auto it = cache.find({alpha, n});
    if (it == cache.end()) {
        ThetaRule r;
        r.q = gauss_jacobi(BesselOrder(alpha), n);
        r.w = normalized_weights(r.q, alpha);
        it = cache.emplace(std::make_pair(alpha, n), std::move(r)).first;
    }
    return it->second;
}

}  // namespace

double translation_constant(double alpha) { return 2.0 / sine_power_integral(alpha); }

cplx weinstein_kernel(double alpha, std::span<const double> x, std::span<const double> lambda) {
    if (x.size() != lambda.size() || x.empty()) throw std::invalid_argument("kernel arguments differ in dimension");
    double phase = 0.0;
    for (std::size_t a = 0; a + 1 < x.size(); ++a) phase += x[a] * lambda[a];
    return std::polar(1.0, -phase) * normalized_bessel_j(alpha, x.back() * lambda.back());
}

cplx translate_at(const PointFunction& f, double alpha, std::span<const double> x, std::span<const double> y,
                  double band_hint, std::size_t n_theta) {
    if (x.size() != y.size() || x.empty()) throw std::invalid_argument("translation points differ in dimension");
    if (x.back() < 0.0 || y.back() < 0.0) throw std::invalid_argument("translation points need x_{d+1} >= 0");
    if (n_theta == 0) n_theta = theta_nodes(band_hint, x.back(), y.back(), 32);
    const auto& [q, w] = cached_rule(alpha, n_theta);
    std::vector<double> z(x.size());
    for (std::size_t a = 0; a + 1 < x.size(); ++a) z[a] = x[a] + y[a];
    cplx sum = 0.0;
    for (std::size_t k = 0; k < n_theta; ++k) {
        z.back() = radius(x.back(), y.back(), std::cos(q.nodes[k]));
        sum += w[k] * f(z);
    }
    return sum;
}

PhysicalField translate(const PhysicalField& f, std::span<const double> x) {
    const GridSpec& g = f.grid();
    check_point(g, x, "translation point");
    const BesselOrder order(g.alpha);
    auto plan = TransformPlan::get(g);

    SpectralField F = plan->forward(f);
    const std::size_t nl = std::size_t(g.N_lambda);
    const std::size_t N = std::size_t(g.N);
    for (std::size_t p = 0; p < g.fourier_size(); ++p) {
        std::size_t rem = p;
        double phase = 0.0;
        for (int a = g.d - 1; a >= 0; --a) {
            phase += x[std::size_t(a)] * g.fourier_frequency(int(rem % N));
            rem /= N;
        }
        const cplx shift = std::polar(1.0, phase);
        for (std::size_t m = 0; m < nl; ++m) F[p * nl + m] *= shift;
    }
    const std::vector<cplx> G = plan->fourier_inverse(F);

    const auto& yr = plan->radial().nodes;
    const std::size_t nr = yr.size();
    const std::size_t nt = theta_nodes(g.Lambda_max, x.back(), g.R_max, 24);
    const auto q = gauss_jacobi(order, nt);
    const auto w = normalized_weights(q, g.alpha);
    // K(j, m): theta-averaged synthesis row at radius rho(x_r, y_j, theta)
    std::vector<double> K(nr * nl, 0.0);
    for (std::size_t j = 0; j < nr; ++j) {
        for (std::size_t k = 0; k < nt; ++k) {
            const auto row = plan->synthesis_row(radius(x.back(), yr[j], std::cos(q.nodes[k])));
            for (std::size_t m = 0; m < nl; ++m) K[j * nl + m] += w[k] * row[m];
        }
    }
    PhysicalField out(g);
    for (std::size_t p = 0; p < g.fourier_size(); ++p)
        for (std::size_t j = 0; j < nr; ++j) {
            cplx s = 0.0;
            for (std::size_t m = 0; m < nl; ++m) s += G[p * nl + m] * K[j * nl + m];
            out[p * nr + j] = s.real();
        }
    return out;
}

double product_formula_defect(double alpha, std::span<const double> x, std::span<const double> y,
                              std::span<const double> lambda) {
    if (x.size() != lambda.size()) throw std::invalid_argument("frequency has the wrong dimension");
    const cplx lhs = weinstein_kernel(alpha, x, lambda) * weinstein_kernel(alpha, y, lambda);
    const PointFunction psi = [&](std::span<const double> z) { return weinstein_kernel(alpha, z, lambda); };
    const cplx rhs = translate_at(psi, alpha, x, y, std::abs(lambda.back()));
    return std::abs(lhs - rhs);
}

namespace {

PhysicalField convolve_direct(const PhysicalField& f, const PhysicalField& h) {
    const GridSpec& g = f.grid();
    const BesselOrder order(g.alpha);
    auto plan = TransformPlan::get(g);
    const std::size_t nf = g.fourier_size();
    const std::size_t nr = std::size_t(g.N_r);
    const std::size_t nl = std::size_t(g.N_lambda);
    const std::size_t N = std::size_t(g.N);
    const auto& r = plan->radial().nodes;

    // radial coefficients of f at every periodic node
    std::vector<cplx> fv(f.values().begin(), f.values().end());
    const std::vector<cplx> A = plan->radial_forward(fv);

    // Kjl[m] = (a/2) sum_theta w c omega_m j(lambda_m rho(r_j, r_l, theta))
    const std::size_t nt = theta_nodes(g.Lambda_max, g.R_max, g.R_max, 24);
    const auto q = gauss_jacobi(order, nt);
    const auto w = normalized_weights(q, g.alpha);
    std::vector<double> K(nr * nr * nl, 0.0);
    for (std::size_t j = 0; j < nr; ++j)
        for (std::size_t l = j; l < nr; ++l) {
            double* kjl = &K[(j * nr + l) * nl];
            for (std::size_t k = 0; k < nt; ++k) {
                const auto row = plan->synthesis_row(radius(r[j], r[l], std::cos(q.nodes[k])));
                for (std::size_t m = 0; m < nl; ++m) kjl[m] += w[k] * row[m];
            }
            if (l != j) std::copy(kjl, kjl + nl, &K[(l * nr + j) * nl]);
        }

    // B[p][j][l] = f(z'_p, rho) averaged over theta
    std::vector<cplx> B(nf * nr * nr);
    for (std::size_t p = 0; p < nf; ++p)
        for (std::size_t j = 0; j < nr; ++j)
            for (std::size_t l = 0; l < nr; ++l) {
                const double* kjl = &K[(j * nr + l) * nl];
                cplx s = 0.0;
                for (std::size_t m = 0; m < nl; ++m) s += A[p * nl + m] * kjl[m];
                B[(p * nr + j) * nr + l] = s;
            }

    const auto mw = measure_weights(g);
    std::vector<double> wg(g.physical_size());
    for (std::size_t i = 0; i < wg.size(); ++i) wg[i] = mw[i] * h[i];

    auto decode = [&](std::size_t p) {
        std::vector<std::size_t> idx(std::size_t(g.d));
        for (int a = g.d - 1; a >= 0; --a) {
            idx[std::size_t(a)] = p % N;
            p /= N;
        }
        return idx;
    };
    // position index of x' - y' for x' at index i and y' at index k
    auto difference = [&](const std::vector<std::size_t>& i, const std::vector<std::size_t>& k) {
        std::size_t p = 0;
        for (int a = 0; a < g.d; ++a)
            p = p * N + (i[std::size_t(a)] + N + N / 2 - k[std::size_t(a)]) % N;
        return p;
    };

    PhysicalField out(g);
    for (std::size_t pi = 0; pi < nf; ++pi) {
        const auto ii = decode(pi);
        for (std::size_t pk = 0; pk < nf; ++pk) {
            const std::size_t pd = difference(ii, decode(pk));
            for (std::size_t j = 0; j < nr; ++j) {
                const cplx* b = &B[(pd * nr + j) * nr];
                const double* wk = &wg[pk * nr];
                cplx s = 0.0;
                for (std::size_t l = 0; l < nr; ++l) s += b[l] * wk[l];
                out[pi * nr + j] += s.real();
            }
        }
    }
    return out;
}

}  // namespace

PhysicalField convolve(const PhysicalField& f, const PhysicalField& g, ConvolutionMethod method) {
    if (!(f.grid() == g.grid())) throw std::invalid_argument("convolution operands on different grids");
    if (method == ConvolutionMethod::direct) return convolve_direct(f, g);
    auto plan = TransformPlan::get(f.grid());
    SpectralField F = plan->forward(f);
    const SpectralField G = plan->forward(g);
    for (std::size_t i = 0; i < F.size(); ++i) F[i] *= G[i];
    return plan->inverse(F);
}

}  // namespace wns
