#include "doctest.h"

#include "wns/operators.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace wns;

namespace {

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_abs(const SpectralField& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

SpectralVector random_vector(const GridSpec& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    SpectralVector v = zeros(g, g.d + 1);
    for (auto& c : v)
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = cplx(n(rng), n(rng));
    return v;
}

GridSpec small_grid(double alpha = 0.0) {
    GridSpec g = GridSpec::desk(1, alpha);
    g.N = 32;
    g.L = 4.0 * std::numbers::pi;
    g.N_r = 48;
    g.R_max = 10.0;
    g.N_lambda = 48;
    return g;
}

}  // namespace

TEST_CASE("frequency grid layout") {
    GridSpec g = small_grid();
    g.d = 2;
    g.N = 8;
    g.N_r = 4;
    g.N_lambda = 5;
    FrequencyGrid fg(g);
    const auto fq = frequency_nodes(g);
    // index (i0, i1, m) = ((i0 * N) + i1) * N_lambda + m
    const std::size_t i = ((3 * 8) + 6) * 5 + 2;
    CHECK(fg.component(0)[i] == g.fourier_frequency(3));
    CHECK(fg.component(1)[i] == g.fourier_frequency(6));
    CHECK(fg.component(2)[i] == fq.nodes[2]);
    for (double v : fg.norm2()) CHECK(v >= 0.0);
}

TEST_CASE("laplacian against a physical-space stencil") {
    for (double alpha : {0.0, 0.5, 1.5}) {
        const GridSpec g = GridSpec::desk(1, alpha);
        auto plan = TransformPlan::get(g);
        const double s = 0.5;
        auto E = [&](double x1, double r) { return std::exp(-s * (x1 * x1 + r * r)); };
        const double h = 1e-3;
        // fourth-order central differences of the closed form: d^2/dx1^2 + d^2/dr^2 + (2 alpha + 1)/r d/dr
        const auto lap = sample_field(g, [&](std::span<const double> x) {
            const double a = x[0], r = x[1];
            auto d2 = [&](auto f) {
                return (-f(2 * h) + 16 * f(h) - 30 * f(0.0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h);
            };
            auto d1 = [&](auto f) { return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h); };
            const double fxx = d2([&](double e) { return E(a + e, r); });
            const double frr = d2([&](double e) { return E(a, r + e); });
            const double fr = d1([&](double e) { return E(a, r + e); });
            return fxx + frr + (2 * alpha + 1) / r * fr;
        });
        const auto want = plan->forward(lap);
        const auto got = laplacian(plan->forward(make_test_field(g, Gaussian{s})));
        CHECK(max_abs_diff(got, want) / max_abs(want) <= 1e-4);
    }
}

TEST_CASE("laplacian trivial cases") {
    const GridSpec g = small_grid();
    const auto z = laplacian(SpectralField(g));
    CHECK(max_abs(z) == 0.0);
    SpectralField delta(g);
    const std::size_t node = 5 * std::size_t(g.N_lambda) + 7;
    delta[node] = 2.0;
    const auto out = laplacian(delta);
    CHECK(out[node] == -2.0 * FrequencyGrid(g).norm2()[node]);
}

TEST_CASE("gradient along a Fourier axis is the derivative") {
    const GridSpec g = GridSpec::desk(1, 0.5);
    auto plan = TransformPlan::get(g);
    const double s = 0.5;
    const auto grad = gradient_w(plan->forward(make_test_field(g, Gaussian{s})));
    const auto v = plan->inverse_values(grad[0]);
    const auto want = sample_field(g, [&](std::span<const double> x) {
        return -2.0 * s * x[0] * std::exp(-s * (x[0] * x[0] + x[1] * x[1]));
    });
    double err = 0.0, scale = 0.0, imag = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        err = std::max(err, std::abs(v[i].real() - want[i]));
        scale = std::max(scale, std::abs(want[i]));
        imag = std::max(imag, std::abs(v[i].imag()));
    }
    CHECK(err / scale <= 1e-5);
    CHECK(imag <= 1e-12);
}

TEST_CASE("gradient of a real field has a purely imaginary radial component") {
    const GridSpec g = small_grid(0.5);
    auto plan = TransformPlan::get(g);
    const auto grad = gradient_w(plan->forward(make_test_field(g, BandLimitedRandom{4, 0.0})));
    const auto v = plan->inverse_values(grad[1]);
    double re = 0.0, im = 0.0;
    for (const auto& z : v) {
        re = std::max(re, std::abs(z.real()));
        im = std::max(im, std::abs(z.imag()));
    }
    CHECK(im > 1e-3);
    CHECK(re <= 1e-12 * im);
}

TEST_CASE("divergence of gradient is the laplacian") {
    const GridSpec g = small_grid(1.5);
    auto plan = TransformPlan::get(g);
    const auto F = plan->forward(make_test_field(g, BandLimitedRandom{9, 0.0}));
    const auto a = div_w(gradient_w(F));
    const auto b = laplacian(F);
    CHECK(max_abs_diff(a, b) <= 1e-14 * max_abs(b));
    CHECK(max_abs(div_w(zeros(g, 2))) == 0.0);
    for (const auto& c : gradient_w(SpectralField(g))) CHECK(max_abs(c) == 0.0);
    GridSpec other = g;
    other.N = 16;
    SpectralVector mixed{SpectralField(g), SpectralField(other)};
    CHECK_THROWS_AS(div_w(mixed), std::invalid_argument);
}

TEST_CASE("heat semigroup on a gaussian matches the closed form") {
    for (double alpha : {0.0, 1.5}) {
        const GridSpec g = GridSpec::desk(1, alpha);
        auto plan = TransformPlan::get(g);
        const double s = 0.5, nu = 0.5;
        const auto F = plan->forward(make_test_field(g, Gaussian{s}));
        for (double nut : {0.1, 1.0}) {
            const auto u = plan->inverse(heat_semigroup(F, nu, nut / nu));
            const double k = 1.0 + 4.0 * s * nut;
            const auto want = sample_field(g, [&](std::span<const double> x) {
                return std::pow(k, -(alpha + 1.5)) * std::exp(-s * (x[0] * x[0] + x[1] * x[1]) / k);
            });
            double err = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                err = std::max(err, std::abs(u[i] - want[i]));
                scale = std::max(scale, std::abs(want[i]));
            }
            CHECK(err / scale <= 1e-6);
        }
    }
}

TEST_CASE("heat semigroup algebra") {
    const GridSpec g = small_grid();
    const auto V = random_vector(g, 1);
    const auto& F = V[0];
    CHECK(max_abs_diff(heat_semigroup(F, 0.3, 0.0), F) == 0.0);
    const auto a = heat_semigroup(heat_semigroup(F, 0.3, 0.2), 0.3, 0.5);
    const auto b = heat_semigroup(F, 0.3, 0.7);
    CHECK(max_abs_diff(a, b) <= 1e-14 * max_abs(F));
    for (double t : {0.0, 0.01, 1.0, 50.0}) {
        const auto h = heat_semigroup(F, 0.3, t);
        for (std::size_t i = 0; i < F.size(); ++i) CHECK(std::abs(h[i]) <= std::abs(F[i]));
    }
    CHECK_THROWS_AS(heat_semigroup(F, 0.3, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(heat_semigroup(F, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("heat multiplier inverts to the heat kernel") {
    GridSpec g = GridSpec::desk(1, 0.5);
    g.N = 96;
    g.Lambda_max = 12.0;
    auto plan = TransformPlan::get(g);
    SpectralField one(g);
    for (std::size_t i = 0; i < one.size(); ++i) one[i] = 1.0;
    for (double nut : {0.25, 1.0}) {
        const auto q = plan->inverse(heat_semigroup(one, 1.0, nut));
        const auto want = sample_field(g, [&](std::span<const double> x) {
            return std::pow(2.0 * nut, -(g.alpha + 1.5)) * std::exp(-(x[0] * x[0] + x[1] * x[1]) / (4.0 * nut));
        });
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            err = std::max(err, std::abs(q[i] - want[i]));
            scale = std::max(scale, want[i]);
        }
        CHECK(err / scale <= 1e-6);
    }
}

TEST_CASE("leray matrix entries") {
    const double xi[] = {1.0, 1.0};
    const auto M = leray_matrix(xi);
    CHECK(M(0, 0) == doctest::Approx(0.5));
    CHECK(M(0, 1) == doctest::Approx(-0.5));
    CHECK(M(1, 0) == doctest::Approx(-0.5));
    CHECK(M(1, 1) == doctest::Approx(0.5));
    Eigen::Vector2d v(1.0, 0.0);
    const Eigen::Vector2d pv = M * v;
    CHECK(pv(0) == doctest::Approx(0.5));
    CHECK(pv(1) == doctest::Approx(-0.5));
    const double zero[] = {0.0, 0.0, 0.0};
    CHECK(leray_matrix(zero).isIdentity());
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const double x[] = {n(rng), n(rng), n(rng)};
        const auto P = leray_matrix(x);
        CHECK((P * P - P).norm() < 1e-14);
        CHECK((P - P.transpose()).norm() < 1e-15);
        CHECK((P * Eigen::Vector3d(x[0], x[1], x[2])).norm() < 1e-14);
    }
}

TEST_CASE("leray projection of fields") {
    for (int d : {1, 2}) {
        GridSpec g = small_grid(0.5);
        g.d = d;
        if (d == 2) {
            g.N = 8;
            g.N_lambda = 12;
            g.N_r = 12;
        }
        const auto V = random_vector(g, 17);
        const auto P = leray_project(V);
        const auto PP = leray_project(P);
        double idem = 0.0, scale = 0.0;
        for (std::size_t j = 0; j < P.size(); ++j) {
            idem = std::max(idem, max_abs_diff(PP[j], P[j]));
            scale = std::max(scale, max_abs(P[j]));
        }
        CHECK(idem <= 1e-14 * scale);
        CHECK(spectral_l2_norm(P) <= spectral_l2_norm(V));
        // divergence relative to the size of the gradient that produced it
        const auto dv = div_w(P);
        CHECK(max_abs(dv) <= 1e-10);
        auto plan = TransformPlan::get(g);
        double sup = 0.0;
        for (const auto& z : plan->inverse_values(dv)) sup = std::max(sup, std::abs(z));
        CHECK(sup <= 1e-10);

        const auto grad = gradient_w(V[0]);
        for (const auto& c : leray_project(grad)) CHECK(max_abs(c) <= 1e-10);
    }
}

TEST_CASE("dealias mask") {
    const GridSpec g = small_grid();
    const FrequencyGrid fg(g);
    const auto fq = frequency_nodes(g);
    const auto mask = fg.dealias_mask();
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const std::size_t p = i / std::size_t(g.N_lambda);
        const int m = int(p) < g.N / 2 ? int(p) : int(p) - g.N;
        const bool want = std::abs(m) <= g.N / 3 && fq.nodes[i % std::size_t(g.N_lambda)] <= 2.0 * g.Lambda_max / 3.0;
        CHECK(bool(mask[i]) == want);
    }
    auto V = random_vector(g, 2);
    dealias(V[0]);
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (!mask[i]) CHECK(V[0][i] == cplx(0.0));
}

TEST_CASE("velocity state conversion round trip") {
    const GridSpec g = GridSpec::desk(1, 0.5);
    auto plan = TransformPlan::get(g);
    VelocityState u;
    u.components.push_back(make_test_field(g, BandLimitedRandom{1, 0.0}));
    u.components.push_back(make_test_field(g, BandLimitedRandom{2, 0.0}));
    const auto U = to_spectral(u, *plan);
    const auto back = to_velocity(U, *plan, 0.5);
    CHECK(back.t == 0.5);
    for (std::size_t j = 0; j < 2; ++j) {
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < u.components[j].size(); ++i) {
            err = std::max(err, std::abs(back.components[j][i] - u.components[j][i]));
            scale = std::max(scale, std::abs(u.components[j][i]));
        }
        CHECK(err <= 1e-8 * scale);
    }
    // smooth divergence-free data: U = (lambda_2, -lambda_1) Phi with Phi away from lambda_2 = 0
    const auto fg = FrequencyGrid::get(g);
    SpectralVector W = zeros(g, 2);
    for (std::size_t i = 0; i < W[0].size(); ++i) {
        const double l1 = fg->component(0)[i], l2 = fg->component(1)[i];
        const double phi = std::exp(-l1 * l1 / 2.0 - (l2 - 4.5) * (l2 - 4.5) / 0.6);
        W[0][i] = l2 * phi;
        W[1][i] = -l1 * phi;
    }
    const auto w = to_velocity(W, *plan, 0.0);
    CHECK(w.div_norm <= 1e-13 * spectral_l2_norm(W));
    CHECK(divergence_norm(w) <= 1e-8 * lp_norm(w, 2.0));
}
