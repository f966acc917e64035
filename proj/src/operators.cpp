#include "wns/operators.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace wns {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_same_grid(const SpectralVector& V) {
    if (V.empty()) throw std::invalid_argument("empty vector field");
    for (const auto& c : V)
        if (!(c.grid() == V.front().grid())) throw std::invalid_argument("vector components on different grids");
}

}  // namespace

FrequencyGrid::FrequencyGrid(const GridSpec& grid) : grid_(grid) {
    grid_.validate();
    const auto fq = frequency_nodes(grid_);
    const std::size_t n = grid_.spectral_size();
    const std::size_t nl = std::size_t(grid_.N_lambda);
    const std::size_t N = std::size_t(grid_.N);
    lambda_.assign(std::size_t(grid_.d) + 1, std::vector<double>(n));
    norm2_.assign(n, 0.0);
    mask_.assign(n, 1);
    const int fourier_keep = grid_.N / 3;
    const double radial_keep = 2.0 * grid_.Lambda_max / 3.0;
    for (std::size_t p = 0; p < grid_.fourier_size(); ++p) {
        // axis d-1 varies fastest
        std::size_t rem = p;
        std::vector<int> idx(std::size_t(grid_.d));
        for (int a = grid_.d - 1; a >= 0; --a) {
            idx[std::size_t(a)] = int(rem % N);
            rem /= N;
        }
        bool keep = true;
        double k2 = 0.0;
        for (int a = 0; a < grid_.d; ++a) {
            const int m = idx[std::size_t(a)];
            const int signed_m = m < grid_.N / 2 ? m : m - grid_.N;
            if (std::abs(signed_m) > fourier_keep) keep = false;
            const double k = grid_.fourier_frequency(m);
            for (std::size_t r = 0; r < nl; ++r) lambda_[std::size_t(a)][p * nl + r] = k;
            k2 += k * k;
        }
        for (std::size_t r = 0; r < nl; ++r) {
            const double lr = fq.nodes[r];
            lambda_[std::size_t(grid_.d)][p * nl + r] = lr;
            norm2_[p * nl + r] = k2 + lr * lr;
            mask_[p * nl + r] = (keep && lr <= radial_keep) ? 1 : 0;
        }
    }
}

std::shared_ptr<const FrequencyGrid> FrequencyGrid::get(const GridSpec& grid) {
    static std::mutex m;
    static std::map<std::tuple<int, double, double, int, double, int, double, int, bool>,
                    std::shared_ptr<const FrequencyGrid>>
        cache;
    const auto key = std::make_tuple(grid.d, grid.alpha, grid.L, grid.N, grid.R_max, grid.N_r,
                                     grid.Lambda_max, grid.N_lambda, grid.classical_limit);
    std::lock_guard lock(m);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto fg = std::make_shared<const FrequencyGrid>(grid);
    cache.emplace(key, fg);
    return fg;
}

SpectralField laplacian(const SpectralField& F) {
    const auto fg = FrequencyGrid::get(F.grid());
    SpectralField out = F;
    const auto n2 = fg->norm2();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= -n2[i];
    return out;
}

SpectralVector gradient_w(const SpectralField& F) {
    const auto fg = FrequencyGrid::get(F.grid());
    SpectralVector out;
    for (int j = 0; j <= F.grid().d; ++j) {
        SpectralField c = F;
        const auto l = fg->component(j);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] *= kI * l[i];
        out.push_back(std::move(c));
    }
    return out;
}

SpectralField div_w(const SpectralVector& V) {
    require_same_grid(V);
    const GridSpec& g = V.front().grid();
    if (int(V.size()) != g.d + 1) throw std::invalid_argument("divergence needs d+1 components");
    const auto fg = FrequencyGrid::get(g);
    SpectralField out(g);
    for (int j = 0; j <= g.d; ++j) {
        const auto l = fg->component(j);
        const auto& v = V[std::size_t(j)];
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += kI * l[i] * v[i];
    }
    return out;
}

SpectralField heat_semigroup(const SpectralField& F, double nu, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("heat semigroup needs t >= 0");
    if (!(nu > 0.0)) throw std::invalid_argument("heat semigroup needs nu > 0");
    const auto fg = FrequencyGrid::get(F.grid());
    SpectralField out = F;
    if (t == 0.0) return out;
    const auto n2 = fg->norm2();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::exp(-nu * t * n2[i]);
    return out;
}

SpectralVector heat_semigroup(const SpectralVector& V, double nu, double t) {
    SpectralVector out;
    out.reserve(V.size());
    for (const auto& c : V) out.push_back(heat_semigroup(c, nu, t));
    return out;
}

Eigen::MatrixXd leray_matrix(std::span<const double> xi) {
    const auto n = Eigen::Index(xi.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
    double n2 = 0.0;
    for (double v : xi) n2 += v * v;
    if (n2 == 0.0) return M;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) M(i, j) -= xi[std::size_t(i)] * xi[std::size_t(j)] / n2;
    return M;
}

SpectralVector leray_project(const SpectralVector& V) {
    require_same_grid(V);
    const GridSpec& g = V.front().grid();
    const int nc = g.d + 1;
    if (int(V.size()) != nc) throw std::invalid_argument("Leray projection needs d+1 components");
    const auto fg = FrequencyGrid::get(g);
    const auto n2 = fg->norm2();
    SpectralVector out = V;
    std::vector<std::span<const double>> lam;
    for (int j = 0; j < nc; ++j) lam.push_back(fg->component(j));
    for (std::size_t i = 0; i < n2.size(); ++i) {
        if (n2[i] == 0.0) continue;
        // V - xi (xi . V) / |xi|^2
        cplx dot = 0.0;
        for (int j = 0; j < nc; ++j) dot += lam[std::size_t(j)][i] * V[std::size_t(j)][i];
        dot /= n2[i];
        for (int j = 0; j < nc; ++j) out[std::size_t(j)][i] -= lam[std::size_t(j)][i] * dot;
    }
    return out;
}

void dealias(SpectralField& F) {
    const auto fg = FrequencyGrid::get(F.grid());
    const auto mask = fg->dealias_mask();
    for (std::size_t i = 0; i < F.size(); ++i)
        if (!mask[i]) F[i] = 0.0;
}

SpectralVector to_spectral(const VelocityState& u, const TransformPlan& plan) {
    const GridSpec& g = plan.grid();
    if (int(u.components.size()) != g.d + 1) throw std::invalid_argument("velocity needs d+1 components");
    SpectralVector out;
    for (int j = 0; j <= g.d; ++j) {
        SpectralField c = plan.forward(u.components[std::size_t(j)]);
        if (j == g.d) c *= kI;
        out.push_back(std::move(c));
    }
    return out;
}

VelocityState to_velocity(const SpectralVector& U, const TransformPlan& plan, double t) {
    const GridSpec& g = plan.grid();
    if (int(U.size()) != g.d + 1) throw std::invalid_argument("velocity needs d+1 components");
    VelocityState u;
    u.t = t;
    for (int j = 0; j <= g.d; ++j) {
        const auto v = plan.inverse_values(U[std::size_t(j)]);
        std::vector<double> re(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) re[i] = (j == g.d) ? v[i].imag() : v[i].real();
        u.components.emplace_back(g, std::move(re));
    }
    u.div_norm = divergence_norm(U);
    return u;
}

double divergence_norm(const SpectralVector& U) { return spectral_lp_norm(div_w(U), 2.0); }

double divergence_norm(const VelocityState& u) {
    return divergence_norm(to_spectral(u, *TransformPlan::get(u.grid())));
}

SpectralVector zeros(const GridSpec& grid, int components) {
    return SpectralVector(std::size_t(components), SpectralField(grid));
}

SpectralVector axpy(cplx a, const SpectralVector& x, const SpectralVector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("vector size mismatch");
    SpectralVector out = y;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!(x[j].grid() == y[j].grid())) throw std::invalid_argument("vector grid mismatch");
        for (std::size_t i = 0; i < out[j].size(); ++i) out[j][i] += a * x[j][i];
    }
    return out;
}

double spectral_l2_norm(const SpectralVector& V) {
    require_same_grid(V);
    const auto w = spectral_measure_weights(V.front().grid());
    double s = 0.0;
    for (const auto& c : V)
        for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::norm(c[i]);
    return std::sqrt(s);
}

}  // namespace wns
