#include "wns/classical.hpp"

#include "wns/transform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wns {

namespace {

constexpr cplx kI{0.0, 1.0};
using Coeffs = std::vector<std::vector<cplx>>;  // per component

struct Oracle {
    CosineGrid g;
    std::size_t nf = 0, M = 0, N = 0;
    std::vector<double> k;          // per periodic index
    std::vector<cplx> dft;          // N x N, e^{-i k_m x_n}
    std::vector<double> cosm;       // M x M, cos(lambda_m x_j)
    std::vector<double> lam;        // M
    std::vector<std::vector<double>> xi;  // d+1 components per node
    std::vector<double> xi2;
    std::vector<unsigned char> keep, dealias_keep;

    explicit Oracle(const CosineGrid& grid) : g(grid) {
        g.validate();
        nf = g.fourier_size();
        M = std::size_t(g.M);
        N = std::size_t(g.N);
        for (int m = 0; m < g.N; ++m) k.push_back(g.fourier_frequency(m));
        dft.resize(N * N);
        for (std::size_t m = 0; m < N; ++m)
            for (std::size_t n = 0; n < N; ++n) dft[m * N + n] = std::polar(1.0, -k[m] * g.fourier_position(int(n)));
        lam = g.modes();
        const auto r = g.radii();
        cosm.resize(M * M);
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t j = 0; j < M; ++j) cosm[m * M + j] = std::cos(lam[m] * r[j]);

        xi.assign(std::size_t(g.d) + 1, std::vector<double>(size()));
        xi2.assign(size(), 0.0);
        keep.assign(size(), 1);
        dealias_keep.assign(size(), 1);
        for (std::size_t p = 0; p < nf; ++p) {
            std::size_t rem = p;
            bool ok = true;
            double kk = 0.0;
            for (int a = g.d - 1; a >= 0; --a) {
                const int m = int(rem % N);
                rem /= N;
                const int sm = m < g.N / 2 ? m : m - g.N;
                if (std::abs(sm) > g.N / 3) ok = false;
                for (std::size_t j = 0; j < M; ++j) xi[std::size_t(a)][p * M + j] = k[std::size_t(m)];
                kk += k[std::size_t(m)] * k[std::size_t(m)];
            }
            for (std::size_t j = 0; j < M; ++j) {
                const std::size_t i = p * M + j;
                xi[std::size_t(g.d)][i] = lam[j];
                xi2[i] = kk + lam[j] * lam[j];
                keep[i] = lam[j] <= g.band;
                dealias_keep[i] = keep[i] && ok && lam[j] <= 2.0 * g.band / 3.0;
            }
        }
    }

    std::size_t size() const { return nf * M; }

    // DFT along one periodic axis, in place; sign -1 forward, +1 inverse (unscaled)
    void periodic(std::vector<cplx>& f, int axis, bool inverse) const {
        std::size_t stride = M;
        for (int a = g.d - 1; a > axis; --a) stride *= N;
        const std::size_t block = stride * N;
        std::vector<cplx> line(N), out(N);
        for (std::size_t base = 0; base < f.size(); base += block)
            for (std::size_t off = 0; off < stride; ++off) {
                for (std::size_t n = 0; n < N; ++n) line[n] = f[base + off + n * stride];
                for (std::size_t m = 0; m < N; ++m) {
                    cplx s = 0.0;
                    for (std::size_t n = 0; n < N; ++n)
                        s += (inverse ? std::conj(dft[n * N + m]) : dft[m * N + n]) * line[n];
                    out[m] = inverse ? s / double(N) : s;
                }
                for (std::size_t n = 0; n < N; ++n) f[base + off + n * stride] = out[n];
            }
    }

    std::vector<cplx> forward(std::vector<cplx> f) const {
        for (int a = 0; a < g.d; ++a) periodic(f, a, false);
        std::vector<cplx> out(f.size());
        for (std::size_t p = 0; p < nf; ++p)
            for (std::size_t m = 0; m < M; ++m) {
                if (!keep[p * M + m]) continue;
                cplx s = 0.0;
                for (std::size_t j = 0; j < M; ++j) s += cosm[m * M + j] * f[p * M + j];
                out[p * M + m] = s;
            }
        return out;
    }

    std::vector<cplx> inverse(const std::vector<cplx>& F) const {
        std::vector<cplx> f(F.size());
        for (std::size_t p = 0; p < nf; ++p)
            for (std::size_t j = 0; j < M; ++j) {
                cplx s = 0.0;
                for (std::size_t m = 0; m < M; ++m) s += (m == 0 ? 1.0 : 2.0) * cosm[m * M + j] * F[p * M + m];
                f[p * M + j] = s / double(M);
            }
        for (int a = 0; a < g.d; ++a) periodic(f, a, true);
        return f;
    }

    void project(Coeffs& U) const {
        const std::size_t nc = U.size();
        for (std::size_t i = 0; i < size(); ++i) {
            if (xi2[i] == 0.0) continue;
            cplx dot = 0.0;
            for (std::size_t c = 0; c < nc; ++c) dot += xi[c][i] * U[c][i];
            dot /= xi2[i];
            for (std::size_t c = 0; c < nc; ++c) U[c][i] -= xi[c][i] * dot;
        }
    }

    Coeffs nonlinear(const Coeffs& U, bool dealias) const {
        const std::size_t nc = U.size();
        Coeffs u;
        for (const auto& c : U) u.push_back(inverse(c));
        Coeffs D(nc, std::vector<cplx>(size()));
        std::vector<cplx> prod(size());
        for (std::size_t j = 0; j < nc; ++j)
            for (std::size_t kk = 0; kk < nc; ++kk) {
                for (std::size_t i = 0; i < size(); ++i) prod[i] = u[j][i] * u[kk][i];
                const auto P = forward(prod);
                for (std::size_t i = 0; i < size(); ++i) D[j][i] += kI * xi[kk][i] * P[i];
            }
        if (dealias)
            for (auto& c : D)
                for (std::size_t i = 0; i < size(); ++i)
                    if (!dealias_keep[i]) c[i] = 0.0;
        project(D);
        return D;
    }

    Coeffs to_coeffs(const ClassicalState& s) const {
        Coeffs U;
        for (std::size_t c = 0; c < s.components.size(); ++c) {
            std::vector<cplx> v(s.components[c].begin(), s.components[c].end());
            if (c + 1 == s.components.size())
                for (auto& x : v) x *= kI;
            U.push_back(forward(std::move(v)));
        }
        return U;
    }

    ClassicalState to_state(const Coeffs& U, double t) const {
        ClassicalState s;
        s.t = t;
        for (std::size_t c = 0; c < U.size(); ++c) {
            const auto v = inverse(U[c]);
            std::vector<double> re(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) re[i] = c + 1 == U.size() ? v[i].imag() : v[i].real();
            s.components.push_back(std::move(re));
        }
        return s;
    }

    double div_l2(const Coeffs& U) const {
        std::vector<cplx> div(size());
        for (std::size_t c = 0; c < U.size(); ++c)
            for (std::size_t i = 0; i < size(); ++i) div[i] += kI * xi[c][i] * U[c][i];
        const auto v = inverse(div);
        ClassicalState s;
        std::vector<double> mag(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) mag[i] = std::abs(v[i]);
        s.components.push_back(std::move(mag));
        return classical_lp_norm(g, s, 2.0);
    }
};

}  // namespace

void CosineGrid::validate() const {
    if (d < 1) throw std::invalid_argument("cosine grid: d must be >= 1");
    if (N < 2 || N % 2) throw std::invalid_argument("cosine grid: N must be even and >= 2");
    if (!(L > 0.0)) throw std::invalid_argument("cosine grid: L must be positive");
    if (M < 2) throw std::invalid_argument("cosine grid: M must be >= 2");
    if (!(R > 0.0)) throw std::invalid_argument("cosine grid: R must be positive");
    if (!(band > 0.0)) throw std::invalid_argument("cosine grid: band must be positive");
}

std::size_t CosineGrid::fourier_size() const {
    std::size_t n = 1;
    for (int a = 0; a < d; ++a) n *= std::size_t(N);
    return n;
}

std::vector<double> CosineGrid::radii() const {
    std::vector<double> r(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) r[std::size_t(j)] = (j + 0.5) * R / M;
    return r;
}

std::vector<double> CosineGrid::modes() const {
    std::vector<double> l(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) l[std::size_t(m)] = m * std::numbers::pi / R;
    return l;
}

double CosineGrid::fourier_frequency(int m) const {
    const int sm = m < N / 2 ? m : m - N;
    return 2.0 * std::numbers::pi * sm / L;
}

CosineGrid cosine_grid_for(const GridSpec& grid, int M, double R) {
    CosineGrid c;
    c.d = grid.d;
    c.N = grid.N;
    c.L = grid.L;
    c.M = M;
    c.R = R;
    c.band = grid.Lambda_max;
    c.validate();
    return c;
}

ClassicalState sample_classical(const CosineGrid& grid, const VectorFunction& f, double t) {
    grid.validate();
    const auto r = grid.radii();
    const std::size_t nc = std::size_t(grid.d) + 1, M = std::size_t(grid.M), N = std::size_t(grid.N);
    ClassicalState s;
    s.t = t;
    s.components.assign(nc, std::vector<double>(grid.size()));
    std::vector<double> x(nc), out(nc);
    for (std::size_t p = 0; p < grid.fourier_size(); ++p) {
        std::size_t rem = p;
        for (int a = grid.d - 1; a >= 0; --a) {
            x[std::size_t(a)] = grid.fourier_position(int(rem % N));
            rem /= N;
        }
        for (std::size_t j = 0; j < M; ++j) {
            x.back() = r[j];
            f(x, out);
            for (std::size_t c = 0; c < nc; ++c) s.components[c][p * M + j] = out[c];
        }
    }
    return s;
}

double classical_lp_norm(const CosineGrid& grid, const ClassicalState& s, double p) {
    const double w = std::pow(grid.L / grid.N, grid.d) * (grid.R / grid.M) /
                     (std::pow(2.0 * std::numbers::pi, 0.5 * grid.d) * std::sqrt(0.5 * std::numbers::pi));
    double sum = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double m2 = 0.0;
        for (const auto& c : s.components) m2 += c[i] * c[i];
        const double m = std::sqrt(m2);
        mx = std::max(mx, m);
        sum += w * std::pow(m, p);
    }
    return std::isinf(p) ? mx : std::pow(sum, 1.0 / p);
}

ClassicalResult classical_march(const CosineGrid& grid, const VectorFunction& u0, double nu, double dt,
                                double T_end, const ClassicalOptions& opt) {
    if (!(nu > 0.0)) throw std::invalid_argument("oracle needs nu > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("oracle needs dt > 0");
    if (!(T_end >= 0.0)) throw std::invalid_argument("oracle needs T_end >= 0");
    const Oracle o(grid);
    Coeffs U = o.to_coeffs(sample_classical(grid, u0));
    o.project(U);

    ClassicalResult res;
    auto record = [&](double t) {
        auto s = o.to_state(U, t);
        res.series.push(t, classical_lp_norm(grid, s, opt.p), classical_lp_norm(grid, s, 2.0), o.div_l2(U));
        res.states.push_back(std::move(s));
    };
    auto nonlin = [&](const Coeffs& V) {
        return opt.nonlinear ? o.nonlinear(V, opt.dealias) : Coeffs(V.size(), std::vector<cplx>(o.size()));
    };
    auto combine = [&](double a, const Coeffs& x, const Coeffs& y) {
        Coeffs z = y;
        for (std::size_t c = 0; c < z.size(); ++c)
            for (std::size_t i = 0; i < z[c].size(); ++i) z[c][i] += a * x[c][i];
        return z;
    };

    double t = 0.0;
    record(t);
    std::vector<double> E(o.size());
    double E_dt = -1.0;
    std::size_t next = 0;
    while (next < opt.times.size() && !(opt.times[next] > 0.0)) ++next;
    while (opt.times.empty() ? t < T_end : next < opt.times.size()) {
        double h = dt;
        if (!opt.times.empty()) {
            h = opt.times[next++] - t;
            if (!(h > 0.0)) throw std::invalid_argument("oracle step times must increase");
        } else if (t + h >= T_end || T_end - (t + h) < 1e-12 * T_end) {
            h = T_end - t;
        }
        if (h != E_dt) {
            for (std::size_t i = 0; i < E.size(); ++i) E[i] = std::exp(-nu * h * o.xi2[i]);
            E_dt = h;
        }
        auto heat = [&](Coeffs V) {
            for (auto& c : V)
                for (std::size_t i = 0; i < c.size(); ++i) c[i] *= E[i];
            return V;
        };
        const Coeffs N0 = nonlin(U);
        const Coeffs EU = heat(U);
        const Coeffs EN0 = heat(N0);
        const Coeffs star = combine(-h, EN0, EU);
        const Coeffs N1 = nonlin(star);
        U = combine(-0.5 * h, combine(1.0, N1, EN0), EU);
        o.project(U);
        t = !opt.times.empty() ? opt.times[next - 1] : (h == T_end - t) ? T_end : t + h;
        record(t);
    }
    return res;
}

VectorFunction classical_vortex(int d, double amplitude, double center, double width) {
    if (d < 1 || !(width > 0.0)) throw std::invalid_argument("bad vortex parameters");
    return [=](std::span<const double> x, std::span<double> out) {
        double x2 = 0.0, xs = 0.0;
        for (int a = 0; a < d; ++a) {
            x2 += x[std::size_t(a)] * x[std::size_t(a)];
            xs += x[std::size_t(a)];
        }
        const double r = x[std::size_t(d)];
        const double env = std::sqrt(std::numbers::pi * width) * std::exp(-0.25 * width * r * r);
        // int_0^inf l e^{-(l-c)^2/w} cos(l r) dl and int_0^inf e^{-(l-c)^2/w} cos(l r) dl
        const double r1 = env * (center * std::cos(center * r) - 0.5 * width * r * std::sin(center * r));
        const double r0 = env * std::cos(center * r);
        const double a = amplitude / std::sqrt(0.5 * std::numbers::pi) * std::exp(-0.5 * x2);
        for (int j = 0; j < d; ++j) out[std::size_t(j)] = a * r1;
        out[std::size_t(d)] = -a * xs * r0;
    };
}

double relative_l2_gap(const VelocityState& main, const CosineGrid& grid, const ClassicalState& oracle) {
    const GridSpec& g = main.grid();
    if (g.d != grid.d || g.N != grid.N || g.L != grid.L) throw std::invalid_argument("periodic axes differ");
    const auto plan = TransformPlan::get(g);
    const auto r = grid.radii();
    double num = 0.0, den = 0.0;
    for (std::size_t c = 0; c < main.components.size(); ++c) {
        const auto v = plan->synthesize(plan->forward(main.components[c]), r);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double e = v[i].real() - oracle.components[c][i];
            num += e * e;
            den += oracle.components[c][i] * oracle.components[c][i];
        }
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace wns
