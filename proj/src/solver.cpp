#include "wns/solver.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace wns {

namespace {

constexpr cplx kI{0.0, 1.0};

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// L^p norm of the pointwise magnitude of the physical field behind U.
double physical_lp(const SpectralVector& U, double p) {
    const GridSpec& g = U.front().grid();
    const auto plan = TransformPlan::get(g);
    std::vector<double> mag(g.physical_size(), 0.0);
    for (const auto& c : U) {
        const auto v = plan->inverse_values(c);
        for (std::size_t i = 0; i < mag.size(); ++i) mag[i] += std::norm(v[i]);
    }
    for (auto& m : mag) m = std::sqrt(m);
    return weighted_lp_norm(mag, measure_weights(g), p);
}

SpectralVector difference(const SpectralVector& a, const SpectralVector& b) { return axpy(-1.0, b, a); }

// forward transforms of u_j v_k for all j, k (row-major, (d+1)^2 entries)
std::vector<SpectralField> product_transforms(const SpectralVector& U, const SpectralVector& V, bool symmetric) {
    const GridSpec& g = U.front().grid();
    const auto plan = TransformPlan::get(g);
    const std::size_t nc = U.size();
    std::vector<std::vector<cplx>> u, v;
    for (const auto& c : U) u.push_back(plan->inverse_values(c));
    if (symmetric) {
        v = u;
    } else {
        for (const auto& c : V) v.push_back(plan->inverse_values(c));
    }
    std::vector<SpectralField> out(nc * nc, SpectralField(g));
    std::vector<cplx> prod(g.physical_size());
    for (std::size_t j = 0; j < nc; ++j)
        for (std::size_t k = 0; k < nc; ++k) {
            if (symmetric && k < j) {
                out[j * nc + k] = out[k * nc + j];
                continue;
            }
            for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = u[j][i] * v[k][i];
            out[j * nc + k] = plan->forward(prod);
        }
    return out;
}

bool same_state(const SpectralVector& a, const SpectralVector& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t j = 0; j < a.size(); ++j)
        if (!(a[j].grid() == b[j].grid()) ||
            !std::equal(a[j].coeffs().begin(), a[j].coeffs().end(), b[j].coeffs().begin()))
            return false;
    return true;
}

void check_vector(const SpectralVector& U, const GridSpec& g) {
    require(int(U.size()) == g.d + 1, "velocity needs d+1 components");
    for (const auto& c : U) require(c.grid() == g, "velocity components on different grids");
}

// Lagrange weights on up to four neighbouring samples around s.
void interpolation_weights(std::span<const double> t, double s, std::size_t& first, std::vector<double>& w) {
    const std::size_t n = t.size();
    const std::size_t width = std::min<std::size_t>(4, n);
    std::size_t i = std::size_t(std::upper_bound(t.begin(), t.end(), s) - t.begin());
    i = i == 0 ? 0 : i - 1;  // t[i] <= s
    std::size_t lo = i >= 1 ? i - 1 : 0;
    if (lo + width > n) lo = n - width;
    first = lo;
    w.assign(width, 1.0);
    for (std::size_t a = 0; a < width; ++a)
        for (std::size_t b = 0; b < width; ++b)
            if (a != b) w[a] *= (s - t[lo + b]) / (t[lo + a] - t[lo + b]);
}

SpectralVector duhamel_integral(const Trajectory& N, double nu, double t, const QuadratureOptions& q) {
    const SpectralVector& ref = N.states.front();
    const GridSpec& g = ref.front().grid();
    const auto fg = FrequencyGrid::get(g);
    const auto n2 = fg->norm2();
    SpectralVector out = zeros(g, int(ref.size()));
    if (t == 0.0) return out;

    // 2-point Gauss on each tau panel
    const double gx = 0.5 / std::sqrt(3.0);
    std::vector<double> w;
    std::size_t first = 0;
    for (int panel = 0; panel < q.panels; ++panel) {
        const double a = double(panel) / q.panels, h = 1.0 / q.panels;
        for (double off : {-gx, gx}) {
            const double tau = a + h * (0.5 + off);
            const double tq = std::pow(tau, q.q);
            const double sigma = t * (1.0 - tq);
            const double weight = 0.5 * h * t * q.q * std::pow(tau, q.q - 1.0);
            if (N.states.size() == 1) {
                first = 0;
                w.assign(1, 1.0);
            } else {
                interpolation_weights(N.times, sigma, first, w);
            }
            const double lag = nu * (t - sigma);
            for (std::size_t i = 0; i < n2.size(); ++i) {
                const double e = weight * std::exp(-lag * n2[i]);
                for (std::size_t c = 0; c < out.size(); ++c) {
                    cplx s = 0.0;
                    for (std::size_t b = 0; b < w.size(); ++b) s += w[b] * N.states[first + b][c][i];
                    out[c][i] += e * s;
                }
            }
        }
    }
    return out;
}

Trajectory nonlinear_samples(const Trajectory& u, const Trajectory& v, bool dealias) {
    require(!u.states.empty() && !v.states.empty(), "empty trajectory");
    Trajectory N;
    if (u.states.size() == 1 && v.states.size() == 1) {
        N.times = {0.0};
        N.states.push_back(nonlinear_term(u.states[0], v.states[0], dealias));
        return N;
    }
    const Trajectory& lead = u.states.size() > 1 ? u : v;
    if (u.states.size() > 1 && v.states.size() > 1) require(u.times == v.times, "trajectories sampled at different times");
    N.times = lead.times;
    for (std::size_t i = 0; i < lead.states.size(); ++i) {
        const auto& a = u.states.size() == 1 ? u.states[0] : u.states[i];
        const auto& b = v.states.size() == 1 ? v.states[0] : v.states[i];
        N.states.push_back(nonlinear_term(a, b, dealias));
    }
    return N;
}

SpectralVector scaled_heat(const SpectralVector& U, std::span<const double> factor) {
    SpectralVector out = U;
    for (auto& c : out)
        for (std::size_t i = 0; i < c.size(); ++i) c[i] *= factor[i];
    return out;
}

}  // namespace

void SolverConfig::validate() const {
    grid.validate();
    require(nu > 0.0 && std::isfinite(nu), "solver.nu must be positive");
    require(std::isfinite(p), "solver.p must be finite");
    const double floor = 2.0 * grid.alpha + grid.d + 2.0;
    if (!(p > floor))
        throw std::invalid_argument("solver.p must satisfy 2 alpha + d + 2 < p (here 2 alpha + d + 2 = " +
                                    std::to_string(floor) + ")");
    require(dt > 0.0, "solver.dt must be positive");
    require(picard_tol > 0.0, "solver.picard_tol must be positive");
    require(picard_max_iter >= 1, "solver.picard_max_iter must be >= 1");
    require(picard_nodes >= 1, "solver.picard_nodes must be >= 1");
    require(quad_panels >= 1, "solver.quad_panels must be >= 1");
    require(T_end >= 0.0, "solver.T_end must be >= 0");
    require(safety > 0.0 && safety <= 1.0, "solver.safety must be in (0, 1]");
    require(overflow > 0.0, "solver.overflow must be positive");
    require(max_steps >= 1, "solver.max_steps must be >= 1");
}

double SolverConfig::theta() const { return (p - 2.0 * grid.alpha - grid.d - 2.0) / (2.0 * p); }

void NormSeries::push(double t, double lp, double l2, double div) {
    if (!times.empty() && !(t > times.back())) throw std::invalid_argument("norm series times must increase");
    times.push_back(t);
    lp_norms.push_back(lp);
    l2_norms.push_back(l2);
    div_norms.push_back(div);
}

std::optional<double> NormSeries::lower_bound(double t) const {
    if (!fitted_Tstar || !bound_constant || !bound_kappa || !(t < *fitted_Tstar)) return std::nullopt;
    return *bound_constant / std::pow(*fitted_Tstar - t, *bound_kappa);
}

SpectralVector divergence_of_product(const SpectralVector& U, const SpectralVector& V, bool dealias_flag) {
    const GridSpec& g = U.front().grid();
    check_vector(U, g);
    check_vector(V, g);
    const auto fg = FrequencyGrid::get(g);
    const std::size_t nc = U.size();
    const auto F = product_transforms(U, V, same_state(U, V));
    SpectralVector D = zeros(g, int(nc));
    for (std::size_t k = 0; k < nc; ++k) {
        const auto l = fg->component(int(k));
        for (std::size_t j = 0; j < nc; ++j) {
            const auto& f = F[j * nc + k];
            for (std::size_t i = 0; i < f.size(); ++i) D[j][i] += kI * l[i] * f[i];
        }
    }
    if (dealias_flag)
        for (auto& c : D) dealias(c);
    return D;
}

SpectralVector nonlinear_term(const SpectralVector& U, const SpectralVector& V, bool dealias_flag) {
    return leray_project(divergence_of_product(U, V, dealias_flag));
}

SpectralVector bilinear_B(const Trajectory& u, const Trajectory& v, double nu, double t, const QuadratureOptions& q,
                          bool dealias_flag) {
    require(nu > 0.0, "bilinear form needs nu > 0");
    require(t >= 0.0, "bilinear form needs t >= 0");
    require(q.panels >= 1 && q.q >= 1.0, "bad quadrature options");
    const Trajectory N = nonlinear_samples(u, v, dealias_flag);
    if (N.states.size() > 1)
        require(t <= N.times.back() * (1.0 + 1e-12), "quadrature time outside the trajectory");
    return duhamel_integral(N, nu, t, q);
}

VelocityState bilinear_B(const VelocityState& u, const VelocityState& v, double nu, double t,
                         const QuadratureOptions& q, bool dealias_flag) {
    require(u.grid() == v.grid(), "bilinear form operands on different grids");
    const auto plan = TransformPlan::get(u.grid());
    Trajectory a{{0.0}, {to_spectral(u, *plan)}};
    Trajectory b{{0.0}, {to_spectral(v, *plan)}};
    return to_velocity(bilinear_B(a, b, nu, t, q, dealias_flag), *plan, t);
}

double existence_time(double u0_norm, const SolverConfig& cfg, double C_const) {
    if (!(u0_norm >= 0.0)) throw std::invalid_argument("norm must be non-negative");
    if (u0_norm == 0.0) return std::numeric_limits<double>::infinity();
    return C_const / std::pow(u0_norm, cfg.existence_exponent());
}

double calibrate_C(const SolverConfig& cfg) {
    cfg.validate();
    const GridSpec& g = cfg.grid;
    const auto plan = TransformPlan::get(g);
    const auto fg = FrequencyGrid::get(g);
    const auto n2 = fg->norm2();
    const auto w = measure_weights(g);
    const double pc = cfg.p / (cfg.p - 1.0);
    const int nc = g.d + 1;

    auto norm_of = [&](auto&& symbol) {
        SpectralField F(g);
        for (std::size_t i = 0; i < F.size(); ++i) F[i] = n2[i] > 0.0 ? symbol(i) : 0.0;
        const auto v = plan->inverse_values(F);
        std::vector<double> mag(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) mag[i] = std::abs(v[i]);
        return weighted_lp_norm(mag, w, pc);
    };
    double worst = 0.0;
    for (int i = 0; i < nc; ++i)
        for (int j = 0; j < nc; ++j) {
            const auto li = fg->component(i), lj = fg->component(j);
            const double nf = norm_of([&](std::size_t k) {
                return kI * lj[k] * std::exp(-n2[k]) * (1.0 - li[k] * li[k] / n2[k]);
            });
            const double ng = norm_of([&](std::size_t k) {
                return kI * li[k] * std::exp(-n2[k]) * li[k] * lj[k] / n2[k];
            });
            worst = std::max(worst, nf + ng);
        }
    const double a = (cfg.p + 2.0 * g.alpha + g.d + 2.0) / (2.0 * cfg.p);
    return std::pow(cfg.nu, -a) / cfg.theta() * double(nc) * worst;
}

double existence_constant(double C, const SolverConfig& cfg) {
    require(C > 0.0, "kernel constant must be positive");
    return std::pow(1.0 / (8.0 * C), cfg.existence_exponent());
}

double mild_residual(const Trajectory& u, const SolverConfig& cfg) {
    const QuadratureOptions q{cfg.quad_panels, cfg.existence_exponent()};
    const Trajectory N = nonlinear_samples(u, u, cfg.dealias);
    double worst = 0.0;
    for (std::size_t i = 0; i < u.times.size(); ++i) {
        const double t = u.times[i];
        SpectralVector r = difference(u.states[i], heat_semigroup(u.states.front(), cfg.nu, t));
        if (cfg.nonlinear) r = axpy(1.0, duhamel_integral(N, cfg.nu, t, q), r);
        worst = std::max(worst, physical_lp(r, cfg.p));
    }
    return worst;
}

PicardResult picard_solve(const VelocityState& u0, const SolverConfig& cfg, double T) {
    cfg.validate();
    require(u0.grid() == cfg.grid, "initial state is not on the configured grid");
    require(T >= 0.0 && std::isfinite(T), "Picard horizon must be finite and >= 0");
    const auto plan = TransformPlan::get(cfg.grid);
    const SpectralVector U0 = leray_project(to_spectral(u0, *plan));
    const QuadratureOptions q{cfg.quad_panels, cfg.existence_exponent()};
    const int M = cfg.picard_nodes;

    Trajectory L0;
    for (int i = 0; i <= M; ++i) {
        const double t = T * double(i) / M;
        L0.times.push_back(t);
        L0.states.push_back(heat_semigroup(U0, cfg.nu, t));
    }

    PicardResult res;
    Trajectory cur = L0;
    bool converged = false;
    for (int k = 1; k <= cfg.picard_max_iter; ++k) {
        Trajectory next = L0;
        if (cfg.nonlinear && T > 0.0) {
            const Trajectory N = nonlinear_samples(cur, cur, cfg.dealias);
            for (int i = 1; i <= M; ++i)
                next.states[std::size_t(i)] =
                    difference(L0.states[std::size_t(i)], duhamel_integral(N, cfg.nu, L0.times[std::size_t(i)], q));
        }
        double dist = 0.0;
        for (std::size_t i = 0; i < next.states.size(); ++i)
            dist = std::max(dist, physical_lp(difference(next.states[i], cur.states[i]), cfg.p));
        if (!res.distances.empty() && res.distances.back() > 0.0) res.ratios.push_back(dist / res.distances.back());
        res.distances.push_back(dist);
        cur = std::move(next);
        res.iterations = k;
        if (!std::isfinite(dist)) break;
        if (dist < cfg.picard_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        const double ratio = res.ratios.empty() ? std::numeric_limits<double>::quiet_NaN() : res.ratios.back();
        throw ContractionFailure("Picard iteration did not converge in " + std::to_string(res.iterations) +
                                     " iterations (last ratio " + std::to_string(ratio) + ")",
                                 ratio, res.iterations);
    }
    res.trajectory = std::move(cur);
    for (std::size_t i = 0; i < res.trajectory.states.size(); ++i)
        res.states.push_back(to_velocity(res.trajectory.states[i], *plan, res.trajectory.times[i]));
    res.residual = mild_residual(res.trajectory, cfg);
    return res;
}

MarchResult march(const VelocityState& u0, const SolverConfig& cfg, const StateObserver& observe) {
    cfg.validate();
    require(u0.grid() == cfg.grid, "initial state is not on the configured grid");
    const GridSpec& g = cfg.grid;
    const auto plan = TransformPlan::get(g);
    const auto n2 = FrequencyGrid::get(g)->norm2();
    double Cpad = cfg.existence_constant;
    if (cfg.nonlinear && !(Cpad > 0.0)) Cpad = existence_constant(calibrate_C(cfg), cfg);

    MarchResult res;
    SpectralVector U = leray_project(to_spectral(u0, *plan));
    auto record = [&](double t) {
        VelocityState s = to_velocity(U, *plan, t);
        const double lp = lp_norm(s, cfg.p);
        res.series.push(t, lp, lp_norm(s, 2.0), s.div_norm);
        if (observe) observe(s, res.steps);
        res.final_state = std::move(s);
        return lp;
    };
    auto nonlin = [&](const SpectralVector& V) {
        return cfg.nonlinear ? nonlinear_term(V, V, cfg.dealias) : zeros(g, g.d + 1);
    };

    double t = u0.t;
    const double t_end = u0.t + cfg.T_end;
    double lp = record(t);
    std::vector<double> E(n2.size());
    double E_dt = -1.0;
    while (t < t_end) {
        if (!std::isfinite(lp) || lp > cfg.overflow) {
            res.blowup_suspected = true;
            res.stop_reason = "norm blow-up suspected";
            return res;
        }
        if (res.steps >= cfg.max_steps) {
            res.stop_reason = "step limit reached";
            return res;
        }
        double dt = cfg.nonlinear ? std::min(cfg.dt, cfg.safety * existence_time(lp, cfg, Cpad)) : cfg.dt;
        if (t + dt >= t_end || t_end - (t + dt) < 1e-12 * t_end) dt = t_end - t;
        if (dt != E_dt) {
            for (std::size_t i = 0; i < E.size(); ++i) E[i] = std::exp(-cfg.nu * dt * n2[i]);
            E_dt = dt;
        }
        const SpectralVector N0 = nonlin(U);
        const SpectralVector EU = scaled_heat(U, E);
        const SpectralVector EN0 = scaled_heat(N0, E);
        const SpectralVector star = axpy(-dt, EN0, EU);
        const SpectralVector N1 = nonlin(star);
        U = leray_project(axpy(-0.5 * dt, axpy(1.0, N1, EN0), EU));
        t = (dt == t_end - t) ? t_end : t + dt;
        ++res.steps;
        lp = record(t);
    }
    if (!std::isfinite(lp) || lp > cfg.overflow) {
        res.blowup_suspected = true;
        res.stop_reason = "norm blow-up suspected";
    } else {
        res.stop_reason = "reached T_end";
    }
    return res;
}

BlowupFit blowup_monitor(const NormSeries& series, const SolverConfig& cfg, KappaMode mode) {
    BlowupFit fit;
    fit.kappa_reference = mode == KappaMode::theorem ? cfg.existence_exponent() : cfg.theta();
    const std::size_t n = series.size();
    if (n < 8) {
        fit.message = "no blow-up signature (fewer than 8 samples)";
        return fit;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!(series.lp_norms[i] > 0.0) || !std::isfinite(series.lp_norms[i])) {
            fit.message = "no blow-up signature (non-positive or non-finite norm)";
            return fit;
        }
    const std::size_t tail = std::max<std::size_t>(4, n / 2);
    for (std::size_t i = n - tail + 1; i < n; ++i)
        if (!(series.lp_norms[i] > series.lp_norms[i - 1])) {
            fit.message = "no blow-up signature (norm tail is not increasing)";
            return fit;
        }

    const auto& t = series.times;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::log(series.lp_norms[i]);
    const double span = t.back() - t.front();

    struct Line {
        double a, kappa, ssr;
    };
    auto line_fit = [&](double Tstar) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = -std::log(Tstar - t[i]);
            sx += x;
            sy += y[i];
            sxx += x * x;
            sxy += x * y[i];
        }
        const double dn = double(n);
        const double den = dn * sxx - sx * sx;
        Line l{};
        l.kappa = den > 0.0 ? (dn * sxy - sx * sy) / den : 0.0;
        l.a = (sy - l.kappa * sx) / dn;
        l.ssr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - l.a + l.kappa * std::log(Tstar - t[i]);
            l.ssr += r * r;
        }
        return l;
    };
    // search T* = t_last + span e^s over a wide log range, then refine
    auto objective = [&](double s) { return line_fit(t.back() + span * std::exp(s)).ssr; };
    const double s_lo = std::log(1e-8), s_hi = std::log(1e3);
    const int scan = 400;
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= scan; ++k) {
        const double v = objective(s_lo + (s_hi - s_lo) * k / scan);
        if (v < best_val) {
            best_val = v;
            best = k;
        }
    }
    const double h = (s_hi - s_lo) / scan;
    const double a = s_lo + h * std::max(0, best - 1), b = s_lo + h * std::min(scan, best + 1);
    const auto [s_best, ssr] = boost::math::tools::brent_find_minima(objective, a, b, 52);
    const double Tstar = t.back() + span * std::exp(s_best);
    const Line l = line_fit(Tstar);
    if (!(l.kappa > 0.0)) {
        fit.message = "no blow-up signature (fitted exponent is not positive)";
        return fit;
    }
    fit.signature = true;
    fit.message = "blow-up signature";
    fit.Tstar = Tstar;
    fit.kappa = l.kappa;
    fit.C = std::exp(l.a);
    fit.rms_residual = std::sqrt(ssr / double(n));
    fit.kappa_residual = l.kappa - fit.kappa_reference;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += y[i] + fit.kappa_reference * std::log(Tstar - t[i]);
    mean /= double(n);
    fit.bound_constant = std::exp(mean);
    for (std::size_t i = 0; i < n; ++i)
        if (y[i] < mean - fit.kappa_reference * std::log(Tstar - t[i]) - 1e-12) ++fit.violations;
    return fit;
}

void attach_fit(NormSeries& series, const BlowupFit& fit) {
    if (!fit.signature) {
        series.fitted_Tstar.reset();
        series.fitted_kappa.reset();
        series.bound_constant.reset();
        series.bound_kappa.reset();
        return;
    }
    series.fitted_Tstar = fit.Tstar;
    series.fitted_kappa = fit.kappa;
    series.bound_constant = fit.bound_constant;
    series.bound_kappa = fit.kappa_reference;
}

double pressure_symbol(std::span<const double> xi, int j, int k) {
    double n2 = 0.0;
    for (double v : xi) n2 += v * v;
    if (n2 == 0.0) return 0.0;
    return -xi[std::size_t(j)] * xi[std::size_t(k)] / n2;
}

SpectralField pressure_spectral(const SpectralVector& U) {
    const GridSpec& g = U.front().grid();
    check_vector(U, g);
    const auto fg = FrequencyGrid::get(g);
    const auto n2 = fg->norm2();
    const std::size_t nc = U.size();
    const auto F = product_transforms(U, U, true);
    SpectralField P(g);
    for (std::size_t j = 0; j < nc; ++j)
        for (std::size_t k = 0; k < nc; ++k) {
            const auto lj = fg->component(int(j)), lk = fg->component(int(k));
            const auto& f = F[j * nc + k];
            for (std::size_t i = 0; i < P.size(); ++i)
                if (n2[i] > 0.0) P[i] -= lj[i] * lk[i] / n2[i] * f[i];
        }
    return P;
}

PhysicalField pressure_diagnostic(const VelocityState& u) {
    const auto plan = TransformPlan::get(u.grid());
    return plan->inverse(pressure_spectral(to_spectral(u, *plan)));
}

VelocityState zero_state(const GridSpec& grid) {
    VelocityState u;
    for (int j = 0; j <= grid.d; ++j) u.components.emplace_back(grid);
    return u;
}

VelocityState shear_state(const GridSpec& grid, double amplitude, double s) {
    VelocityState u = zero_state(grid);
    u.components[0] = sample_field(grid, [&](std::span<const double> x) {
        return amplitude * std::exp(-s * x.back() * x.back());
    });
    return u;
}

namespace {

// U_j = lambda_{d+1} phi (j < d), U_{d+1} = -sum_j lambda_j phi
SpectralVector stream_field(const GridSpec& grid, const std::function<cplx(std::size_t)>& phi) {
    const auto fg = FrequencyGrid::get(grid);
    SpectralVector U = zeros(grid, grid.d + 1);
    const auto lr = fg->component(grid.d);
    for (std::size_t i = 0; i < grid.spectral_size(); ++i) {
        const cplx f = phi(i);
        for (int j = 0; j < grid.d; ++j) {
            U[std::size_t(j)][i] = lr[i] * f;
            U[std::size_t(grid.d)][i] -= fg->component(j)[i] * f;
        }
    }
    return U;
}

}  // namespace

SpectralVector vortex_spectral(const GridSpec& grid, double amplitude, double center, double width) {
    grid.validate();
    require(width > 0.0, "vortex width must be positive");
    const auto fg = FrequencyGrid::get(grid);
    return stream_field(grid, [&](std::size_t i) {
        double k2 = 0.0;
        for (int j = 0; j < grid.d; ++j) k2 += fg->component(j)[i] * fg->component(j)[i];
        const double r = fg->component(grid.d)[i] - center;
        return cplx(amplitude * std::exp(-0.5 * k2 - r * r / width));
    });
}

VelocityState vortex_state(const GridSpec& grid, double amplitude, double center, double width) {
    return to_velocity(vortex_spectral(grid, amplitude, center, width), *TransformPlan::get(grid), 0.0);
}

SpectralVector random_stream_spectral(const GridSpec& grid, double amplitude, std::uint64_t seed, int modes) {
    grid.validate();
    require(modes >= 1, "random stream needs at least one mode");
    const auto fg = FrequencyGrid::get(grid);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    // centers stay inside the dealiased band, away from lambda_{d+1} = 0
    const double kmax = std::min(grid.N / 6 * grid.dk(), 2.0);
    struct Mode {
        std::vector<double> k;
        double r, c, phase;
    };
    std::vector<Mode> ms;
    for (int m = 0; m < modes; ++m) {
        Mode md;
        for (int j = 0; j < grid.d; ++j) md.k.push_back(kmax * (2.0 * uni(rng) - 1.0));
        md.r = 3.5 + uni(rng);
        md.c = gauss(rng) / std::sqrt(double(modes));
        md.phase = 2.0 * 3.14159265358979323846 * uni(rng);
        ms.push_back(std::move(md));
    }
    const double width = 0.6;
    return stream_field(grid, [&](std::size_t i) {
        cplx f = 0.0;
        for (const auto& md : ms) {
            double kp = 0.0, km = 0.0;
            for (int j = 0; j < grid.d; ++j) {
                const double l = fg->component(j)[i];
                kp += (l - md.k[std::size_t(j)]) * (l - md.k[std::size_t(j)]);
                km += (l + md.k[std::size_t(j)]) * (l + md.k[std::size_t(j)]);
            }
            const double r = fg->component(grid.d)[i] - md.r;
            const double radial = std::exp(-r * r / width);
            // Hermitian in lambda' so the physical field is real
            f += md.c * radial * (std::polar(std::exp(-kp), md.phase) + std::polar(std::exp(-km), -md.phase));
        }
        return amplitude * f;
    });
}

VelocityState random_stream_state(const GridSpec& grid, double amplitude, std::uint64_t seed, int modes) {
    return to_velocity(random_stream_spectral(grid, amplitude, seed, modes), *TransformPlan::get(grid), 0.0);
}

}  // namespace wns
