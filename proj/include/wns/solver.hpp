// Mild solutions of the Weinstein Navier-Stokes system
//   u(t) = e^{nu t Delta_W} u0 - int_0^t e^{nu (t-s) Delta_W} P div_W(u (x) u)(s) ds,
// by Picard iteration on a short horizon or by exponential time stepping,
// with the existence-time formula and a blow-up monitor on norm series.

#pragma once

#include "wns/grid.hpp"
#include "wns/operators.hpp"
#include "wns/transform.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wns {

enum class StepperMode { picard, march };

struct SolverConfig {
    GridSpec grid;
    double nu = 0.1;
    double p = 6.0;
    StepperMode mode = StepperMode::march;
    double dt = 0.005;
    int picard_max_iter = 25;
    double picard_tol = 1e-10;
    int picard_nodes = 16;     // uniform time intervals on [0, T]
    int quad_panels = 16;      // 2-point Gauss panels inside B
    double T_end = 0.1;
    bool dealias = true;
    double safety = 0.5;       // fraction of the existence time allowed per step
    double overflow = 1e12;    // L^p guard
    long max_steps = 200000;
    bool nonlinear = true;     // false drops u (x) u (Stokes flow)
    /// C_{p,alpha,d}; <= 0 means calibrate from the kernel profiles.
    double existence_constant = 0.0;

    /// Throws std::invalid_argument naming the offending key.
    void validate() const;
    /// (p - 2 alpha - d - 2) / (2p).
    double theta() const;
    /// 2p / (p - 2 alpha - d - 2) = 1 / theta.
    double existence_exponent() const { return 1.0 / theta(); }
};

struct NormSeries {
    std::vector<double> times;
    std::vector<double> lp_norms;
    std::vector<double> l2_norms;
    std::vector<double> div_norms;
    std::optional<double> fitted_Tstar;
    std::optional<double> fitted_kappa;
    std::optional<double> bound_constant;
    std::optional<double> bound_kappa;

    void push(double t, double lp, double l2, double div);
    std::size_t size() const { return times.size(); }
    /// bound_constant / (T* - t)^bound_kappa, or nothing before a fit.
    std::optional<double> lower_bound(double t) const;
};

/// Trajectory sampled at increasing times, coefficients in the true
/// (complex) Weinstein form.
struct Trajectory {
    std::vector<double> times;
    std::vector<SpectralVector> states;
};

struct QuadratureOptions {
    int panels = 16;
    /// Exponent q in sigma = t (1 - tau^q); 1 gives a plain composite rule.
    double q = 1.0;
};

/// Pointwise u_j v_k, transform, i sum_k lambda_k, Leray. Optionally dealiased.
SpectralVector nonlinear_term(const SpectralVector& U, const SpectralVector& V, bool dealias);

/// B(u, v)(t) = int_0^t e^{nu (t-s) Delta} P div(u (x) v)(s) ds by composite
/// 2-point Gauss in tau, sigma = t (1 - tau^q). u and v are cubic-interpolated
/// between their samples; a single-sample trajectory is frozen in time.
SpectralVector bilinear_B(const Trajectory& u, const Trajectory& v, double nu, double t, const QuadratureOptions& q,
                          bool dealias = true);

/// Same for fields frozen in time, returned in physical form.
VelocityState bilinear_B(const VelocityState& u, const VelocityState& v, double nu, double t,
                         const QuadratureOptions& q, bool dealias = true);

class ContractionFailure : public std::runtime_error {
public:
    ContractionFailure(const std::string& what, double ratio, int iterations)
        : std::runtime_error(what), last_ratio(ratio), iterations(iterations) {}
    double last_ratio;
    int iterations;
};

struct PicardResult {
    Trajectory trajectory;
    std::vector<VelocityState> states;
    std::vector<double> distances;  // sup-in-time L^p distance per iteration
    std::vector<double> ratios;     // distances[k] / distances[k-1]
    int iterations = 0;
    /// max over nodes of ||u - L0 + B(u,u)||_p for the returned trajectory.
    double residual = 0.0;
};

/// Fixed-point iteration u <- L0 - B(u, u) on picard_nodes + 1 uniform times.
/// Throws ContractionFailure after picard_max_iter iterations.
PicardResult picard_solve(const VelocityState& u0, const SolverConfig& cfg, double T);

/// Sup over the trajectory nodes of ||u - L0 + B(u,u)||_p.
double mild_residual(const Trajectory& u, const SolverConfig& cfg);

/// C_const / u0_norm^{2p/(p-2 alpha-d-2)}; +infinity for u0_norm = 0.
double existence_time(double u0_norm, const SolverConfig& cfg, double C_const);

/// nu^{-(p+2 alpha+d+2)/(2p)} / theta times (d+1) max_{i,j} of
/// ||F^{-1} f_ij||_{p'} + ||F^{-1} g_ij||_{p'} for
/// f = i eta_j e^{-|eta|^2} (1 - eta_i^2/|eta|^2), g = i eta_i e^{-|eta|^2} eta_i eta_j / |eta|^2.
double calibrate_C(const SolverConfig& cfg);

/// C_{p,alpha,d} = (1 / (8 C))^{2p/(p-2 alpha-d-2)}: with R = 2 ||u0|| this
/// makes 2 C R T^theta = 1/2 at T = C_{p,alpha,d} / ||u0||^{1/theta}.
double existence_constant(double C, const SolverConfig& cfg);

struct MarchResult {
    NormSeries series;
    VelocityState final_state;
    bool blowup_suspected = false;
    std::string stop_reason;
    long steps = 0;
};

using StateObserver = std::function<void(const VelocityState&, long step)>;

/// Exponential trapezoid stepping:
///   u* = E (u - dt N(u)),  u^{n+1} = E u - dt/2 (E N(u) + N(u*)),
/// with E = e^{nu dt Delta} and dt = min(cfg.dt, safety * existence_time).
MarchResult march(const VelocityState& u0, const SolverConfig& cfg, const StateObserver& observe = {});

enum class KappaMode { theorem, scaling };

struct BlowupFit {
    bool signature = false;
    std::string message;
    double Tstar = 0.0;
    double kappa = 0.0;          // free fit
    double C = 0.0;              // free fit prefactor
    double kappa_reference = 0.0;
    double kappa_residual = 0.0; // kappa - kappa_reference
    double bound_constant = 0.0; // prefactor with kappa fixed to the reference
    double rms_residual = 0.0;   // of the free fit in log space
    int violations = 0;          // samples below the reference bound
};

/// Fits log||u|| = log C - kappa log(T* - t). Needs at least 8 samples and
/// a strictly increasing tail; otherwise signature = false.
BlowupFit blowup_monitor(const NormSeries& series, const SolverConfig& cfg, KappaMode mode);
/// Writes the fit into the series' optional fields.
void attach_fit(NormSeries& series, const BlowupFit& fit);

/// -xi_j xi_k / |xi|^2, zero at xi = 0.
double pressure_symbol(std::span<const double> xi, int j, int k);
/// p^ = -sum_{j,k} lambda_j lambda_k F(u_j u_k) / |lambda|^2.
SpectralField pressure_spectral(const SpectralVector& U);
PhysicalField pressure_diagnostic(const VelocityState& u);

/// div_W(u (x) u) without projection: component j is i sum_k lambda_k F(u_j u_k).
SpectralVector divergence_of_product(const SpectralVector& U, const SpectralVector& V, bool dealias);

// Initial conditions. All are divergence-free on the grid.

/// u = 0.
VelocityState zero_state(const GridSpec& grid);
/// u_1 = amplitude exp(-s x_{d+1}^2), other components 0. Steady under the
/// nonlinearity; the heat flow acts on the x_{d+1} profile only.
VelocityState shear_state(const GridSpec& grid, double amplitude, double s);
/// Stream construction U_j = lambda_{d+1} phi (j < d), U_{d+1} = -sum_j lambda_j phi with
/// phi = amplitude exp(-|lambda'|^2/2 - (lambda_{d+1} - center)^2 / width).
SpectralVector vortex_spectral(const GridSpec& grid, double amplitude, double center = 4.5, double width = 0.6);
VelocityState vortex_state(const GridSpec& grid, double amplitude, double center = 4.5, double width = 0.6);
/// Random superposition of stream profiles, band-limited and divergence-free.
SpectralVector random_stream_spectral(const GridSpec& grid, double amplitude, std::uint64_t seed, int modes = 6);
VelocityState random_stream_state(const GridSpec& grid, double amplitude, std::uint64_t seed, int modes = 6);

}  // namespace wns
