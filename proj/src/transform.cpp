#include "wns/transform.hpp"

#include "wns/special_fn.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace wns {

namespace {

// FFTW planning is not thread safe; execution with new-array execute is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

using RowMatrixXcd = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_grid(const GridSpec& a, const GridSpec& b) {
    if (!(a == b)) throw std::invalid_argument("field grid does not match the transform plan");
}

}  // namespace

TransformPlan::TransformPlan(const GridSpec& grid) : grid_(grid) {
    grid_.validate();
    radial_ = radial_nodes(grid_);
    freq_ = frequency_nodes(grid_);
    const double alpha = grid_.alpha;
    const double c_alpha = 1.0 / (std::pow(2.0, alpha) * gamma_fn(alpha + 1.0));
    const int nr = grid_.N_r;
    const int nl = grid_.N_lambda;

    Eigen::MatrixXd kernel(nl, nr);
    for (int m = 0; m < nl; ++m)
        for (int j = 0; j < nr; ++j)
            kernel(m, j) = normalized_bessel_j(alpha, freq_.nodes[std::size_t(m)] * radial_.nodes[std::size_t(j)]);

    fwd_.resize(nl, nr);
    inv_.resize(nr, nl);
    for (int m = 0; m < nl; ++m) {
        for (int j = 0; j < nr; ++j) {
            fwd_(m, j) = c_alpha * radial_.weights[std::size_t(j)] * kernel(m, j);
            inv_(j, m) = c_alpha * freq_.weights[std::size_t(m)] * kernel(m, j);
        }
    }
    fwd_c_ = fwd_.cast<cplx>();
    inv_c_ = inv_.cast<cplx>();

    const double d = double(grid_.d);
    const double two_pi_pow = std::pow(2.0 * std::numbers::pi, -0.5 * d);
    fwd_scale_ = two_pi_pow * std::pow(grid_.dx(), d);
    inv_scale_ = two_pi_pow * std::pow(grid_.dk(), d);

    const std::size_t nf = grid_.fourier_size();
    phase_.resize(nf);
    for (std::size_t p = 0; p < nf; ++p) {
        std::size_t rem = p;
        int parity = 0;
        for (int a = 0; a < grid_.d; ++a) {
            parity += int(rem % std::size_t(grid_.N));
            rem /= std::size_t(grid_.N);
        }
        phase_[p] = (parity % 2 == 0) ? 1.0 : -1.0;
    }

    std::vector<int> dims(std::size_t(grid_.d), grid_.N);
    std::vector<cplx> scratch(grid_.spectral_size());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard lock(planner_mutex());
    plan_fwd_ = fftw_plan_many_dft(grid_.d, dims.data(), nl, buf, nullptr, nl, 1, buf, nullptr, nl, 1,
                                   FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_bwd_ = fftw_plan_many_dft(grid_.d, dims.data(), nl, buf, nullptr, nl, 1, buf, nullptr, nl, 1,
                                   FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("FFTW planning failed");
}

TransformPlan::~TransformPlan() {
    std::lock_guard lock(planner_mutex());
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

std::shared_ptr<const TransformPlan> TransformPlan::get(const GridSpec& grid) {
    static std::mutex cache_mutex;
    static std::map<std::tuple<int, double, double, int, double, int, double, int, bool>,
                    std::shared_ptr<const TransformPlan>>
        cache;
    const auto key = std::make_tuple(grid.d, grid.alpha, grid.L, grid.N, grid.R_max, grid.N_r,
                                     grid.Lambda_max, grid.N_lambda, grid.classical_limit);
    std::lock_guard lock(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto plan = std::make_shared<const TransformPlan>(grid);
    cache.emplace(key, plan);
    return plan;
}

void TransformPlan::fft(std::vector<cplx>& data, int sign) const {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(static_cast<fftw_plan>(sign < 0 ? plan_fwd_ : plan_bwd_), buf, buf);
}

std::vector<cplx> TransformPlan::radial_forward(std::span<const cplx> values) const {
    if (values.size() != grid_.physical_size()) throw std::invalid_argument("physical data size mismatch");
    const auto nf = Eigen::Index(grid_.fourier_size());
    std::vector<cplx> out(grid_.spectral_size());
    Eigen::Map<const RowMatrixXcd> a(values.data(), nf, grid_.N_r);
    Eigen::Map<RowMatrixXcd> g(out.data(), nf, grid_.N_lambda);
    g.noalias() = a * fwd_c_.transpose();
    return out;
}

SpectralField TransformPlan::forward(std::span<const cplx> values) const {
    std::vector<cplx> g = radial_forward(values);
    fft(g, -1);
    const std::size_t nl = std::size_t(grid_.N_lambda);
    for (std::size_t p = 0; p < grid_.fourier_size(); ++p) {
        const double s = fwd_scale_ * phase_[p];
        for (std::size_t m = 0; m < nl; ++m) g[p * nl + m] *= s;
    }
    return SpectralField(grid_, std::move(g));
}

SpectralField TransformPlan::forward(const PhysicalField& f) const {
    require_grid(f.grid(), grid_);
    std::vector<cplx> v(f.values().begin(), f.values().end());
    return forward(v);
}

std::vector<cplx> TransformPlan::fourier_inverse(const SpectralField& F) const {
    require_grid(F.grid(), grid_);
    std::vector<cplx> g(F.coeffs().begin(), F.coeffs().end());
    const std::size_t nl = std::size_t(grid_.N_lambda);
    for (std::size_t p = 0; p < grid_.fourier_size(); ++p) {
        const double s = inv_scale_ * phase_[p];
        for (std::size_t m = 0; m < nl; ++m) g[p * nl + m] *= s;
    }
    fft(g, +1);
    return g;
}

std::vector<cplx> TransformPlan::inverse_values(const SpectralField& F) const {
    const std::vector<cplx> g = fourier_inverse(F);
    const auto nf = Eigen::Index(grid_.fourier_size());
    std::vector<cplx> out(grid_.physical_size());
    Eigen::Map<const RowMatrixXcd> gm(g.data(), nf, grid_.N_lambda);
    Eigen::Map<RowMatrixXcd> a(out.data(), nf, grid_.N_r);
    a.noalias() = gm * inv_c_.transpose();
    return out;
}

PhysicalField TransformPlan::inverse(const SpectralField& F) const {
    const std::vector<cplx> v = inverse_values(F);
    std::vector<double> re(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) re[i] = v[i].real();
    return PhysicalField(grid_, std::move(re));
}

std::vector<double> TransformPlan::synthesis_row(double r) const {
    const double alpha = grid_.alpha;
    const double c_alpha = 1.0 / (std::pow(2.0, alpha) * gamma_fn(alpha + 1.0));
    std::vector<double> row(std::size_t(grid_.N_lambda));
    for (std::size_t m = 0; m < row.size(); ++m)
        row[m] = c_alpha * freq_.weights[m] * normalized_bessel_j(alpha, freq_.nodes[m] * r);
    return row;
}

std::vector<cplx> TransformPlan::synthesize(const SpectralField& F, std::span<const double> radii) const {
    const std::vector<cplx> g = fourier_inverse(F);
    const auto nf = Eigen::Index(grid_.fourier_size());
    const auto nr = Eigen::Index(radii.size());
    Eigen::MatrixXcd s(nr, grid_.N_lambda);
    for (Eigen::Index i = 0; i < nr; ++i) {
        const auto row = synthesis_row(radii[std::size_t(i)]);
        for (Eigen::Index m = 0; m < grid_.N_lambda; ++m) s(i, m) = row[std::size_t(m)];
    }
    std::vector<cplx> out(std::size_t(nf * nr));
    Eigen::Map<const RowMatrixXcd> gm(g.data(), nf, grid_.N_lambda);
    Eigen::Map<RowMatrixXcd> a(out.data(), nf, nr);
    a.noalias() = gm * s.transpose();
    return out;
}

SpectralField forward(const PhysicalField& f, const TransformPlan& plan) { return plan.forward(f); }
PhysicalField inverse(const SpectralField& F, const TransformPlan& plan) { return plan.inverse(F); }

double spectral_lp_norm(const SpectralField& F, double p) {
    const auto w = spectral_measure_weights(F.grid());
    std::vector<double> mag(F.size());
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(F[i]);
    return weighted_lp_norm(mag, w, p);
}

double plancherel_defect(const PhysicalField& f, const TransformPlan& plan) {
    const double phys = std::pow(lp_norm(f, 2.0), 2);
    if (phys == 0.0) return 0.0;
    const double spec = std::pow(spectral_lp_norm(plan.forward(f), 2.0), 2);
    return std::abs(phys - spec) / phys;
}

}  // namespace wns
