#include "wns/grid.hpp"

#include "wns/special_fn.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

namespace wns {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid grid: ") + what);
}

}  // namespace

void GridSpec::validate() const {
    require(d >= 1, "d must be >= 1");
    require(std::isfinite(alpha), "alpha must be finite");
    if (classical_limit) {
        require(alpha >= -0.5, "alpha must be >= -1/2");
    } else {
        require(alpha > -0.5, "alpha must be > -1/2");
    }
    require(N >= 2 && N % 2 == 0, "N must be even and >= 2");
    require(L > 0.0 && std::isfinite(L), "L must be positive");
    require(N_r >= 2, "N_r must be >= 2");
    require(R_max > 0.0 && std::isfinite(R_max), "R_max must be positive");
    require(N_lambda >= 2, "N_lambda must be >= 2");
    require(Lambda_max > 0.0 && std::isfinite(Lambda_max), "Lambda_max must be positive");
}

std::size_t GridSpec::fourier_size() const {
    std::size_t n = 1;
    for (int a = 0; a < d; ++a) n *= std::size_t(N);
    return n;
}

double GridSpec::dk() const { return 2.0 * std::numbers::pi / L; }

double GridSpec::fourier_frequency(int m) const {
    const int signed_m = (m < N / 2) ? m : m - N;
    return dk() * double(signed_m);
}

double GridSpec::measure_constant() const {
    return 1.0 / (std::pow(2.0 * std::numbers::pi, 0.5 * double(d)) * std::pow(2.0, alpha) *
                  gamma_fn(alpha + 1.0));
}

GridSpec GridSpec::desk(int d, double alpha) {
    GridSpec g;
    g.d = d;
    g.alpha = alpha;
    return g;
}

RadialQuadrature radial_quadrature(double alpha, double R, int n) {
    // x = R (1 + t) / 2 maps the weight (1+t)^{2 alpha + 1} onto x^{2 alpha + 1}.
    const double b = 2.0 * alpha + 1.0;
    const GaussRule r = gauss_jacobi_rule(std::size_t(n), 0.0, b);
    const double scale = std::pow(0.5 * R, b + 1.0);
    RadialQuadrature q;
    q.nodes.resize(std::size_t(n));
    q.weights.resize(std::size_t(n));
    for (std::size_t i = 0; i < std::size_t(n); ++i) {
        q.nodes[i] = 0.5 * R * (1.0 + r.nodes[i]);
        q.weights[i] = scale * r.weights[i];
    }
    return q;
}

RadialQuadrature radial_nodes(const GridSpec& grid) {
    return radial_quadrature(grid.alpha, grid.R_max, grid.N_r);
}

RadialQuadrature frequency_nodes(const GridSpec& grid) {
    return radial_quadrature(grid.alpha, grid.Lambda_max, grid.N_lambda);
}

PhysicalField::PhysicalField(GridSpec grid) : grid_(grid), values_(grid.physical_size(), 0.0) {
    grid_.validate();
}

PhysicalField::PhysicalField(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    grid_.validate();
    if (values_.size() != grid_.physical_size()) {
        throw std::invalid_argument("physical field size does not match its grid");
    }
}

SpectralField::SpectralField(GridSpec grid) : grid_(grid), coeffs_(grid.spectral_size()) {
    grid_.validate();
}

SpectralField::SpectralField(GridSpec grid, std::vector<cplx> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
    grid_.validate();
    if (coeffs_.size() != grid_.spectral_size()) {
        throw std::invalid_argument("spectral field size does not match its grid");
    }
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    if (!(o.grid_ == grid_)) throw std::invalid_argument("spectral field grid mismatch");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    if (!(o.grid_ == grid_)) throw std::invalid_argument("spectral field grid mismatch");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(cplx c) {
    for (auto& v : coeffs_) v *= c;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx c, SpectralField a) { return a *= c; }

std::vector<double> measure_weights(const GridSpec& grid) {
    grid.validate();
    const RadialQuadrature rq = radial_nodes(grid);
    const double base = grid.measure_constant() * std::pow(grid.dx(), double(grid.d));
    std::vector<double> w(grid.physical_size());
    const std::size_t nr = std::size_t(grid.N_r);
    for (std::size_t p = 0; p < grid.fourier_size(); ++p)
        for (std::size_t j = 0; j < nr; ++j) w[p * nr + j] = base * rq.weights[j];
    return w;
}

std::vector<double> spectral_measure_weights(const GridSpec& grid) {
    grid.validate();
    const RadialQuadrature fq = frequency_nodes(grid);
    const double base = grid.measure_constant() * std::pow(grid.dk(), double(grid.d));
    std::vector<double> w(grid.spectral_size());
    const std::size_t nl = std::size_t(grid.N_lambda);
    for (std::size_t p = 0; p < grid.fourier_size(); ++p)
        for (std::size_t m = 0; m < nl; ++m) w[p * nl + m] = base * fq.weights[m];
    return w;
}

double weighted_lp_norm(std::span<const double> abs_values, std::span<const double> weights, double p) {
    if (std::isnan(p) || p < 1.0) throw std::invalid_argument("L^p norm requires p >= 1");
    if (abs_values.size() != weights.size()) throw std::invalid_argument("weight size mismatch");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : abs_values) m = std::max(m, std::abs(v));
        return m;
    }
    // scale by the max to avoid overflow for large p
    double m = 0.0;
    for (double v : abs_values) m = std::max(m, std::abs(v));
    if (m == 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < abs_values.size(); ++i) {
        sum += weights[i] * std::pow(std::abs(abs_values[i]) / m, p);
    }
    return m * std::pow(sum, 1.0 / p);
}

double lp_norm(const PhysicalField& f, double p) {
    const auto w = measure_weights(f.grid());
    return weighted_lp_norm(f.values(), w, p);
}

double lp_norm(const VelocityState& u, double p) {
    if (u.components.empty()) throw std::invalid_argument("velocity state has no components");
    const GridSpec& g = u.grid();
    std::vector<double> mag(g.physical_size(), 0.0);
    for (const auto& c : u.components) {
        if (!(c.grid() == g)) throw std::invalid_argument("velocity components on different grids");
        for (std::size_t i = 0; i < mag.size(); ++i) mag[i] += c[i] * c[i];
    }
    for (auto& v : mag) v = std::sqrt(v);
    return weighted_lp_norm(mag, measure_weights(g), p);
}

namespace {

PhysicalField band_limited_random(const GridSpec& grid, const BandLimitedRandom& spec) {
    const double cutoff = spec.cutoff > 0.0 ? spec.cutoff : grid.Lambda_max;
    // A Gaussian of width s has spectrum exp(-lambda^2 / (4 s)); s_hi keeps
    // the content beyond the cutoff below e^-28.
    const double s_hi = cutoff * cutoff / 112.0;
    const double s_lo = 0.5 * s_hi;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    constexpr int kTerms = 6;
    struct Term {
        double amp, s;
        int degree;
        std::vector<double> shift;
    };
    std::vector<Term> terms;
    for (int m = 0; m < kTerms; ++m) {
        Term t;
        t.amp = 2.0 * unit(rng) - 1.0;
        t.s = s_lo + (s_hi - s_lo) * unit(rng);
        t.degree = unit(rng) < 0.5 ? 0 : 1;
        for (int a = 0; a < grid.d; ++a) t.shift.push_back((unit(rng) - 0.5) * 0.25 * grid.L);
        terms.push_back(std::move(t));
    }
    return sample_field(grid, [&](std::span<const double> x) {
        const double r2 = x[std::size_t(grid.d)] * x[std::size_t(grid.d)];
        double v = 0.0;
        for (const auto& t : terms) {
            double q = 0.0;
            for (int a = 0; a < grid.d; ++a) {
                const double dxa = x[std::size_t(a)] - t.shift[std::size_t(a)];
                q += dxa * dxa;
            }
            const double poly = t.degree == 0 ? 1.0 : t.s * r2;
            v += t.amp * poly * std::exp(-t.s * (q + r2));
        }
        return v;
    });
}

}  // namespace

PhysicalField make_test_field(const GridSpec& grid, const TestFieldKind& kind) {
    grid.validate();
    return std::visit(
        [&](const auto& k) -> PhysicalField {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Gaussian>) {
                if (!(k.s > 0.0)) throw std::invalid_argument("gaussian test field needs s > 0");
                return sample_field(grid, [s = k.s](std::span<const double> x) {
                    double r2 = 0.0;
                    for (double v : x) r2 += v * v;
                    return std::exp(-s * r2);
                });
            } else if constexpr (std::is_same_v<K, BandLimitedRandom>) {
                return band_limited_random(grid, k);
            } else {
                PhysicalField f(grid);
                std::fill(f.values().begin(), f.values().end(), k.c);
                return f;
            }
        },
        kind);
}

// --- snapshots -------------------------------------------------------------

namespace {

template <class T>
void put(std::ostream& os, T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        v = std::bit_cast<T>(bytes);
    }
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("snapshot truncated");
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        v = std::bit_cast<T>(bytes);
    }
    return v;
}

constexpr char kMagic[4] = {'W', 'N', 'S', 'F'};

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open snapshot for writing: " + path.string());
    os.write(kMagic, 4);
    put<std::uint32_t>(os, kSnapshotVersion);
    put<std::uint32_t>(os, std::uint32_t(snap.grid.d));
    put<double>(os, snap.grid.alpha);
    put<std::uint32_t>(os, std::uint32_t(snap.grid.N));
    put<std::uint32_t>(os, std::uint32_t(snap.grid.N_r));
    put<double>(os, snap.grid.L);
    put<double>(os, snap.grid.R_max);
    put<double>(os, snap.time);
    put<std::uint32_t>(os, std::uint32_t(snap.components.size()));
    for (const auto& c : snap.components) {
        if (c.size() != snap.grid.physical_size())
            throw std::invalid_argument("snapshot component size does not match grid");
        for (double v : c) put<double>(os, v);
    }
    if (!os) throw std::runtime_error("failed writing snapshot: " + path.string());
}

void write_snapshot(const std::filesystem::path& path, const VelocityState& state) {
    Snapshot s;
    s.grid = state.grid();
    s.time = state.t;
    for (const auto& c : state.components) s.components.emplace_back(c.values().begin(), c.values().end());
    write_snapshot(path, s);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open snapshot: " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("not a WNSF snapshot");
    const auto version = get<std::uint32_t>(is);
    if (version != kSnapshotVersion) throw std::runtime_error("unsupported snapshot version");
    Snapshot s;
    s.grid.d = int(get<std::uint32_t>(is));
    s.grid.alpha = get<double>(is);
    s.grid.N = int(get<std::uint32_t>(is));
    s.grid.N_r = int(get<std::uint32_t>(is));
    s.grid.L = get<double>(is);
    s.grid.R_max = get<double>(is);
    s.time = get<double>(is);
    s.grid.classical_limit = s.grid.alpha == -0.5;
    const auto count = get<std::uint32_t>(is);
    const std::size_t n = s.grid.physical_size();
    for (std::uint32_t c = 0; c < count; ++c) {
        std::vector<double> v(n);
        for (auto& x : v) x = get<double>(is);
        s.components.push_back(std::move(v));
    }
    return s;
}

}  // namespace wns
