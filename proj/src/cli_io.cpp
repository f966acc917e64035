#include "wns/cli_io.hpp"

#include "wns/special_fn.hpp"
#include "wns/translation.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace wns {

ConfigError::ConfigError(std::string key, int line, const std::string& what)
    : std::runtime_error(what), key_(std::move(key)), line_(line) {}

CsvError::CsvError(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
bool parse_number(const std::string& s, T& out) {
    if (s.empty()) return false;
    const char* b = s.data();
    const char* e = b + s.size();
    if (*b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && ptr == e;
}

struct KeyContext {
    std::string key;
    int line;
    [[noreturn]] void bad(const std::string& value, const char* want) const {
        throw ConfigError(key, line, "line " + std::to_string(line) + ": invalid value for " + key + ": '" + value + "' (expected " + want + ")");
    }
};

double as_double(const KeyContext& k, const std::string& v) {
    double x = 0.0;
    if (!parse_number(v, x) || !std::isfinite(x)) k.bad(v, "a finite number");
    return x;
}

long as_long(const KeyContext& k, const std::string& v) {
    long x = 0;
    if (!parse_number(v, x)) k.bad(v, "an integer");
    return x;
}

int as_int(const KeyContext& k, const std::string& v) {
    const long x = as_long(k, v);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) k.bad(v, "an int");
    return int(x);
}

bool as_bool(const KeyContext& k, const std::string& v) {
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    k.bad(v, "true or false");
}

using Setter = std::function<void(RunConfig&, const KeyContext&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto dbl = [&](const char* key, auto member) {
            t[key] = [member](RunConfig& c, const KeyContext& k, const std::string& v) { member(c) = as_double(k, v); };
        };
        auto integer = [&](const char* key, auto member) {
            t[key] = [member](RunConfig& c, const KeyContext& k, const std::string& v) { member(c) = as_int(k, v); };
        };
        auto boolean = [&](const char* key, auto member) {
            t[key] = [member](RunConfig& c, const KeyContext& k, const std::string& v) { member(c) = as_bool(k, v); };
        };
        integer("grid.d", [](RunConfig& c) -> int& { return c.solver.grid.d; });
        dbl("grid.alpha", [](RunConfig& c) -> double& { return c.solver.grid.alpha; });
        integer("grid.N", [](RunConfig& c) -> int& { return c.solver.grid.N; });
        dbl("grid.L", [](RunConfig& c) -> double& { return c.solver.grid.L; });
        integer("grid.N_r", [](RunConfig& c) -> int& { return c.solver.grid.N_r; });
        dbl("grid.R_max", [](RunConfig& c) -> double& { return c.solver.grid.R_max; });
        integer("grid.N_lambda", [](RunConfig& c) -> int& { return c.solver.grid.N_lambda; });
        dbl("grid.Lambda_max", [](RunConfig& c) -> double& { return c.solver.grid.Lambda_max; });

        dbl("solver.nu", [](RunConfig& c) -> double& { return c.solver.nu; });
        dbl("solver.p", [](RunConfig& c) -> double& { return c.solver.p; });
        t["solver.mode"] = [](RunConfig& c, const KeyContext& k, const std::string& v) {
            if (v == "march") c.solver.mode = StepperMode::march;
            else if (v == "picard") c.solver.mode = StepperMode::picard;
            else k.bad(v, "march or picard");
        };
        dbl("solver.dt", [](RunConfig& c) -> double& { return c.solver.dt; });
        dbl("solver.T_end", [](RunConfig& c) -> double& { return c.solver.T_end; });
        integer("solver.picard_max_iter", [](RunConfig& c) -> int& { return c.solver.picard_max_iter; });
        dbl("solver.picard_tol", [](RunConfig& c) -> double& { return c.solver.picard_tol; });
        integer("solver.picard_nodes", [](RunConfig& c) -> int& { return c.solver.picard_nodes; });
        integer("solver.quad_panels", [](RunConfig& c) -> int& { return c.solver.quad_panels; });
        boolean("solver.dealias", [](RunConfig& c) -> bool& { return c.solver.dealias; });
        boolean("solver.nonlinear", [](RunConfig& c) -> bool& { return c.solver.nonlinear; });
        dbl("solver.safety", [](RunConfig& c) -> double& { return c.solver.safety; });
        dbl("solver.overflow", [](RunConfig& c) -> double& { return c.solver.overflow; });
        t["solver.max_steps"] = [](RunConfig& c, const KeyContext& k, const std::string& v) {
            c.solver.max_steps = as_long(k, v);
        };
        dbl("solver.existence_constant", [](RunConfig& c) -> double& { return c.solver.existence_constant; });
        t["solver.kappa_mode"] = [](RunConfig& c, const KeyContext& k, const std::string& v) {
            if (v == "theorem") c.kappa_mode = KappaMode::theorem;
            else if (v == "scaling") c.kappa_mode = KappaMode::scaling;
            else k.bad(v, "theorem or scaling");
        };
        integer("solver.oracle_M", [](RunConfig& c) -> int& { return c.oracle_M; });
        dbl("solver.oracle_R", [](RunConfig& c) -> double& { return c.oracle_R; });
        dbl("solver.oracle_tol", [](RunConfig& c) -> double& { return c.oracle_tol; });

        t["initial.type"] = [](RunConfig& c, const KeyContext& k, const std::string& v) {
            if (v != "zero" && v != "shear" && v != "vortex" && v != "random") k.bad(v, "zero, shear, vortex or random");
            c.initial.type = v;
        };
        dbl("initial.amplitude", [](RunConfig& c) -> double& { return c.initial.amplitude; });
        dbl("initial.center", [](RunConfig& c) -> double& { return c.initial.center; });
        dbl("initial.width", [](RunConfig& c) -> double& { return c.initial.width; });
        dbl("initial.shear_s", [](RunConfig& c) -> double& { return c.initial.shear_s; });
        t["initial.seed"] = [](RunConfig& c, const KeyContext& k, const std::string& v) {
            std::uint64_t s = 0;
            if (!parse_number(v, s)) k.bad(v, "a non-negative integer");
            c.initial.seed = s;
        };
        integer("initial.modes", [](RunConfig& c) -> int& { return c.initial.modes; });

        t["output.dir"] = [](RunConfig& c, const KeyContext& k, const std::string& v) {
            if (v.empty()) k.bad(v, "a directory");
            c.output.dir = v;
        };
        t["output.snapshot_every"] = [](RunConfig& c, const KeyContext& k, const std::string& v) {
            c.output.snapshot_every = as_long(k, v);
        };
        return t;
    }();
    return table;
}

}  // namespace

void RunConfig::validate() const {
    try {
        solver.grid.validate();
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        if (const auto c = msg.find(": "); c != std::string::npos) msg = msg.substr(c + 2);
        const std::string key = "grid." + msg.substr(0, msg.find(' '));
        throw ConfigError(key, 0, "grid." + msg);
    }
    try {
        solver.validate();
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        throw ConfigError(msg.substr(0, msg.find(' ')), 0, msg);
    }
    auto fail = [](const std::string& key, const std::string& what) { throw ConfigError(key, 0, key + " " + what); };
    if (!(initial.width > 0.0)) fail("initial.width", "must be positive");
    if (!(initial.shear_s > 0.0)) fail("initial.shear_s", "must be positive");
    if (initial.modes < 1) fail("initial.modes", "must be >= 1");
    if (output.snapshot_every < 0) fail("output.snapshot_every", "must be >= 0");
    if (oracle_M < 2) fail("solver.oracle_M", "must be >= 2");
    if (!(oracle_R > 0.0)) fail("solver.oracle_R", "must be positive");
    if (!(oracle_tol > 0.0)) fail("solver.oracle_tol", "must be positive");
}

RunConfig parse_config(std::istream& in) {
    static const char* sections[] = {"grid", "solver", "initial", "output"};
    RunConfig cfg;
    std::string section, raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find_first_of("#;");
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(s, line, "line " + std::to_string(line) + ": unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (std::find(std::begin(sections), std::end(sections), section) == std::end(sections))
                throw ConfigError("[" + section + "]", line,
                                  "line " + std::to_string(line) + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(s, line, "line " + std::to_string(line) + ": expected key = value, got '" + s + "'");
        const std::string name = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (section.empty())
            throw ConfigError(name, line, "line " + std::to_string(line) + ": key '" + name + "' outside any section");
        const std::string key = section + "." + name;
        const auto it = setters().find(key);
        if (it == setters().end())
            throw ConfigError(key, line, "line " + std::to_string(line) + ": unknown key " + key);
        it->second(cfg, KeyContext{key, line}, value);
    }
    // the cosine-kernel endpoint is admitted for configured runs as well
    cfg.solver.grid.classical_limit = cfg.solver.grid.alpha == -0.5;
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    return parse_config(in);
}

std::string echo_config(const RunConfig& c) {
    const auto& g = c.solver.grid;
    const auto& s = c.solver;
    std::ostringstream o;
    o << "[grid]\n"
      << "d = " << g.d << "\nalpha = " << fmt(g.alpha) << "\nN = " << g.N << "\nL = " << fmt(g.L)
      << "\nN_r = " << g.N_r << "\nR_max = " << fmt(g.R_max) << "\nN_lambda = " << g.N_lambda
      << "\nLambda_max = " << fmt(g.Lambda_max) << "\n\n[solver]\n"
      << "nu = " << fmt(s.nu) << "\np = " << fmt(s.p) << "\nmode = " << (s.mode == StepperMode::march ? "march" : "picard")
      << "\ndt = " << fmt(s.dt) << "\nT_end = " << fmt(s.T_end) << "\npicard_max_iter = " << s.picard_max_iter
      << "\npicard_tol = " << fmt(s.picard_tol) << "\npicard_nodes = " << s.picard_nodes
      << "\nquad_panels = " << s.quad_panels << "\ndealias = " << (s.dealias ? "true" : "false")
      << "\nnonlinear = " << (s.nonlinear ? "true" : "false") << "\nsafety = " << fmt(s.safety)
      << "\noverflow = " << fmt(s.overflow) << "\nmax_steps = " << s.max_steps
      << "\nexistence_constant = " << fmt(s.existence_constant)
      << "\nkappa_mode = " << (c.kappa_mode == KappaMode::theorem ? "theorem" : "scaling")
      << "\noracle_M = " << c.oracle_M << "\noracle_R = " << fmt(c.oracle_R) << "\noracle_tol = " << fmt(c.oracle_tol)
      << "\n\n[initial]\n"
      << "type = " << c.initial.type << "\namplitude = " << fmt(c.initial.amplitude)
      << "\ncenter = " << fmt(c.initial.center) << "\nwidth = " << fmt(c.initial.width)
      << "\nshear_s = " << fmt(c.initial.shear_s) << "\nseed = " << c.initial.seed << "\nmodes = " << c.initial.modes
      << "\n\n[output]\n"
      << "dir = " << c.output.dir << "\nsnapshot_every = " << c.output.snapshot_every << "\n";
    return o.str();
}

VelocityState initial_state(const RunConfig& c) {
    const auto& g = c.solver.grid;
    const auto& i = c.initial;
    if (i.type == "zero") return zero_state(g);
    if (i.type == "shear") return shear_state(g, i.amplitude, i.shear_s);
    if (i.type == "vortex") return vortex_state(g, i.amplitude, i.center, i.width);
    if (i.type == "random") return random_stream_state(g, i.amplitude, i.seed, i.modes);
    throw ConfigError("initial.type", 0, "unknown initial.type " + i.type);
}

VectorFunction classical_initial(const RunConfig& c) {
    const auto& i = c.initial;
    if (i.type == "zero")
        return [](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
    if (i.type == "shear")
        return [a = i.amplitude, s = i.shear_s](std::span<const double> x, std::span<double> out) {
            std::fill(out.begin(), out.end(), 0.0);
            out[0] = a * std::exp(-s * x.back() * x.back());
        };
    if (i.type == "vortex") return classical_vortex(c.solver.grid.d, i.amplitude, i.center, i.width);
    throw ConfigError("initial.type", 0, "initial.type " + i.type + " has no pointwise form for the oracle");
}

// --- CSV -------------------------------------------------------------------

namespace {
constexpr const char* kCsvHeader = "t,lp_norm,l2_norm,div_norm,lower_bound";
}

void write_norm_csv(std::ostream& out, const NormSeries& s) {
    out << kCsvHeader << '\n';
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << fmt(s.times[i]) << ',' << fmt(s.lp_norms[i]) << ',' << fmt(s.l2_norms[i]) << ',' << fmt(s.div_norms[i])
            << ',';
        if (const auto lb = s.lower_bound(s.times[i])) out << fmt(*lb);
        out << '\n';
    }
}

void write_norm_csv(const std::filesystem::path& path, const NormSeries& s) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_norm_csv(out, s);
    if (!out) throw IoError("write failed for " + path.string());
}

NormSeries read_norm_csv(std::istream& in) {
    NormSeries s;
    std::string raw;
    int line = 0;
    bool header = false;
    while (std::getline(in, raw)) {
        ++line;
        const std::string row = trim(raw);
        if (!header) {
            if (row != kCsvHeader) throw CsvError(line, "expected header '" + std::string(kCsvHeader) + "'");
            header = true;
            continue;
        }
        if (row.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(row);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(trim(cell));
        if (row.back() == ',') cells.emplace_back();
        if (cells.size() != 5)
            throw CsvError(line, "expected 5 columns, found " + std::to_string(cells.size()));
        double v[4];
        for (int k = 0; k < 4; ++k)
            if (!parse_number(cells[std::size_t(k)], v[k]))
                throw CsvError(line, "column " + std::to_string(k + 1) + " is not a number: '" + cells[std::size_t(k)] + "'");
        // a blown-up run may record inf or nan norms, never times
        if (!std::isfinite(v[0])) throw CsvError(line, "time is not finite");
        double lb = 0.0;
        if (!cells[4].empty() && !parse_number(cells[4], lb))
            throw CsvError(line, "lower_bound is not a number: '" + cells[4] + "'");
        if (!s.times.empty() && !(v[0] > s.times.back())) throw CsvError(line, "times must increase");
        s.push(v[0], v[1], v[2], v[3]);
    }
    if (!header) throw CsvError(1, "empty file, expected header '" + std::string(kCsvHeader) + "'");
    return s;
}

NormSeries read_norm_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    return read_norm_csv(in);
}

// --- manifest --------------------------------------------------------------

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
    nlohmann::ordered_json j;
    j["command"] = m.command;
    j["version"] = m.version;
    j["started_at"] = m.started_at;
    j["wall_seconds"] = m.wall_seconds;
    j["threads"] = m.threads;
    j["config"] = m.config_echo;
    auto& checks = j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : m.checks)
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"value", c.value},
                          {"tolerance", c.tolerance},
                          {"seconds", c.seconds},
                          {"detail", c.detail}});
    auto& res = j["results"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.results) res[k] = v;
    std::ofstream out(dir / "manifest.json");
    if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
    out << j.dump(2) << '\n';
}

// --- selftest --------------------------------------------------------------

namespace {

double lambda_sq(const GridSpec& g, const RadialQuadrature& fq, std::size_t i) {
    const std::size_t nl = std::size_t(g.N_lambda);
    std::size_t p = i / nl;
    double s = fq.nodes[i % nl] * fq.nodes[i % nl];
    for (int a = 0; a < g.d; ++a) {
        const double k = g.fourier_frequency(int(p % std::size_t(g.N)));
        s += k * k;
        p /= std::size_t(g.N);
    }
    return s;
}

double rel_sup(std::span<const double> got, std::span<const double> want) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        num = std::max(num, std::abs(got[i] - want[i]));
        den = std::max(den, std::abs(want[i]));
    }
    return den > 0.0 ? num / den : num;
}

PhysicalField heat_kernel(const GridSpec& g, double t) {
    return sample_field(g, [&](std::span<const double> x) {
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        return std::pow(2.0 * t, -(g.alpha + 0.5 * g.d + 1.0)) * std::exp(-r2 / (4.0 * t));
    });
}

struct SelfCheck {
    const char* name;
    double tolerance;
    std::function<std::pair<double, std::string>(int n_r)> run;  // worst defect, detail
};

GridSpec desk(double alpha, int n_r) {
    GridSpec g = GridSpec::desk(1, alpha);
    g.N_r = n_r;
    return g;
}

const std::vector<SelfCheck>& suite() {
    static const std::vector<SelfCheck> s = {
        {"gaussian_pair", 1e-6,
         [](int n_r) {
             double worst = 0.0;
             std::string where;
             for (double alpha : {0.0, 0.5, 1.5}) {
                 const GridSpec g = desk(alpha, n_r);
                 auto plan = TransformPlan::get(g);
                 for (double s : {0.25, 0.5, 1.0, 2.0}) {
                     const auto F = plan->forward(make_test_field(g, Gaussian{s}));
                     std::vector<double> want(F.size()), got(F.size());
                     for (std::size_t i = 0; i < F.size(); ++i) {
                         want[i] = std::pow(2.0 * s, -(alpha + 1.5)) *
                                   std::exp(-lambda_sq(g, plan->frequencies(), i) / (4.0 * s));
                         got[i] = F[i].real();
                     }
                     const double e = rel_sup(got, want);
                     if (e > worst) {
                         worst = e;
                         where = "alpha=" + fmt(alpha) + " s=" + fmt(s);
                     }
                 }
             }
             return std::pair{worst, where};
         }},
        {"plancherel", 1e-8,
         [](int n_r) {
             double worst = 0.0;
             for (double alpha : {0.0, 1.5}) {
                 const GridSpec g = desk(alpha, n_r);
                 auto plan = TransformPlan::get(g);
                 for (std::uint64_t seed = 0; seed < 10; ++seed)
                     worst = std::max(worst, plancherel_defect(make_test_field(g, BandLimitedRandom{seed, 0.0}), *plan));
             }
             return std::pair{worst, std::string("20 band-limited fields")};
         }},
        {"round_trip", 1e-8,
         [](int n_r) {
             double worst = 0.0;
             for (double alpha : {0.0, 0.5, 1.5}) {
                 const GridSpec g = desk(alpha, n_r);
                 auto plan = TransformPlan::get(g);
                 for (std::uint64_t seed = 0; seed < 4; ++seed) {
                     const auto f = make_test_field(g, BandLimitedRandom{seed, 0.0});
                     worst = std::max(worst, rel_sup(plan->inverse(plan->forward(f)).values(), f.values()));
                 }
             }
             return std::pair{worst, std::string("inverse(forward(f)) on band-limited fields")};
         }},
        {"heat_convolution", 1e-6,
         [](int n_r) {
             double worst = 0.0;
             for (double alpha : {0.0, 0.5, 1.5}) {
                 const GridSpec g = desk(alpha, n_r);
                 const auto c = convolve(heat_kernel(g, 0.25), heat_kernel(g, 0.25), ConvolutionMethod::spectral);
                 worst = std::max(worst, rel_sup(c.values(), heat_kernel(g, 0.5).values()));
             }
             return std::pair{worst, std::string("q_1/4 * q_1/4 = q_1/2")};
         }},
        {"product_formula", 1e-6,
         [](int) {
             std::mt19937_64 rng(99);
             std::uniform_real_distribution<double> u(0.0, 1.0);
             double worst = 0.0;
             for (double alpha : {0.0, 0.5, 1.5})
                 for (int k = 0; k < 50; ++k) {
                     const double a[] = {16.0 * u(rng) - 8.0, 12.0 * u(rng)};
                     const double b[] = {16.0 * u(rng) - 8.0, 12.0 * u(rng)};
                     const double l[] = {16.0 * u(rng) - 8.0, 8.0 * u(rng)};
                     worst = std::max(worst, product_formula_defect(alpha, a, b, l));
                 }
             return std::pair{worst, std::string("150 random triples")};
         }},
        {"kernel_bound", 0.0,
         [](int n_r) {
             double worst = 0.0;
             for (double alpha : {0.0, 0.5, 1.5}) {
                 auto plan = TransformPlan::get(desk(alpha, n_r));
                 for (double x : plan->radial().nodes)
                     for (double l : plan->frequencies().nodes)
                         worst = std::max(worst, std::abs(normalized_bessel_j(alpha, x * l)) - 1.0);
             }
             return std::pair{std::max(worst, 0.0), std::string("max(|j_alpha| - 1)")};
         }},
    };
    return s;
}

}  // namespace

std::vector<std::string> selftest_names() {
    std::vector<std::string> n;
    for (const auto& c : suite()) n.emplace_back(c.name);
    return n;
}

std::vector<CheckResult> run_selftest(int n_r) {
    if (n_r < 2) throw std::invalid_argument("grid-nr must be >= 2");
    std::vector<CheckResult> out;
    for (const auto& c : suite()) {
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult r;
        r.name = c.name;
        r.tolerance = c.tolerance;
        try {
            auto [v, detail] = c.run(n_r);
            r.value = v;
            r.detail = std::move(detail);
            r.passed = std::isfinite(v) && v <= c.tolerance;
        } catch (const std::exception& e) {
            r.value = std::numeric_limits<double>::quiet_NaN();
            r.detail = e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace wns
