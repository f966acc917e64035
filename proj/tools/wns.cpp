// wns: selftest | simulate <config> | norms <csv>
// Exit codes: 0 success, 1 check or validation failure, 2 I/O error.

#include "wns/cli_io.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#ifndef WNS_VERSION
#define WNS_VERSION "0.0.0"
#endif

using namespace wns;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kFail = 1, kIo = 2;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// WNS_THREADS caps worker parallelism; the numerical kernels are serial, so
// this only bounds Eigen.
int thread_cap() {
    const char* env = std::getenv("WNS_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096) throw ConfigError("WNS_THREADS", 0, std::string("WNS_THREADS must be a positive integer, got '") + env + "'");
    Eigen::setNbThreads(int(n));
    return int(n);
}

void print_check(const CheckResult& c) {
    std::printf("%s %-18s defect=%-12s tol=%-8s %6.2fs  %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                num(c.value).c_str(), num(c.tolerance).c_str(), c.seconds, c.detail.c_str());
}

int cmd_selftest(int n_r, bool list) {
    if (list) {
        for (const auto& n : selftest_names()) std::printf("%s\n", n.c_str());
        return kOk;
    }
    thread_cap();
    bool ok = true;
    for (const auto& c : run_selftest(n_r)) {
        print_check(c);
        ok = ok && c.passed;
    }
    std::printf("%s\n", ok ? "selftest passed" : "selftest FAILED");
    return ok ? kOk : kFail;
}

std::string snapshot_name(long step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap_%06ld.wnsf", step);
    return buf;
}

void save_snapshot(const fs::path& path, const VelocityState& s) {
    try {
        write_snapshot(path, s);
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }
}

int cmd_simulate(const std::string& config_path, bool oracle, const std::string& out_flag,
                 std::optional<double> alpha) {
    const auto t0 = std::chrono::steady_clock::now();
    RunManifest man;
    man.command = "simulate " + config_path + (oracle ? " --oracle" : "");
    man.version = WNS_VERSION;
    man.started_at = utc_timestamp();

    RunConfig cfg = load_config(config_path);
    if (alpha) {
        cfg.solver.grid.alpha = *alpha;
        cfg.solver.grid.classical_limit = *alpha == -0.5;
    }
    if (!out_flag.empty()) cfg.output.dir = out_flag;
    cfg.validate();
    if (oracle && cfg.solver.grid.alpha != -0.5)
        throw ConfigError("grid.alpha", 0, "--oracle needs grid.alpha = -0.5 (cosine kernel)");
    const VectorFunction oracle_u0 = oracle ? classical_initial(cfg) : VectorFunction{};
    man.threads = thread_cap();
    man.config_echo = echo_config(cfg);

    const fs::path dir = cfg.output.dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

    const SolverConfig& sc = cfg.solver;
    const VelocityState u0 = initial_state(cfg);
    const double u0_norm = lp_norm(u0, sc.p);
    const double C = sc.existence_constant > 0.0 ? sc.existence_constant : existence_constant(calibrate_C(sc), sc);
    man.results.emplace_back("existence_constant", num(C));
    man.results.emplace_back("existence_time", num(existence_time(u0_norm, sc, C)));

    std::vector<VelocityState> kept;  // for the oracle comparison
    NormSeries series;
    VelocityState final_state;
    bool failed = false;
    auto snapshot = [&](const VelocityState& s, long step) {
        if (cfg.output.snapshot_every > 0 && step % cfg.output.snapshot_every == 0)
            save_snapshot(dir / snapshot_name(step), s);
        if (oracle) kept.push_back(s);
    };

    if (sc.mode == StepperMode::picard) {
        try {
            const PicardResult pr = picard_solve(u0, sc, sc.T_end);
            for (std::size_t i = 0; i < pr.states.size(); ++i) {
                const auto& s = pr.states[i];
                series.push(s.t, lp_norm(s, sc.p), lp_norm(s, 2.0), s.div_norm);
                snapshot(s, long(i));
            }
            final_state = pr.states.back();
            double worst = 0.0;
            for (double r : pr.ratios) worst = std::max(worst, r);
            man.results.emplace_back("picard_iterations", std::to_string(pr.iterations));
            man.results.emplace_back("picard_worst_ratio", num(worst));
            man.results.emplace_back("mild_residual", num(pr.residual));
            std::printf("picard: %d iterations, worst ratio %s, residual %s\n", pr.iterations, num(worst).c_str(),
                        num(pr.residual).c_str());
        } catch (const ContractionFailure& e) {
            std::fprintf(stderr, "picard failed: %s\n", e.what());
            man.results.emplace_back("picard_failure", e.what());
            failed = true;
        }
    } else {
        MarchResult mr = march(u0, sc, snapshot);
        series = std::move(mr.series);
        final_state = std::move(mr.final_state);
        man.results.emplace_back("stop_reason", mr.stop_reason);
        man.results.emplace_back("steps", std::to_string(mr.steps));
        std::printf("march: %ld steps, %s\n", mr.steps, mr.stop_reason.c_str());
    }

    if (series.size() > 0) {
        const BlowupFit fit = blowup_monitor(series, sc, cfg.kappa_mode);
        if (fit.signature) attach_fit(series, fit);
        man.results.emplace_back("blowup_monitor", fit.message);
        write_norm_csv(dir / "norms.csv", series);
        save_snapshot(dir / "final.wnsf", final_state);
        man.results.emplace_back("final_lp_norm", num(series.lp_norms.back()));
    }

    if (oracle && !failed) {
        const auto ct0 = std::chrono::steady_clock::now();
        const CosineGrid cg = cosine_grid_for(sc.grid, cfg.oracle_M, cfg.oracle_R);
        ClassicalOptions opt;
        opt.p = sc.p;
        opt.dealias = sc.dealias;
        opt.nonlinear = sc.nonlinear;
        opt.times = series.times;
        const ClassicalResult o = classical_march(cg, oracle_u0, sc.nu, sc.dt, series.times.back() - u0.t, opt);
        write_norm_csv(dir / "oracle_norms.csv", o.series);
        CheckResult c;
        c.name = "oracle_gap";
        c.tolerance = cfg.oracle_tol;
        const std::size_t n = std::min(o.states.size(), kept.size());
        for (std::size_t i = 0; i < n; ++i) c.value = std::max(c.value, relative_l2_gap(kept[i], cg, o.states[i]));
        c.passed = n == kept.size() && c.value <= c.tolerance;
        c.detail = "relative L2 gap over " + std::to_string(n) + " samples";
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - ct0).count();
        print_check(c);
        failed = failed || !c.passed;
        man.checks.push_back(std::move(c));
    }

    man.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir, man);
    std::printf("wrote %s\n", dir.string().c_str());
    return failed ? kFail : kOk;
}

int cmd_norms(const std::string& csv, const std::string& kappa_mode, double p, double alpha, int d) {
    const NormSeries s = read_norm_csv(fs::path(csv));
    SolverConfig cfg;
    cfg.p = p;
    cfg.grid.alpha = alpha;
    cfg.grid.d = d;
    cfg.grid.classical_limit = alpha == -0.5;
    if (!(p > 2.0 * alpha + d + 2.0))
        throw ConfigError("p", 0, "p must satisfy 2 alpha + d + 2 < p");
    const KappaMode mode = kappa_mode == "scaling" ? KappaMode::scaling : KappaMode::theorem;
    const BlowupFit f = blowup_monitor(s, cfg, mode);
    std::printf("samples: %zu\n%s\n", s.size(), f.message.c_str());
    if (f.signature) {
        std::printf("T*            %.10g\n", f.Tstar);
        std::printf("kappa (fit)   %.10g\n", f.kappa);
        std::printf("kappa ref     %.10g (%s)\n", f.kappa_reference, kappa_mode.c_str());
        std::printf("C (fit)       %.10g\n", f.C);
        std::printf("bound C       %.10g\n", f.bound_constant);
        std::printf("rms residual  %.3g\n", f.rms_residual);
        std::printf("violations    %d\n", f.violations);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weinstein Navier-Stokes mild-solution solver"};
    app.require_subcommand(1);

    auto* st = app.add_subcommand("selftest", "closed-form identity suite");
    int grid_nr = GridSpec{}.N_r;
    bool list = false;
    st->add_option("--grid-nr", grid_nr, "radial nodes of the desk grid")->check(CLI::PositiveNumber);
    st->add_flag("--list", list, "print check names only");

    auto* sim = app.add_subcommand("simulate", "run the solver from a config file");
    std::string config, out_dir;
    bool oracle = false;
    std::optional<double> alpha;
    sim->add_option("config", config, "config file")->required();
    sim->add_flag("--oracle", oracle, "also run the cosine-kernel oracle and report the gap");
    sim->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sim->add_option("--alpha", alpha, "override grid.alpha");

    auto* nm = app.add_subcommand("norms", "fit a blow-up profile to a stored norm series");
    std::string csv, kappa_mode = "theorem";
    double p = 6.0, nalpha = 0.0;
    int nd = 1;
    nm->add_option("csv", csv, "norm series CSV")->required();
    nm->add_option("--kappa-mode", kappa_mode, "reference exponent")->check(CLI::IsMember({"theorem", "scaling"}));
    nm->add_option("--p", p, "Lebesgue exponent of the series");
    nm->add_option("--alpha", nalpha, "alpha of the run");
    nm->add_option("--d", nd, "number of periodic axes")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kFail;
    }

    try {
        if (*st) return cmd_selftest(grid_nr, list);
        if (*sim) return cmd_simulate(config, oracle, out_dir, alpha);
        if (*nm) return cmd_norms(csv, kappa_mode, p, nalpha, nd);
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kIo;
    } catch (const CsvError& e) {
        std::fprintf(stderr, "error: %s: %s\n", csv.c_str(), e.what());
        return kFail;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error [%s]: %s\n", e.key().c_str(), e.what());
        return kFail;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFail;
    }
    return kFail;
}
