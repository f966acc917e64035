#include "doctest.h"

#include "wns/cli_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace wns;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string error_key(const std::string& text) {
    try {
        parse(text).validate();
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}

NormSeries read_csv(const std::string& text) {
    std::istringstream in(text);
    return read_norm_csv(in);
}

int csv_error_line(const std::string& text) {
    try {
        read_csv(text);
    } catch (const CsvError& e) {
        return e.line();
    }
    return 0;
}

const char* kSmall = R"(
# comment
[grid]
N = 16
L = 12.566370614359172   ; inline comment
N_r = 32
R_max = 10
N_lambda = 32

[solver]
nu = 0.5
mode = march
dt = 0.01
T_end = 0.05

[initial]
type = vortex
amplitude = 1e-3

[output]
dir = somewhere
)";

}  // namespace

TEST_CASE("config parses sections and defaults") {
    const RunConfig c = parse(kSmall);
    CHECK(c.solver.grid.N == 16);
    CHECK(c.solver.grid.L == doctest::Approx(4.0 * 3.141592653589793));
    CHECK(c.solver.grid.N_lambda == 32);
    CHECK(c.solver.grid.Lambda_max == GridSpec{}.Lambda_max);
    CHECK(c.solver.nu == 0.5);
    CHECK(c.solver.mode == StepperMode::march);
    CHECK(c.solver.picard_tol == 1e-10);
    CHECK(c.initial.type == "vortex");
    CHECK(c.output.dir == "somewhere");
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("config echo parses back to the same run") {
    RunConfig c = parse(kSmall);
    c.solver.dt = 0.1 / 3.0;
    c.initial.seed = 12345678901234ull;
    c.kappa_mode = KappaMode::scaling;
    c.solver.mode = StepperMode::picard;
    const std::string echo = echo_config(c);
    const RunConfig back = parse(echo);
    CHECK(back.solver.grid == c.solver.grid);
    CHECK(back.solver.dt == c.solver.dt);
    CHECK(back.initial.seed == c.initial.seed);
    CHECK(back.kappa_mode == KappaMode::scaling);
    CHECK(back.solver.mode == StepperMode::picard);
    CHECK(echo_config(back) == echo);
}

TEST_CASE("config errors name the key") {
    CHECK(error_key("[solver]\nnu = fast\n") == "solver.nu");
    CHECK(error_key("[solver]\nwhatever = 1\n") == "solver.whatever");
    CHECK(error_key("[mesh]\n") == "[mesh]");
    CHECK(error_key("N = 3\n") == "N");
    CHECK(error_key("[grid]\nN = 7\n") == "grid.N");
    CHECK(error_key("[grid]\nN_r = 1\n") == "grid.N_r");
    CHECK(error_key("[solver]\nnu = -1\n") == "solver.nu");
    CHECK(error_key("[solver]\ndealias = maybe\n") == "solver.dealias");
    CHECK(error_key("[initial]\ntype = soliton\n") == "initial.type");
    CHECK(error_key("[output]\nsnapshot_every = -2\n") == "output.snapshot_every");
    CHECK(error_key("[grid]\nalpha = -0.7\n") == "grid.alpha");
    try {
        parse("[grid]\n\n[solver]\nnu = fast\n");
        FAIL("no error");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 4);
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
}

TEST_CASE("p at or below 2 alpha + d + 2 is rejected with the hypothesis") {
    try {
        parse("[grid]\nalpha = 1.5\n[solver]\np = 6\n").validate();
        FAIL("no error");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "solver.p");
        CHECK(std::string(e.what()).find("2 alpha + d + 2 < p") != std::string::npos);
    }
    CHECK_NOTHROW(parse("[grid]\nalpha = 1.5\n[solver]\np = 6.5\n").validate());
}

TEST_CASE("alpha = -1/2 is admitted from a config") {
    const RunConfig c = parse("[grid]\nalpha = -0.5\n");
    CHECK(c.solver.grid.classical_limit);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("missing config file is an io error naming the path") {
    try {
        load_config("/nonexistent/run.cfg");
        FAIL("no error");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/run.cfg") != std::string::npos);
    }
}

TEST_CASE("initial data from the config") {
    RunConfig c = parse(kSmall);
    c.initial.type = "zero";
    CHECK(lp_norm(initial_state(c), 6.0) == 0.0);
    for (const char* t : {"shear", "vortex", "random"}) {
        c.initial.type = t;
        const auto u = initial_state(c);
        CHECK(lp_norm(u, 6.0) > 0.0);
        CHECK(u.grid() == c.solver.grid);
    }
    c.initial.type = "random";
    CHECK_THROWS_AS(classical_initial(c), ConfigError);
    c.initial.type = "shear";
    const auto f = classical_initial(c);
    double x[] = {0.3, 1.0}, out[2];
    f(x, out);
    CHECK(out[0] == doctest::Approx(c.initial.amplitude * std::exp(-c.initial.shear_s)));
    CHECK(out[1] == 0.0);
}

TEST_CASE("csv round trip is exact") {
    NormSeries s;
    s.push(0.0, 1.0 / 3.0, 2.0, 1e-300);
    s.push(0.1, 0.7, 1e10, 0.0);
    std::ostringstream out;
    write_norm_csv(out, s);
    CHECK(out.str().rfind("t,lp_norm,l2_norm,div_norm,lower_bound\n", 0) == 0);
    const NormSeries back = read_csv(out.str());
    CHECK(back.times == s.times);
    CHECK(back.lp_norms == s.lp_norms);
    CHECK(back.l2_norms == s.l2_norms);
    CHECK(back.div_norms == s.div_norms);
}

TEST_CASE("lower bound column is empty until a fit exists") {
    NormSeries s;
    for (int i = 0; i < 20; ++i) {
        const double t = 0.9 * i / 19.0;
        s.push(t, std::pow(1.0 - t, -2.0), 1.0, 0.0);
    }
    std::ostringstream before;
    write_norm_csv(before, s);
    CHECK(before.str().find(",\n") != std::string::npos);
    SolverConfig cfg;
    const BlowupFit fit = blowup_monitor(s, cfg, KappaMode::theorem);
    REQUIRE(fit.signature);
    attach_fit(s, fit);
    std::ostringstream after;
    write_norm_csv(after, s);
    std::istringstream rows(after.str());
    std::string row;
    std::getline(rows, row);
    while (std::getline(rows, row)) CHECK(row.back() != ',');
    CHECK(read_csv(after.str()).size() == 20);
}

TEST_CASE("malformed csv reports the line") {
    const std::string h = "t,lp_norm,l2_norm,div_norm,lower_bound\n";
    CHECK(csv_error_line("") == 1);
    CHECK(csv_error_line("time,norm\n") == 1);
    CHECK(csv_error_line(h + "0,1,1,0,\n0.1,1,1\n") == 3);
    CHECK(csv_error_line(h + "0,1,1,0,\n0.1,abc,1,0,\n") == 3);
    CHECK(csv_error_line(h + "0,1,1,0,\n0,1,1,0,\n") == 3);
    CHECK(csv_error_line(h + "0,1,1,0,zz\n") == 2);
    CHECK(csv_error_line(h + "nan,1,1,0,\n") == 2);
    // blown-up samples carry non-finite norms
    CHECK(read_csv(h + "0,1,1,0,\n0.1,inf,nan,0,\n").size() == 2);
    CHECK(read_csv(h).size() == 0);
}

TEST_CASE("identical config gives identical csv") {
    RunConfig c = parse(kSmall);
    c.initial.type = "random";
    c.initial.seed = 7;
    c.initial.amplitude = 1e-3;
    std::string out[2];
    for (auto& o : out) {
        std::ostringstream s;
        write_norm_csv(s, march(initial_state(c), c.solver).series);
        o = s.str();
    }
    CHECK(out[0] == out[1]);
    c.initial.seed = 8;
    std::ostringstream other;
    write_norm_csv(other, march(initial_state(c), c.solver).series);
    CHECK(other.str() != out[0]);
}

TEST_CASE("manifest is written once per directory") {
    const auto dir = std::filesystem::temp_directory_path() / "wns_manifest_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    RunManifest m;
    m.command = "simulate x.cfg";
    m.config_echo = echo_config(parse(kSmall));
    m.checks.push_back({"oracle_gap", 1e-5, 1e-4, true, 0.1, "ok"});
    write_manifest(dir, m);
    m.command = "simulate y.cfg";
    write_manifest(dir, m);
    int count = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir)) count += e.path().filename() == "manifest.json";
    CHECK(count == 1);
    std::ifstream in(dir / "manifest.json");
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str().find("y.cfg") != std::string::npos);
    CHECK(text.str().find("oracle_gap") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("selftest suite") {
    const auto names = selftest_names();
    CHECK(names.size() == 6);
    const auto ok = run_selftest(GridSpec{}.N_r);
    for (const auto& c : ok) {
        INFO(c.name << " " << c.value);
        CHECK(c.passed);
    }
    // eight radial nodes cannot resolve the gaussians
    const auto coarse = run_selftest(8);
    CHECK_FALSE(coarse.front().passed);
    CHECK(coarse.front().name == "gaussian_pair");
    CHECK_THROWS_AS(run_selftest(1), std::invalid_argument);
}
