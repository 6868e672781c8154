#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "vibroqfi/cache.hpp"
#include "vibroqfi/config.hpp"
#include "vibroqfi/sweep.hpp"

using namespace vibroqfi;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("vibroqfi_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
    fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& args) {
    std::string cmd = std::string(VIBROQFI_CLI_PATH) + " " + args + " >" + (scratch() / "stdout.txt").string() +
                      " 2>" + (scratch() / "stderr.txt").string();
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmall = R"(emitter.gamma_psinv = 0.5
bath.kind = single_mode
bath.omega0_cm = 100
grid.n = 256
grid.window_over_invgamma = 16
sweep.values = 0, 0.4, 0.8
output.timing = false
)";

SweepConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test.cfg");
}

} // namespace

TEST_CASE("config parsing") {
    auto cfg = parse("# comment\nemitter.gamma_psinv = 0.2  # trailing\nsweep.values = 0, 0.5,1\ngrid.n = 512\n");
    CHECK(cfg.gamma_psinv == 0.2);
    CHECK(cfg.values == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(cfg.n == 512);
    CHECK(cfg.estimate == Parameter::Gamma);

    auto line_of = [](const std::string& text) {
        try {
            parse(text);
        } catch (const ConfigError& e) {
            return e.line;
        }
        return -1;
    };
    CHECK(line_of("grid.n = 512\nbogus.key = 1\n") == 2);
    CHECK(line_of("\n\ngrid.n = 1000\n") == 3);
    CHECK(line_of("emitter.gamma_psinv = abc\n") == 1);
    CHECK(line_of("emitter.gamma_psinv = -1\n") == 1);
    CHECK(line_of("bath.kind = ohmic\n") == 1);
    CHECK(line_of("grid.n = 256\ngrid.n = 512\n") == 2);
    CHECK(line_of("no equals sign\n") == 1);
    CHECK(line_of("sweep.values = 1,,2\n") == 1);

    auto empty = parse("sweep.values =\noutput.csv = x.csv\n");
    CHECK(empty.values.empty());
    CHECK_THROWS_AS(validate_for_sweep(empty), ConfigError);
    CHECK_THROWS_AS(validate_for_sweep(parse("sweep.values = 1\n")), ConfigError); // no output.csv
    CHECK_THROWS_AS(parse("bath.kind = drude_lorentz\n"), ConfigError);             // gamma_cm missing
}

TEST_CASE("point setup maps units and the sweep variable") {
    auto cfg = parse("emitter.gamma_psinv = 0.5\nemitter.gamma_perp_ratio = 0.2\nbath.omega0_cm = 100\n"
                     "grid.n = 256\ngrid.window_over_invgamma = 16\ntemperature_kelvin = 300\n");
    auto s = setup_point(cfg, 0.7);
    CHECK(s.bath.lambda0 == 0.7);
    CHECK(s.bath.omega0 == doctest::Approx(18.8365157).epsilon(1e-8));
    CHECK(s.emitter.Gamma_perp == doctest::Approx(0.1));
    CHECK(s.grid.window() == doctest::Approx(32.0));
    CHECK(s.pulse.tsigma == doctest::Approx(2.0));
    cfg.sweep_variable = "temperature_kelvin";
    CHECK(setup_point(cfg, 77.0).bath.temperature == 77.0);
}

TEST_CASE("cache round trip") {
    auto cfg = parse(kSmall);
    auto s = setup_point(cfg, 0.4);
    auto t = build_tdm(s.pulse, s.emitter, s.bath, s.grid);
    TdmCache cache(scratch() / "cache_rt");
    Fingerprint key = params_fingerprint(s.pulse, s.emitter, s.bath, s.grid, s.rule);
    CHECK_FALSE(cache.load(key, s.grid).has_value());
    cache.store(key, {s.grid, t.rho, t.p_loss});
    auto back = cache.load(key, s.grid);
    REQUIRE(back.has_value());
    CHECK(back->p == t.p_loss);
    CHECK(std::memcmp(back->m.data(), t.rho.data(), sizeof(cplx) * static_cast<std::size_t>(t.rho.size())) == 0);

    std::vector<std::string> warnings;
    auto other = s.grid;
    other.tau_end += 1.0;
    CHECK_FALSE(cache.load(key, other, &warnings).has_value());
    CHECK(warnings.size() == 1);

    // truncated file
    fs::resize_file(cache.path_for(key), 100);
    warnings.clear();
    CHECK_FALSE(cache.load(key, s.grid, &warnings).has_value());
    CHECK(warnings.size() == 1);

    ::setenv(kCacheEnv, "/some/override", 1);
    CHECK(cache_directory("/configured") == fs::path("/some/override"));
    ::unsetenv(kCacheEnv);
    CHECK(cache_directory("/configured") == fs::path("/configured"));
}

TEST_CASE("sweep rows keep their order under a worker pool") {
    auto cfg = parse(kSmall);
    cfg.csv_path = "unused.csv";
    SweepOptions one, three;
    one.use_cache = three.use_cache = false;
    three.jobs = 3;
    auto a = run_sweep(cfg, one), b = run_sweep(cfg, three);
    std::ostringstream sa, sb;
    write_sweep_csv(sa, cfg, a);
    write_sweep_csv(sb, cfg, b);
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().rfind(kSweepHeader, 0) == 0);
}

TEST_CASE("cli exit codes") {
    CHECK(run("selftest") == 0);
    CHECK(slurp(scratch() / "stdout.txt").find("selftest passed") != std::string::npos);
    CHECK(run("") == 2);
    CHECK(run("sweep") == 2);
    CHECK(run("sweep --config " + (scratch() / "missing.cfg").string()) == 2);
    auto bad = write_file("bad.cfg", "grid.n = 1000\n");
    CHECK(run("sweep --config " + bad.string()) == 2);
    CHECK(slurp(scratch() / "stderr.txt").find("bad.cfg:1: grid.n") != std::string::npos);
    auto empty = write_file("empty.cfg", "sweep.values =\noutput.csv = e.csv\n");
    CHECK(run("sweep --config " + empty.string()) == 2);
    // a grid the solver refuses is a configuration problem
    auto coarse = write_file("coarse.cfg", "grid.n = 32\nsweep.values = 0\noutput.csv = c.csv\n");
    CHECK(run("sweep --no-cache --config " + coarse.string()) == 2);
    auto dl = write_file("dl.cfg", "bath.kind = drude_lorentz\nbath.gamma_cm = 10\n");
    CHECK(run("spectrum --config " + dl.string() + " --out " + (scratch() / "s.csv").string()) == 2);
}

TEST_CASE("cli sweep, warm cache and spectrum") {
    ::setenv(kCacheEnv, (scratch() / "cache").c_str(), 1);
    auto cfg = write_file("small.cfg", std::string(kSmall) + "output.csv = small.csv\noutput.svg = small.svg\n");
    REQUIRE(run("sweep --jobs 2 --config " + cfg.string()) == 0);
    std::string cold = slurp(scratch() / "small.csv");
    CHECK(fs::exists(scratch() / "cache"));
    CHECK(slurp(scratch() / "small.svg").find("<polyline") != std::string::npos);
    REQUIRE(run("sweep --config " + cfg.string()) == 0);
    CHECK(slurp(scratch() / "stderr.txt").find("(cached)") != std::string::npos);
    CHECK(slurp(scratch() / "small.csv") == cold);

    // damaged entries are recomputed with a warning
    for (const auto& e : fs::directory_iterator(scratch() / "cache")) fs::resize_file(e.path(), 64);
    REQUIRE(run("sweep --config " + cfg.string()) == 0);
    CHECK(slurp(scratch() / "stderr.txt").find("recomputing") != std::string::npos);
    CHECK(slurp(scratch() / "small.csv") == cold);
    ::unsetenv(kCacheEnv);

    // lambda0 = 0 with the default physical parameters and grid
    auto zero = write_file("zero.cfg", "sweep.values = 0\noutput.csv = zero.csv\n");
    REQUIRE(run("sweep --no-cache --config " + zero.string()) == 0);
    std::istringstream csv(slurp(scratch() / "zero.csv"));
    std::string header, row;
    std::getline(csv, header);
    std::getline(csv, row);
    CHECK(header == kSweepHeader);
    std::vector<std::string> f;
    std::stringstream rs(row);
    for (std::string x; std::getline(rs, x, ',');) f.push_back(x);
    REQUIRE(f.size() == 10);
    double q = std::stod(f[2]), ct = std::stod(f[4]), cf = std::stod(f[5]);
    CHECK(f[0] == "lambda0");
    CHECK(f[7] == "2048");
    CHECK(ct / q >= 0.99);
    CHECK(cf / q <= 1e-3);

    auto sp = write_file("sp.cfg", "bath.lambda0 = 0.5\nbath.omega0_cm = 100\nspectrum.points = 101\n");
    REQUIRE(run("spectrum --config " + sp.string() + " --out " + (scratch() / "sp.csv").string()) == 0);
    std::string text = slurp(scratch() / "sp.csv");
    CHECK(text.rfind("omega_radps,total,input,absorption,emission\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 102);
}
