#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "fhn/equilibria.hpp"
#include "fhn/errors.hpp"
#include "fhn/io.hpp"
#include "fhn/sweep.hpp"

using namespace fhn;

namespace {

SweepCell cell_with(std::initializer_list<RegimeLabel> labels) {
    SweepCell c;
    int i = 0;
    for (const auto& l : labels) c.outcomes.push_back({"ic" + std::to_string(i++), l, {}});
    build_inventory(c);
    return c;
}

double norm(const State& s) { return std::sqrt(s.x1 * s.x1 + s.y1 * s.y1 + s.x2 * s.x2 + s.y2 * s.y2); }

} // namespace

TEST_CASE("angle grid is an inclusive linspace") {
    const auto v = AngleGrid{10.0, 20.0, 5}.values();
    REQUIRE(v.size() == 5);
    CHECK(v.front() == 10.0);
    CHECK(v.back() == 20.0);
    CHECK(v[1] == doctest::Approx(12.5));
}

TEST_CASE("config file sets parameters in degrees and keeps defaults elsewhere") {
    std::istringstream in("# sweep settings\n"
                          "[parameters]\n"
                          "alpha_deg = 370\n"
                          "delta_deg = 15\n"
                          "g = 0.2\n"
                          "[integrator]\n"
                          "t_observe = 800\n"
                          "[grid]\n"
                          "alpha_n = 4\n"
                          "[run]\n"
                          "ic = anti\n"
                          "seed = 42\n");
    const RunConfig cfg = parse_run_config(in);
    CHECK(rad_to_deg(cfg.params.alpha) == doctest::Approx(10.0));
    CHECK(rad_to_deg(cfg.params.delta) == doctest::Approx(15.0));
    CHECK(cfg.params.g == 0.2);
    CHECK(cfg.params.a == -1.01);
    CHECK(cfg.integrator.t_observe == 800.0);
    CHECK(cfg.integrator.t_transient == 300.0);
    CHECK(cfg.alpha.n == 4);
    CHECK(cfg.ic == "anti");
    CHECK(cfg.seed == 42);
}

TEST_CASE("config errors") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_run_config(in);
    };
    CHECK_THROWS_AS(parse("[parameters]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[nowhere]\na = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[parameters]\na = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse("[parameters]\neps = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[grid]\nalpha_n = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[run]\nic = sideways\n"), ConfigError);
    CHECK_THROWS_AS(parse("[grid]\ndelta_n = -3\n"), ConfigError);
    CHECK_THROWS_AS(parse("a = 1\n"), ConfigError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/run.ini"), ConfigError);
}

TEST_CASE("standard initial conditions") {
    const Parameters p = Parameters::from_degrees(210.0, 50.0);
    const auto ics = standard_ic_set(p, 0);
    REQUIRE(ics.size() == 8);
    const State eq = named_ic("eq", p);
    CHECK(std::abs(eq.y1 - symmetric_equilibrium_y(p)) < 1e-12);
    CHECK(ics[0].name == "sym");
    CHECK(ics[0].state.x1 == ics[0].state.x2);
    CHECK(ics[0].state.y1 == ics[0].state.y2);
    CHECK(ics[1].state.x1 - eq.x1 == doctest::Approx(-(ics[1].state.x2 - eq.x2)));
    CHECK(ics[3].state == swap(ics[2].state));
    for (std::size_t i = 4; i < 8; ++i) {
        const State d{ics[i].state.x1 - eq.x1, ics[i].state.y1 - eq.y1, ics[i].state.x2 - eq.x2, ics[i].state.y2 - eq.y2};
        CHECK(norm(d) == doctest::Approx(0.3).epsilon(1e-12));
    }
    const auto again = standard_ic_set(p, 0);
    const auto other = standard_ic_set(p, 1);
    CHECK(again[5].state == ics[5].state);
    CHECK(other[5].state != ics[5].state);
    CHECK_THROWS_AS(named_ic("sideways", p), ConfigError);
}

TEST_CASE("inventory merges swap images and counts attractors") {
    const SweepCell single = cell_with({RegimeLabel::in_phase(), RegimeLabel::in_phase()});
    CHECK(single.inventory == std::vector<std::string>{"InPhase"});
    CHECK(single.attractor_count == 1);
    CHECK_FALSE(single.multistable);

    const SweepCell bi = cell_with({RegimeLabel::in_phase(), RegimeLabel::anti_phase()});
    CHECK(bi.inventory == std::vector<std::string>{"AntiPhase", "InPhase"});
    CHECK(bi.multistable);

    const RegimeLabel l12 = RegimeLabel::sequential({"12"});
    const SweepCell pair = cell_with({l12, l12.swapped()});
    CHECK(pair.inventory == std::vector<std::string>{"Sequential(12|21)"});
    CHECK(pair.attractor_count == 2);
    CHECK(pair.multistable);

    // one member of a conjugate pair still implies two attractors
    const SweepCell half = cell_with({l12});
    CHECK(half.inventory == std::vector<std::string>{"Sequential(12)"});
    CHECK(half.attractor_count == 2);

    const SweepCell self = cell_with({RegimeLabel::sequential({"12", "21"})});
    CHECK(self.inventory == std::vector<std::string>{"Sequential(1221)"});
    CHECK(self.attractor_count == 1);
}

TEST_CASE("sweep is cylindrical and independent of the worker count") {
    RunConfig cfg;
    cfg.alpha = {210.0, 570.0, 2};
    cfg.delta = {49.0, 50.0, 2};
    setenv("FHN_WORKERS", "1", 1);
    const auto serial = sweep_plane(cfg);
    setenv("FHN_WORKERS", "2", 1);
    std::size_t calls = 0;
    const auto parallel = sweep_plane(cfg, [&](std::size_t, std::size_t total) {
        ++calls;
        CHECK(total == 2);
    });
    unsetenv("FHN_WORKERS");
    CHECK(calls == 2);

    REQUIRE(serial.size() == 4);
    REQUIRE(parallel.size() == 4);
    CHECK(serial[0].alpha_deg == 210.0);
    CHECK(serial[1].alpha_deg == 570.0);
    CHECK(serial[2].delta_deg == 50.0);
    for (std::size_t i = 0; i < 4; ++i) CHECK(serial[i].inventory == parallel[i].inventory);
    CHECK(serial[0].inventory == serial[1].inventory);
    CHECK(serial[2].inventory == serial[3].inventory);

    // the bistable point
    CHECK(serial[2].multistable);
    CHECK(std::find(serial[2].inventory.begin(), serial[2].inventory.end(), "InPhase") != serial[2].inventory.end());
    CHECK(std::find(serial[2].inventory.begin(), serial[2].inventory.end(), "AntiPhase") != serial[2].inventory.end());

    std::ostringstream csv;
    write_sweep_csv(csv, serial);
    const std::string text = csv.str();
    CHECK(text.rfind("alpha_deg,delta_deg,labels,multistable\n", 0) == 0);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.find("\n210,50,") != std::string::npos);
}

TEST_CASE("worker count resolution") {
    RunConfig cfg;
    cfg.workers = 3;
    unsetenv("FHN_WORKERS");
    CHECK(resolve_workers(cfg) == 3);
    setenv("FHN_WORKERS", "5", 1);
    CHECK(resolve_workers(cfg) == 5);
    unsetenv("FHN_WORKERS");
    cfg.workers = 0;
    CHECK(resolve_workers(cfg) >= 1);
}
