#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "spikelab/errors.hpp"
#include "spikelab/io.hpp"
#include "spikelab/scenario.hpp"

using namespace spikelab;
using namespace spikelab::scenario;

namespace {
std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::filesystem::path tmp_dir(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}
} // namespace

TEST_CASE("scenario JSON round trip rejects unknown fields") {
    Scenario s;
    s.name = "demo";
    s.command = "thresholds";
    s.model = models::ModelSpec::schnakenberg_spec(0.2, 1.0, 0.01, 2.0);
    s.has_model = true;
    s.options = {{"K", 1}, {"kind", "auto"}};
    s.out = "somewhere";
    auto j = s.to_json();
    auto back = Scenario::from_json(j);
    CHECK(back.to_json() == j);
    j["mystery"] = true;
    CHECK_THROWS_AS(Scenario::from_json(j), config_error);
}

TEST_CASE("thresholds scenario produces the replication length") {
    auto dir = tmp_dir("spikelab_cli_thr");
    Scenario s;
    s.command = "thresholds";
    s.model = models::ModelSpec::schnakenberg_spec(0.2, 1.0, 0.01, 2.0);
    s.has_model = true;
    s.options = {{"K", 1}, {"kind", "auto"}};
    s.out = dir.string();
    auto rr = run(s);
    REQUIRE(rr.exit_code == 0);
    auto j = spikelab::io::read_json((dir / "thresholds.json").string());
    CHECK(j.at("kind") == "replication");
    double L = j.at("L_crit").template get<double>();
    CHECK(L > 1.92);
    CHECK(L < 2.04);
    CHECK(std::filesystem::exists(dir / "manifest.json"));

    SUBCASE("outputs are byte-identical across reruns") {
        auto first = slurp((dir / "thresholds.json").string());
        auto rr2 = run(s);
        REQUIRE(rr2.exit_code == 0);
        CHECK(slurp((dir / "thresholds.json").string()) == first);
    }
}

TEST_CASE("exit codes map error kinds") {
    auto dir = tmp_dir("spikelab_cli_err");
    Scenario s;
    s.command = "thresholds";
    s.model = models::ModelSpec::schnakenberg_spec(1.5, 1.0, 0.01, 2.0); // no instability
    s.has_model = true;
    s.options = {{"K", 1}, {"kind", "auto"}};
    s.out = dir.string();
    auto rr = run(s);
    CHECK(rr.exit_code == 4); // regime mismatch
    CHECK(rr.error_kind == "RegimeMismatch");

    s.options = {{"K", 0}};
    auto rr2 = run(s);
    CHECK(rr2.exit_code == 2); // config error
    CHECK(std::filesystem::exists(dir / "manifest.json"));

    s.command = "nonsense";
    CHECK(run(s).exit_code == 2);
}

TEST_CASE("core scenario writes solution artifacts") {
    auto dir = tmp_dir("spikelab_cli_core");
    Scenario s;
    s.command = "core";
    s.model = models::ModelSpec::schnakenberg_spec(0.5, 1.0, 0.01, 2.0); // model params unused by core
    s.has_model = true;
    s.options = {{"target_B", 0.5}, {"n", 1601}, {"y_max", 16.0}};
    s.out = dir.string();
    auto rr = run(s);
    REQUIRE(rr.exit_code == 0);
    CHECK(std::filesystem::exists(dir / "core_solution.csv"));
    auto j = spikelab::io::read_json((dir / "core_solution.json").string());
    CHECK(j.at("B").template get<double>() == doctest::Approx(0.5));
    CHECK(j.at("C").template get<double>() > 0);

    SUBCASE("CSV artifacts are byte-identical across reruns") {
        auto first = slurp((dir / "core_solution.csv").string());
        REQUIRE(run(s).exit_code == 0);
        CHECK(slurp((dir / "core_solution.csv").string()) == first);
    }
}

TEST_CASE("phase diagram scenario emits CSV and SVG") {
    auto dir = tmp_dir("spikelab_cli_phase");
    Scenario s;
    s.command = "phase-diagram";
    s.model = models::ModelSpec::brusselator_spec(1.0, 0.7, 0.01, 2.0);
    s.has_model = true;
    s.options = {{"nx", 10}, {"ny", 12}};
    s.out = dir.string();
    auto rr = run(s);
    REQUIRE(rr.exit_code == 0);
    CHECK(std::filesystem::exists(dir / "phase_diagram.csv"));
    CHECK(std::filesystem::exists(dir / "phase_diagram.svg"));
    std::string csv = slurp((dir / "phase_diagram.csv").string());
    CHECK(csv.find("replication") != std::string::npos);
    CHECK(csv.find("nucleation") != std::string::npos);
    CHECK(csv.find("no_instability") != std::string::npos);
}

TEST_CASE("simulate + overlay scenarios chain through the filesystem") {
    auto sim_dir = tmp_dir("spikelab_cli_sim");
    Scenario sim;
    sim.command = "simulate";
    sim.model = models::ModelSpec::schnakenberg_spec(0.2, 1.0, 0.04, 4.0);
    sim.has_model = true;
    sim.options = {{"rho", 0.0016}, {"L0", 1.0}, {"L_end", 1.3}, {"n", 512}};
    sim.out = sim_dir.string();
    auto rr = run(sim);
    REQUIRE(rr.exit_code == 0);
    CHECK(std::filesystem::exists(sim_dir / "events.csv"));
    CHECK(std::filesystem::exists(sim_dir / "heatmap.csv"));
    CHECK(std::filesystem::exists(sim_dir / "heatmap.svg"));
    CHECK(std::filesystem::exists(sim_dir / "trajectory.csv"));
    CHECK(std::filesystem::exists(sim_dir / "snapshots/snapshot_0000.csv"));

    auto atlas_dir = tmp_dir("spikelab_cli_atlas");
    Scenario atl;
    atl.command = "atlas";
    atl.model = sim.model;
    atl.has_model = true;
    atl.options = {{"n", 512}, {"L_min", 1.0}, {"L_max", 2.2}, {"max_half_spikes", 2},
                   {"stability", false}};
    atl.out = atlas_dir.string();
    REQUIRE(run(atl).exit_code == 0);

    auto ov_dir = tmp_dir("spikelab_cli_overlay");
    Scenario ov;
    ov.command = "overlay";
    ov.options = {{"trajectory_dir", sim_dir.string()}, {"atlas_dir", atlas_dir.string()}};
    ov.out = ov_dir.string();
    REQUIRE(run(ov).exit_code == 0);
    std::string merged = slurp((ov_dir / "overlay.csv").string());
    CHECK(merged.find("trajectory,") != std::string::npos);
    CHECK(merged.find("m2_interior,") != std::string::npos);
}
