#include <catch2/catch_amalgamated.hpp>

#include "memxbar/config.hpp"

#include <filesystem>
#include <fstream>
#include <random>

using namespace memxbar;
using nlohmann::ordered_json;

namespace {

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const InvalidInput& e) {
        return e.what();
    }
    return {};
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
    const auto p = std::filesystem::temp_directory_path() / ("memxbar_test_config_" + name);
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

}  // namespace

TEST_CASE("defaults carry the reference values", "[config]") {
    const ExperimentConfig c = config_from_partial(ordered_json::object());
    CHECK_NOTHROW(c.validate());
    CHECK(c.timing.write_width == 10e-9);
    CHECK(c.timing.read_width == 0.3e-9);
    CHECK(c.timing.gap == 1e-9);
    CHECK(c.timing.ramp == 0.1e-9);
    CHECK(c.timing.v_write == 7.0);
    CHECK(c.timing.v_read == 1.0);
    CHECK(c.topology.type == Architecture::hybrid);
    CHECK(c.topology.wire_r == 500.0);
    CHECK(c.topology.sense_r_on == 8.0);
    CHECK(c.area.feature == 45e-9);
    CHECK(c.area.constants.at("STT-MRAM").feature == 65e-9);
    CHECK(c.sweep.sense_r_on == std::vector<double>{0.5, 1, 2, 4, 8});
    CHECK(c.energy_scaling.sizes == std::vector<std::size_t>{4, 8, 12, 16});
    CHECK(c.hybrid_spec().sense_r == 8.0 * r_on(c.device));
}

TEST_CASE("JSON round trip is exact", "[config][property]") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(0.01, 100.0);
    for (int trial = 0; trial < 100; ++trial) {
        ordered_json doc = ordered_json::object();
        apply_override(doc, "timing.write_width_ns=" + std::to_string(u(rng)));
        apply_override(doc, "timing.ramp_ns=" + std::to_string(u(rng) / 1000));
        apply_override(doc, "solver.dt_ns=" + std::to_string(u(rng) / 100));
        apply_override(doc, "area.feature_nm=" + std::to_string(u(rng)));
        const ExperimentConfig a = config_from_partial(doc);
        const ExperimentConfig b = config_from_json(to_json(a));
        CHECK(to_json(a).dump() == to_json(b).dump());
        CHECK(a.timing.write_width == b.timing.write_width);
        CHECK(a.timing.ramp == b.timing.ramp);
        CHECK(a.solver.dt == b.solver.dt);
        CHECK(a.area.feature == b.area.feature);
    }
}

TEST_CASE("overrides", "[config]") {
    ordered_json doc = ordered_json::object();
    apply_override(doc, "topology.tile_rows=8");
    apply_override(doc, "topology.tile_cols=8");
    apply_override(doc, "timing.v_write=7.5");
    apply_override(doc, "topology.type=crossbar");
    apply_override(doc, "topology.access_switch.r_open=inf");
    apply_override(doc, "sweep.sense_r_on=[1,2]");
    const auto c = config_from_partial(doc);
    CHECK(c.topology.tile_rows == 8);
    CHECK(c.timing.v_write == 7.5);
    CHECK(c.topology.type == Architecture::crossbar);
    CHECK(std::isinf(c.topology.access.r_open));
    CHECK(c.sweep.sense_r_on == std::vector<double>{1, 2});
    // untouched siblings keep their defaults
    CHECK(c.topology.wire_r == 500.0);
    CHECK(c.topology.access.r_closed == 1000.0);
}

TEST_CASE("unknown keys are rejected with their path", "[config]") {
    ordered_json doc = ordered_json::object();
    CHECK(error_of([&] { apply_override(doc, "topology.tile_size=4"); }).find("topology.tile_size") !=
          std::string::npos);
    CHECK(error_of([&] { apply_override(doc, "bogus=1"); }).find("bogus") != std::string::npos);
    CHECK_THROWS_AS(apply_override(doc, "=1"), InvalidInput);
    CHECK_THROWS_AS(apply_override(doc, "topology..rows=1"), InvalidInput);
    CHECK_THROWS_AS(apply_override(doc, "topology.rows"), InvalidInput);
    const auto j = ordered_json::parse(R"({"timing": {"write_width": 10}})");
    CHECK(error_of([&] { (void)config_from_partial(j); }).find("timing.write_width") != std::string::npos);
    // comparison constants take new names
    apply_override(doc, "area.constants.PCM={\"f2_per_bit\": 16, \"feature_nm\": 45}");
    CHECK(config_from_partial(doc).area.constants.at("PCM").f2_per_bit == 16.0);
}

TEST_CASE("validation names the failing field", "[config]") {
    auto check = [](const std::string& assignment, const std::string& path) {
        ordered_json doc = ordered_json::object();
        apply_override(doc, assignment);
        const auto msg = error_of([&] { config_from_partial(doc).validate(); });
        INFO(assignment << " -> " << msg);
        CHECK(msg.find(path) != std::string::npos);
    };
    check("workload.rounds=0", "workload.rounds");
    check("topology.tile_rows=17", "topology");
    check("topology.sense_r_on=0", "topology");
    check("timing.v_read=1.2", "timing");
    check("device.a1=-1", "device");
    check("sweep.tile=[4, 32]", "sweep.tile");
    check("sweep.v_write=[]", "sweep");
    check("device_test.sequence=[\"write\", \"jump\"]", "device_test.sequence");
    check("energy_scaling.sizes=[0]", "energy_scaling.sizes");
    check("area.feature_nm=-45", "area");
    check("solver.dt_ns=0", "solver");

    ordered_json bad = ordered_json::parse(R"({"workload": {"rounds": -3}})");
    CHECK(error_of([&] { (void)config_from_partial(bad); }).find("workload.rounds") != std::string::npos);
    bad = ordered_json::parse(R"({"timing": {"v_write": "seven"}})");
    CHECK(error_of([&] { (void)config_from_partial(bad); }).find("timing.v_write") != std::string::npos);
}

TEST_CASE("config files and manifests", "[config]") {
    const auto plain = temp_file("plain.json", R"({"workload": {"seed": 7}})");
    CHECK(read_config_file(plain.string())["workload"]["seed"] == 7);

    ordered_json manifest;
    manifest["manifest_version"] = 1;
    manifest["config"] = to_json(ExperimentConfig{});
    manifest["config"]["workload"]["seed"] = 99;
    const auto man = temp_file("manifest.json", manifest.dump());
    CHECK(config_from_json(read_config_file(man.string())).workload.seed == 99);

    const auto broken = temp_file("broken.json", "{oops");
    CHECK_THROWS_AS(read_config_file(broken.string()), InvalidInput);
    const auto array = temp_file("array.json", "[1, 2]");
    CHECK_THROWS_AS(read_config_file(array.string()), InvalidInput);
    CHECK_THROWS_AS(read_config_file("/nonexistent/memxbar.json"), InvalidInput);
}
