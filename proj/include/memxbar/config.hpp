#pragma once

// Experiment configuration: one JSON document whose every field has a
// default, plus `path=value` overrides.  Times are given in ns and sense
// resistances in multiples of R_on of the configured device.

#include "memxbar/area.hpp"
#include "memxbar/device.hpp"
#include "memxbar/protocol.hpp"
#include "memxbar/solver.hpp"
#include "memxbar/topology.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace memxbar {

struct TopologyConfig {
    Architecture type = Architecture::hybrid;
    std::size_t tile_rows = 4;
    std::size_t tile_cols = 4;
    std::size_t tiles_x = 2;
    std::size_t tiles_y = 2;
    std::size_t rows = 4;  // crossbar and 1T1M
    std::size_t cols = 4;
    double wire_r = 500.0;
    double sense_r_on = 8.0;   // R_s / R_on
    double threshold_r = 0.0;  // 0: midpoint comparator threshold
    SwitchParams access{};
    SwitchParams column{};
};

struct WorkloadConfig {
    std::uint64_t seed = 1;
    std::size_t rounds = 50;
    std::size_t read_passes = 1;  // reads-only energy run
};

struct SweepConfig {
    std::vector<double> sense_r_on{0.5, 1.0, 2.0, 4.0, 8.0};
    std::vector<double> v_write{7.0};
    std::vector<std::size_t> tile{4};
    std::size_t rounds = 20;
};

struct EnergyScalingConfig {
    std::vector<std::size_t> sizes{4, 8, 12, 16};
    std::size_t trials = 8;
};

struct DeviceTestConfig {
    /// Pulse sequence; each entry is `write`, `erase` or `read`.
    std::vector<std::string> sequence{"write", "read", "erase", "read"};
};

struct OutputConfig {
    std::string dir = "runs";
    std::vector<std::string> probes;  // extra trace probes, e.g. `v:VS0`
};

struct ExperimentConfig {
    DeviceParams device{};
    TopologyConfig topology{};
    TimingConfig timing{};
    WorkloadConfig workload{};
    SolverConfig solver{};
    SweepConfig sweep{};
    EnergyScalingConfig energy_scaling{};
    DeviceTestConfig device_test{};
    AreaSpec area{};
    OutputConfig output{};

    /// Throws InvalidInput with the offending field path.
    void validate() const;

    [[nodiscard]] HybridArraySpec hybrid_spec() const;
    [[nodiscard]] CrossbarSpec crossbar_spec(std::size_t rows, std::size_t cols) const;
    [[nodiscard]] OneTOneMSpec one_t_one_m_spec() const;
};

[[nodiscard]] nlohmann::ordered_json to_json(const ExperimentConfig& c);
/// Reads a complete document; use load_config for partial documents.
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::ordered_json& j);

/// Applies `overlay` onto the defaults.  Unknown keys are rejected with
/// their dotted path.
[[nodiscard]] ExperimentConfig config_from_partial(const nlohmann::ordered_json& overlay);

/// Sets one dotted path.  The value is parsed as JSON when possible and
/// taken as a string otherwise.
void apply_override(nlohmann::ordered_json& doc, const std::string& assignment);

/// Reads a config file, or the `config` member of a run manifest.
[[nodiscard]] nlohmann::ordered_json read_config_file(const std::string& path);

}  // namespace memxbar
