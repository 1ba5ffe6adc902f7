#pragma once

#include "memxbar/device.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace memxbar {

using NodeId = std::uint32_t;
using GateId = std::uint32_t;
using WaveformId = std::uint32_t;

inline constexpr NodeId kGround = 0;
inline constexpr double kOpenCircuit = std::numeric_limits<double>::infinity();

struct Resistor {
    std::string name;
    NodeId a;
    NodeId b;
    double ohms;
};

/// Two-state resistor controlled by a gate timeline.  r_closed may be 0
/// (ideal short) and r_open may be kOpenCircuit (ideal open).
struct Switch {
    std::string name;
    NodeId a;
    NodeId b;
    GateId gate;
    double r_closed;
    double r_open;

    [[nodiscard]] double resistance(bool closed) const noexcept { return closed ? r_closed : r_open; }
};

/// Ground-referenced piecewise-linear source driving node `pos`.
struct VoltageSource {
    std::string name;
    NodeId pos;
    NodeId neg;
    WaveformId waveform;
};

/// Branch voltage is V(a) - V(b); a positive voltage drives the state up.
struct Memristor {
    std::string name;
    NodeId a;
    NodeId b;
    std::size_t model;
    DeviceState state;
};

struct ElementCounts {
    std::size_t nodes = 0;
    std::size_t resistors = 0;
    std::size_t switches = 0;
    std::size_t sources = 0;
    std::size_t memristors = 0;
    std::size_t gates = 0;
    std::size_t waveforms = 0;

    bool operator==(const ElementCounts&) const = default;
};

class Netlist {
public:
    Netlist();

    NodeId add_node(std::string name);
    [[nodiscard]] NodeId node(std::string_view name) const;
    [[nodiscard]] bool has_node(std::string_view name) const;
    [[nodiscard]] const std::string& node_name(NodeId id) const { return node_names_.at(id); }
    [[nodiscard]] std::size_t node_count() const noexcept { return node_names_.size(); }

    GateId add_gate(std::string name);
    WaveformId add_waveform(std::string name);
    [[nodiscard]] std::size_t gate_count() const noexcept { return gate_names_.size(); }
    [[nodiscard]] std::size_t waveform_count() const noexcept { return waveform_names_.size(); }
    [[nodiscard]] const std::string& gate_name(GateId id) const { return gate_names_.at(id); }
    [[nodiscard]] const std::string& waveform_name(WaveformId id) const { return waveform_names_.at(id); }

    std::size_t add_device_model(const DeviceParams& params);
    [[nodiscard]] const DeviceParams& device_model(std::size_t i) const { return models_.at(i); }
    [[nodiscard]] std::span<const DeviceParams> device_models() const noexcept { return models_; }

    std::size_t add_resistor(std::string name, NodeId a, NodeId b, double ohms);
    std::size_t add_switch(std::string name, NodeId a, NodeId b, GateId gate, double r_closed, double r_open);
    /// Adds a source from `pos` to ground.  At most one source per node.
    std::size_t add_source(std::string name, NodeId pos, WaveformId waveform);
    std::size_t add_memristor(std::string name, NodeId a, NodeId b, std::size_t model, DeviceState state);

    [[nodiscard]] std::span<const Resistor> resistors() const noexcept { return resistors_; }
    [[nodiscard]] std::span<const Switch> switches() const noexcept { return switches_; }
    [[nodiscard]] std::span<const VoltageSource> sources() const noexcept { return sources_; }
    [[nodiscard]] std::span<const Memristor> memristors() const noexcept { return memristors_; }

    [[nodiscard]] std::vector<DeviceState> states() const;
    void set_states(std::span<const DeviceState> states);
    void set_state(std::size_t memristor, DeviceState s) { memristors_.at(memristor).state = s; }

    [[nodiscard]] std::size_t memristor_index(std::string_view name) const;
    [[nodiscard]] std::size_t switch_index(std::string_view name) const;

    [[nodiscard]] ElementCounts counts() const;
    /// Element counts as `key: value` lines.
    [[nodiscard]] std::string summary() const;
    /// Full human-readable listing, one element per line.
    [[nodiscard]] std::string dump() const;

private:
    void check_node(NodeId id, const char* what) const;

    std::vector<std::string> node_names_;
    std::unordered_map<std::string, NodeId> node_index_;
    std::vector<std::string> gate_names_;
    std::vector<std::string> waveform_names_;
    std::vector<DeviceParams> models_;
    std::vector<Resistor> resistors_;
    std::vector<Switch> switches_;
    std::vector<VoltageSource> sources_;
    std::vector<Memristor> memristors_;
    std::vector<bool> driven_;
};

}  // namespace memxbar
