#pragma once

#include "memxbar/netlist.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace memxbar {

/// A quantity recorded at every transient sample.
struct Probe {
    enum class Kind { node_voltage, memristor_current, memristor_state, memristor_voltage, switch_current };
    Kind kind;
    std::size_t index;

    bool operator==(const Probe&) const = default;
};

/// Column label used in CSV headers: `v:<node>`, `i:<memristor>`,
/// `x:<memristor>`, `vm:<memristor>` or `isw:<switch>`.
[[nodiscard]] std::string probe_label(const Netlist& net, const Probe& p);
/// Inverse of probe_label.
[[nodiscard]] Probe parse_probe(const Netlist& net, std::string_view label);
/// One node-voltage probe per non-ground node.
[[nodiscard]] std::vector<Probe> all_node_probes(const Netlist& net);

struct Trace {
    std::vector<std::string> labels;
    std::vector<double> time;              // [s]
    std::vector<double> energy;            // cumulative source energy at each sample [J]
    std::vector<double> source_power;      // [W]
    std::vector<double> dissipated_power;  // [W]
    std::vector<std::vector<double>> columns;  // one per probe, aligned with `time`
    std::vector<double> switch_peak_current;   // max |i| per switch over the run [A]
    std::vector<DeviceState> final_states;

    std::size_t newton_iterations = 0;
    std::size_t factorizations = 0;
    std::size_t reused_steps = 0;

    [[nodiscard]] double total_energy() const noexcept { return energy.empty() ? 0.0 : energy.back(); }
    [[nodiscard]] double t_begin() const noexcept { return time.empty() ? 0.0 : time.front(); }
    [[nodiscard]] double t_end() const noexcept { return time.empty() ? 0.0 : time.back(); }
    [[nodiscard]] const std::vector<double>& column(std::string_view label) const;
    /// Cumulative energy at t, linearly interpolated between samples.
    [[nodiscard]] double energy_at(double t) const;
};

/// Source energy delivered over [t0, t1].  Additive over adjacent intervals.
[[nodiscard]] double energy_between(const Trace& trace, double t0, double t1);

/// `time_ns,<probe labels...>,energy_J`, LF line endings.
void write_trace_csv(std::ostream& os, const Trace& trace);

}  // namespace memxbar
