#pragma once

// Figures of merit computed from transient runs: read peaks and noise
// margin, energy per bit, peak switch currents and write disturb.

#include "memxbar/protocol.hpp"
#include "memxbar/solver.hpp"
#include "memxbar/topology.hpp"
#include "memxbar/trace.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace memxbar {

struct ReadSample {
    std::size_t cycle = 0;
    std::size_t row = 0;
    std::size_t col = 0;
    double peak = 0.0;          // max |V_s| over the read window [V]
    std::uint8_t expected = 0;

    bool operator==(const ReadSample&) const = default;
};

struct NoiseMarginReport {
    double margin = 0.0;       // max(0, min over 1s - max over 0s) [V]
    std::size_t errors = 0;    // misread samples at the best single threshold
    double min_one = 0.0;
    double max_zero = 0.0;
    double threshold = 0.0;    // gap midpoint, or the best overlapping threshold
    std::size_t ones = 0;
    std::size_t zeros = 0;
};

/// Gap between the two read populations.  Throws InvalidInput unless both
/// populations are present.
[[nodiscard]] NoiseMarginReport noise_margin(std::span<const ReadSample> samples);

/// Misreads against the answer matrix with a fixed comparator threshold.
[[nodiscard]] std::size_t count_errors(std::span<const ReadSample> samples, double threshold);

struct EnergyMeasure {
    double per_bit = 0.0;     // [J]
    double std_error = 0.0;   // standard error of the per-operation mean [J]
    std::size_t ops = 0;
    std::size_t bits = 0;
};

/// Source energy over every window of `kind` divided by the bits they
/// target.  Throws InvalidInput when there is no such window.
[[nodiscard]] EnergyMeasure energy_per_bit(const Trace& trace, std::span<const OpWindow> windows, OpKind kind);

struct SwitchPeaks {
    std::vector<double> per_switch;  // [A]
    double max = 0.0;
    std::string max_switch;
};

[[nodiscard]] SwitchPeaks peak_switch_current(const Trace& trace, const Netlist& net);

/// Transient run of a scheduled workload on a built array.
struct ArrayRun {
    Trace trace;
    std::vector<ReadSample> samples;
    std::vector<double> worst_half_select;  // per write window, max |v| off the selected row [V]
    double max_write_voltage = 0.0;          // max |v| across any device during writes [V]
    std::size_t disturbing_reads = 0;        // reads after which some state differs
};

/// Runs the schedule.  `initial` overrides the netlist's initial states and
/// `answers` fills the expected bits of the read samples.
[[nodiscard]] ArrayRun run_array(const BuiltArray& array, const GeneratedWorkload& work, const SolverConfig& cfg,
                                 std::span<const DeviceState> initial = {}, const AnswerMatrix* answers = nullptr,
                                 std::span<const Probe> probes = {});

}  // namespace memxbar
