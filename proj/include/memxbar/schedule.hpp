#pragma once

#include "memxbar/netlist.hpp"

#include <string>
#include <utility>
#include <vector>

namespace memxbar {

/// Piecewise-linear waveform.  Held constant before the first and after
/// the last breakpoint; 0 V when empty.
class PwlWaveform {
public:
    /// Appends a breakpoint; times must be strictly increasing.
    void add(double t, double volts);
    [[nodiscard]] double at(double t) const;
    [[nodiscard]] const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }
    [[nodiscard]] bool empty() const noexcept { return points_.empty(); }

private:
    std::vector<std::pair<double, double>> points_;
};

/// Piecewise-constant open/closed timeline.  Open before the first event.
class GateTimeline {
public:
    /// Records a transition at t; times must be non-decreasing.  A repeated
    /// time overrides the previous entry.
    void set(double t, bool closed);
    [[nodiscard]] bool at(double t) const;
    [[nodiscard]] const std::vector<std::pair<double, bool>>& events() const noexcept { return events_; }

private:
    std::vector<std::pair<double, bool>> events_;
};

struct Schedule {
    std::vector<PwlWaveform> waveforms;
    std::vector<GateTimeline> gates;
    double t_end = 0.0;

    Schedule() = default;
    explicit Schedule(const Netlist& net) : waveforms(net.waveform_count()), gates(net.gate_count()) {}

    /// Checks table sizes against the netlist and that every breakpoint lies
    /// in [0, t_end].
    void validate(const Netlist& net) const;

    /// Human-readable listing of all breakpoints and gate events.
    [[nodiscard]] std::string dump(const Netlist& net) const;
};

}  // namespace memxbar
