#include "memxbar/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace memxbar {

NoiseMarginReport noise_margin(std::span<const ReadSample> samples) {
    NoiseMarginReport r;
    r.min_one = std::numeric_limits<double>::infinity();
    r.max_zero = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        if (s.expected) {
            ++r.ones;
            r.min_one = std::min(r.min_one, s.peak);
        } else {
            ++r.zeros;
            r.max_zero = std::max(r.max_zero, s.peak);
        }
    }
    if (r.ones == 0 || r.zeros == 0) {
        throw InvalidInput("noise_margin needs both stored-1 and stored-0 reads (got " + std::to_string(r.ones) +
                           " ones, " + std::to_string(r.zeros) + " zeros)");
    }
    if (r.min_one > r.max_zero) {
        r.margin = r.min_one - r.max_zero;
        r.threshold = 0.5 * (r.min_one + r.max_zero);
        return r;
    }

    // Overlap: scan thresholds at every distinct peak.  A sample reads 1 iff
    // its peak is strictly above the threshold.
    std::vector<std::pair<double, std::uint8_t>> sorted;
    sorted.reserve(samples.size());
    for (const auto& s : samples) sorted.emplace_back(s.peak, s.expected);
    std::sort(sorted.begin(), sorted.end());
    std::size_t ones_below = 0;
    std::size_t zeros_above = r.zeros;
    std::size_t best = zeros_above;
    double best_t = sorted.front().first - 1.0;
    for (std::size_t i = 0; i < sorted.size();) {
        const double v = sorted[i].first;
        for (; i < sorted.size() && sorted[i].first == v; ++i) {
            if (sorted[i].second) ++ones_below;
            else --zeros_above;
        }
        if (ones_below + zeros_above < best) {
            best = ones_below + zeros_above;
            best_t = v;
        }
    }
    r.errors = best;
    r.threshold = best_t;
    return r;
}

std::size_t count_errors(std::span<const ReadSample> samples, double threshold) {
    std::size_t n = 0;
    for (const auto& s : samples) n += digitize(s.peak, threshold) != (s.expected != 0);
    return n;
}

EnergyMeasure energy_per_bit(const Trace& trace, std::span<const OpWindow> windows, OpKind kind) {
    EnergyMeasure m;
    double total = 0.0;
    std::vector<double> per_op;
    for (const auto& w : windows) {
        if (w.kind != kind) continue;
        const double e = energy_between(trace, w.t0, std::min(w.t1, trace.t_end()));
        total += e;
        m.bits += w.bits;
        per_op.push_back(w.bits ? e / static_cast<double>(w.bits) : 0.0);
    }
    if (per_op.empty() || m.bits == 0) {
        throw InvalidInput(std::string("energy_per_bit: no ") + (kind == OpKind::write ? "write" : "read") +
                           " operations in the schedule");
    }
    m.ops = per_op.size();
    m.per_bit = total / static_cast<double>(m.bits);
    if (m.ops > 1) {
        double mean = 0.0;
        for (double e : per_op) mean += e;
        mean /= static_cast<double>(m.ops);
        double ss = 0.0;
        for (double e : per_op) ss += (e - mean) * (e - mean);
        m.std_error = std::sqrt(ss / static_cast<double>(m.ops - 1) / static_cast<double>(m.ops));
    }
    return m;
}

SwitchPeaks peak_switch_current(const Trace& trace, const Netlist& net) {
    SwitchPeaks p;
    p.per_switch = trace.switch_peak_current;
    for (std::size_t i = 0; i < p.per_switch.size(); ++i) {
        if (p.per_switch[i] > p.max) {
            p.max = p.per_switch[i];
            p.max_switch = net.switches()[i].name;
        }
    }
    return p;
}

ArrayRun run_array(const BuiltArray& array, const GeneratedWorkload& work, const SolverConfig& cfg,
                   std::span<const DeviceState> initial, const AnswerMatrix* answers, std::span<const Probe> probes) {
    const NodeMap& m = array.map;
    Netlist net = array.net;
    if (!initial.empty()) net.set_states(initial);

    // Memristors on each global row, for the half-select bookkeeping.
    std::vector<std::size_t> row_of(net.memristors().size(), 0);
    for (std::size_t i = 0; i < m.cells.size(); ++i) row_of[m.cells[i]] = i / m.cols;

    ArrayRun out;
    const auto& windows = work.windows;
    std::size_t w = 0;
    std::vector<double> peaks(m.sense_nodes.size(), 0.0);
    std::vector<DeviceState> read_start;
    double worst = 0.0;

    auto close_window = [&](std::span<const DeviceState> states) {
        const OpWindow& win = windows[w];
        if (win.kind == OpKind::read) {
            for (std::size_t c = 0; c < peaks.size(); ++c) {
                ReadSample s{win.cycle, win.global_row, c, peaks[c], 0};
                if (answers != nullptr) s.expected = answers->at(win.global_row, c, win.cycle);
                out.samples.push_back(s);
            }
            if (!std::equal(states.begin(), states.end(), read_start.begin(), read_start.end())) ++out.disturbing_reads;
        } else {
            out.worst_half_select.push_back(worst);
        }
    };
    auto open_window = [&](std::span<const DeviceState> states) {
        std::fill(peaks.begin(), peaks.end(), 0.0);
        worst = 0.0;
        if (windows[w].kind == OpKind::read) read_start.assign(states.begin(), states.end());
    };

    bool opened = false;
    auto observer = [&](const StepView& v) {
        // Window [t0, t1) owns the sample at t; the final sample belongs to
        // the last window.
        while (w < windows.size() && v.t >= windows[w].t1 && w + 1 < windows.size()) {
            if (opened) close_window(v.states);
            ++w;
            opened = false;
        }
        if (w >= windows.size()) return;
        if (!opened) {
            open_window(v.states);
            opened = true;
        }
        const OpWindow& win = windows[w];
        if (win.kind == OpKind::read) {
            for (std::size_t c = 0; c < peaks.size(); ++c) {
                peaks[c] = std::max(peaks[c], std::abs(v.op.node_voltages[m.sense_nodes[c]]));
            }
        } else {
            const auto& vm = v.op.memristor_voltages;
            for (std::size_t i = 0; i < vm.size(); ++i) {
                const double a = std::abs(vm[i]);
                out.max_write_voltage = std::max(out.max_write_voltage, a);
                if (row_of[i] != win.global_row) worst = std::max(worst, a);
            }
        }
        if (v.dt == 0.0 && opened) {
            close_window(v.states);
            opened = false;
        }
    };

    out.trace = transient_run(net, work.schedule, cfg, probes, observer);
    return out;
}

}  // namespace memxbar
