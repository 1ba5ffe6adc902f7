#include "memxbar/trace.hpp"

#include "memxbar/util.hpp"

#include <algorithm>
#include <ostream>

namespace memxbar {

std::string probe_label(const Netlist& net, const Probe& p) {
    switch (p.kind) {
    case Probe::Kind::node_voltage: return "v:" + net.node_name(static_cast<NodeId>(p.index));
    case Probe::Kind::memristor_current: return "i:" + net.memristors()[p.index].name;
    case Probe::Kind::memristor_state: return "x:" + net.memristors()[p.index].name;
    case Probe::Kind::memristor_voltage: return "vm:" + net.memristors()[p.index].name;
    case Probe::Kind::switch_current: return "isw:" + net.switches()[p.index].name;
    }
    return {};
}

Probe parse_probe(const Netlist& net, std::string_view label) {
    const auto colon = label.find(':');
    if (colon == std::string_view::npos) throw InvalidInput("probe label needs a kind prefix: " + std::string(label));
    const auto kind = label.substr(0, colon);
    const auto name = label.substr(colon + 1);
    if (kind == "v") return {Probe::Kind::node_voltage, net.node(name)};
    if (kind == "i") return {Probe::Kind::memristor_current, net.memristor_index(name)};
    if (kind == "x") return {Probe::Kind::memristor_state, net.memristor_index(name)};
    if (kind == "vm") return {Probe::Kind::memristor_voltage, net.memristor_index(name)};
    if (kind == "isw") return {Probe::Kind::switch_current, net.switch_index(name)};
    throw InvalidInput("unknown probe kind: " + std::string(kind));
}

std::vector<Probe> all_node_probes(const Netlist& net) {
    std::vector<Probe> out;
    for (std::size_t n = 1; n < net.node_count(); ++n) out.push_back({Probe::Kind::node_voltage, n});
    return out;
}

const std::vector<double>& Trace::column(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return columns[i];
    }
    throw InvalidInput("trace has no probe " + std::string(label));
}

double Trace::energy_at(double t) const {
    if (time.empty()) throw InvalidInput("energy_at: empty trace");
    if (t <= time.front()) return energy.front();
    if (t >= time.back()) return energy.back();
    auto hi = std::upper_bound(time.begin(), time.end(), t);
    const auto k = static_cast<std::size_t>(hi - time.begin());
    const double f = (t - time[k - 1]) / (time[k] - time[k - 1]);
    return energy[k - 1] + f * (energy[k] - energy[k - 1]);
}

double energy_between(const Trace& trace, double t0, double t1) {
    if (trace.time.empty()) throw InvalidInput("energy_between: empty trace");
    if (!(t0 < t1) || t0 < trace.t_begin() || t1 > trace.t_end()) {
        throw InvalidInput("energy_between: interval outside the trace span");
    }
    return trace.energy_at(t1) - trace.energy_at(t0);
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
    os << "time_ns";
    for (const auto& l : trace.labels) os << ',' << l;
    os << ",energy_J\n";
    for (std::size_t k = 0; k < trace.time.size(); ++k) {
        os << format_number(trace.time[k] * 1e9);
        for (const auto& c : trace.columns) os << ',' << format_number(c[k]);
        os << ',' << format_number(trace.energy[k]) << '\n';
    }
}

}  // namespace memxbar
