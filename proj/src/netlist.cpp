#include "memxbar/netlist.hpp"

#include <cmath>
#include <sstream>

namespace memxbar {

Netlist::Netlist() {
    node_names_.emplace_back("0");
    node_index_.emplace("0", kGround);
    driven_.push_back(false);
}

NodeId Netlist::add_node(std::string name) {
    if (node_index_.contains(name)) throw InvalidInput("duplicate node name: " + name);
    const auto id = static_cast<NodeId>(node_names_.size());
    node_index_.emplace(name, id);
    node_names_.push_back(std::move(name));
    driven_.push_back(false);
    return id;
}

NodeId Netlist::node(std::string_view name) const {
    auto it = node_index_.find(std::string(name));
    if (it == node_index_.end()) throw InvalidInput("unknown node: " + std::string(name));
    return it->second;
}

bool Netlist::has_node(std::string_view name) const { return node_index_.contains(std::string(name)); }

GateId Netlist::add_gate(std::string name) {
    gate_names_.push_back(std::move(name));
    return static_cast<GateId>(gate_names_.size() - 1);
}

WaveformId Netlist::add_waveform(std::string name) {
    waveform_names_.push_back(std::move(name));
    return static_cast<WaveformId>(waveform_names_.size() - 1);
}

std::size_t Netlist::add_device_model(const DeviceParams& params) {
    params.validate();
    models_.push_back(params);
    return models_.size() - 1;
}

void Netlist::check_node(NodeId id, const char* what) const {
    if (id >= node_names_.size()) throw InvalidInput(std::string(what) + ": terminal references unknown node");
}

std::size_t Netlist::add_resistor(std::string name, NodeId a, NodeId b, double ohms) {
    check_node(a, "resistor");
    check_node(b, "resistor");
    if (!(ohms > 0) || !std::isfinite(ohms)) throw InvalidInput("resistor " + name + ": resistance must be finite and > 0");
    resistors_.push_back({std::move(name), a, b, ohms});
    return resistors_.size() - 1;
}

std::size_t Netlist::add_switch(std::string name, NodeId a, NodeId b, GateId gate, double r_closed, double r_open) {
    check_node(a, "switch");
    check_node(b, "switch");
    if (gate >= gate_names_.size()) throw InvalidInput("switch " + name + ": unknown gate");
    if (!(r_closed >= 0) || !std::isfinite(r_closed)) throw InvalidInput("switch " + name + ": r_closed must be finite and >= 0");
    if (!(r_open > 0) || r_open < r_closed) throw InvalidInput("switch " + name + ": r_open must be > 0 and >= r_closed");
    switches_.push_back({std::move(name), a, b, gate, r_closed, r_open});
    return switches_.size() - 1;
}

std::size_t Netlist::add_source(std::string name, NodeId pos, WaveformId waveform) {
    check_node(pos, "source");
    if (pos == kGround) throw InvalidInput("source " + name + ": cannot drive ground");
    if (waveform >= waveform_names_.size()) throw InvalidInput("source " + name + ": unknown waveform");
    if (driven_[pos]) throw InvalidInput("source " + name + ": node already driven");
    driven_[pos] = true;
    sources_.push_back({std::move(name), pos, kGround, waveform});
    return sources_.size() - 1;
}

std::size_t Netlist::add_memristor(std::string name, NodeId a, NodeId b, std::size_t model, DeviceState state) {
    check_node(a, "memristor");
    check_node(b, "memristor");
    if (model >= models_.size()) throw InvalidInput("memristor " + name + ": unknown device model");
    const auto& p = models_[model];
    if (!(state.x >= p.x_floor && state.x <= 1.0)) throw InvalidInput("memristor " + name + ": state outside [x_floor, 1]");
    memristors_.push_back({std::move(name), a, b, model, state});
    return memristors_.size() - 1;
}

std::vector<DeviceState> Netlist::states() const {
    std::vector<DeviceState> out;
    out.reserve(memristors_.size());
    for (const auto& m : memristors_) out.push_back(m.state);
    return out;
}

void Netlist::set_states(std::span<const DeviceState> states) {
    if (states.size() != memristors_.size()) throw InvalidInput("set_states: size mismatch");
    for (std::size_t i = 0; i < states.size(); ++i) memristors_[i].state = states[i];
}

std::size_t Netlist::memristor_index(std::string_view name) const {
    for (std::size_t i = 0; i < memristors_.size(); ++i) {
        if (memristors_[i].name == name) return i;
    }
    throw InvalidInput("unknown memristor: " + std::string(name));
}

std::size_t Netlist::switch_index(std::string_view name) const {
    for (std::size_t i = 0; i < switches_.size(); ++i) {
        if (switches_[i].name == name) return i;
    }
    throw InvalidInput("unknown switch: " + std::string(name));
}

ElementCounts Netlist::counts() const {
    return {node_names_.size(), resistors_.size(), switches_.size(), sources_.size(),
            memristors_.size(), gate_names_.size(), waveform_names_.size()};
}

std::string Netlist::summary() const {
    const auto c = counts();
    std::ostringstream os;
    os << "nodes: " << c.nodes << '\n'
       << "resistors: " << c.resistors << '\n'
       << "switches: " << c.switches << '\n'
       << "sources: " << c.sources << '\n'
       << "memristors: " << c.memristors << '\n'
       << "gates: " << c.gates << '\n'
       << "waveforms: " << c.waveforms << '\n';
    return os.str();
}

std::string Netlist::dump() const {
    std::ostringstream os;
    os.precision(12);
    for (const auto& r : resistors_) {
        os << "R " << r.name << ' ' << node_name(r.a) << ' ' << node_name(r.b) << ' ' << r.ohms << '\n';
    }
    for (const auto& s : switches_) {
        os << "S " << s.name << ' ' << node_name(s.a) << ' ' << node_name(s.b) << " gate=" << gate_name(s.gate)
           << " r_closed=" << s.r_closed << " r_open=" << s.r_open << '\n';
    }
    for (const auto& v : sources_) {
        os << "V " << v.name << ' ' << node_name(v.pos) << ' ' << node_name(v.neg)
           << " waveform=" << waveform_name(v.waveform) << '\n';
    }
    for (const auto& m : memristors_) {
        os << "M " << m.name << ' ' << node_name(m.a) << ' ' << node_name(m.b) << " model=" << m.model
           << " x=" << m.state.x << '\n';
    }
    return os.str();
}

}  // namespace memxbar
