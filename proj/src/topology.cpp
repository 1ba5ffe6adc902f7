#include "memxbar/topology.hpp"

#include <cmath>
#include <sstream>

namespace memxbar {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidInput(what);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

/// Node factory that honours wire_r = 0 by aliasing segment ends.
class WireBuilder {
public:
    WireBuilder(Netlist& net, double wire_r, std::size_t& segments) : net_(net), wire_r_(wire_r), segments_(segments) {}

    NodeId extend(NodeId from, const std::string& name) {
        if (wire_r_ == 0.0) return from;
        const NodeId n = net_.add_node(name);
        net_.add_resistor("W" + std::to_string(segments_), from, n, wire_r_);
        ++segments_;
        return n;
    }

private:
    Netlist& net_;
    double wire_r_;
    std::size_t& segments_;
};

/// Write-enable and read-enable branches for each global column node.
void add_column_circuits(Netlist& net, NodeMap& m, double sense_r, const SwitchParams& sw) {
    m.has_column_circuits = true;
    m.write_enable = net.add_gate("WE");
    m.read_enable = net.add_gate("RE");
    for (std::size_t k = 0; k < m.global_columns.size(); ++k) {
        const std::string id = std::to_string(k);
        const NodeId cw = net.add_node("CW" + id);
        const WaveformId w = net.add_waveform("CW" + id);
        net.add_source("VCW" + id, cw, w);
        m.column_drivers.push_back(w);
        m.column_driver_nodes.push_back(cw);
        m.column_switches.push_back(
            net.add_switch("SWE" + id, m.global_columns[k], cw, m.write_enable, sw.r_closed, sw.r_open));

        const NodeId vs = net.add_node("VS" + id);
        m.sense_nodes.push_back(vs);
        m.column_switches.push_back(
            net.add_switch("SRE" + id, m.global_columns[k], vs, m.read_enable, sw.r_closed, sw.r_open));
        net.add_resistor("RS" + id, vs, kGround, sense_r);
    }
}

std::string cell_tag(std::size_t r, std::size_t c) { return "r" + std::to_string(r) + "c" + std::to_string(c); }

}  // namespace

const char* architecture_name(Architecture a) noexcept {
    switch (a) {
    case Architecture::crossbar: return "crossbar";
    case Architecture::one_t_one_m: return "1t1m";
    case Architecture::hybrid: return "hybrid";
    }
    return "?";
}

Architecture parse_architecture(const std::string& s) {
    if (s == "crossbar") return Architecture::crossbar;
    if (s == "1t1m") return Architecture::one_t_one_m;
    if (s == "hybrid") return Architecture::hybrid;
    throw InvalidInput("unknown topology '" + s + "' (expected crossbar, 1t1m or hybrid)");
}

void SwitchParams::validate() const {
    require(finite_nonneg(r_closed), "switch r_closed must be finite and >= 0");
    require(!std::isnan(r_open) && r_open >= r_closed && r_open > 0, "switch r_open must be >= r_closed");
}

void CrossbarSpec::validate() const {
    require(rows >= 1 && cols >= 1, "crossbar rows and cols must be >= 1");
    require(finite_nonneg(wire_r), "crossbar wire_r must be finite and >= 0");
    device.validate();
    require(initial_x.empty() || initial_x.size() == rows * cols, "crossbar initial_x must have rows*cols entries");
    for (double x : initial_x) require(x >= device.x_floor && x <= 1.0, "crossbar initial_x out of [x_floor, 1]");
}

void OneTOneMSpec::validate() const {
    require(rows >= 1 && cols >= 1, "1t1m rows and cols must be >= 1");
    require(finite_nonneg(wire_r), "1t1m wire_r must be finite and >= 0");
    require(std::isfinite(sense_r) && sense_r > 0, "1t1m sense_r must be > 0");
    access.validate();
    column.validate();
    device.validate();
}

void HybridArraySpec::validate() const {
    require(tile_rows >= 1 && tile_rows <= 16, "hybrid tile_rows must be in 1..16");
    require(tile_cols >= 1 && tile_cols <= 16, "hybrid tile_cols must be in 1..16");
    require(tiles_x >= 1 && tiles_y >= 1, "hybrid tiles_x and tiles_y must be >= 1");
    require(finite_nonneg(wire_r), "hybrid wire_r must be finite and >= 0");
    require(std::isfinite(sense_r) && sense_r > 0, "hybrid sense_r must be > 0");
    require(finite_nonneg(threshold_r), "hybrid threshold_r must be finite and >= 0");
    access.validate();
    column.validate();
    device.validate();
}

BuiltArray build_unconstrained(const CrossbarSpec& spec) {
    spec.validate();
    BuiltArray out;
    Netlist& net = out.net;
    NodeMap& m = out.map;
    m.arch = Architecture::crossbar;
    m.rows = m.tile_rows = spec.rows;
    m.cols = m.tile_cols = spec.cols;
    const std::size_t model = net.add_device_model(spec.device);
    WireBuilder wire(net, spec.wire_r, m.wire_segments);

    for (std::size_t r = 0; r < spec.rows; ++r) {
        const NodeId d = net.add_node("DR" + std::to_string(r));
        const WaveformId w = net.add_waveform("DR" + std::to_string(r));
        net.add_source("VDR" + std::to_string(r), d, w);
        m.row_drivers.push_back(w);
        m.row_driver_nodes.push_back(d);
    }
    for (std::size_t c = 0; c < spec.cols; ++c) {
        const NodeId d = net.add_node("DC" + std::to_string(c));
        const WaveformId w = net.add_waveform("DC" + std::to_string(c));
        net.add_source("VDC" + std::to_string(c), d, w);
        m.column_drivers.push_back(w);
        m.column_driver_nodes.push_back(d);
    }

    m.cell_row_nodes.resize(spec.rows * spec.cols);
    m.cell_col_nodes.resize(spec.rows * spec.cols);
    for (std::size_t r = 0; r < spec.rows; ++r) {
        NodeId at = m.row_driver_nodes[r];
        for (std::size_t c = 0; c < spec.cols; ++c) {
            at = wire.extend(at, "J" + cell_tag(r, c) + ".r");
            m.cell_row_nodes[m.cell(r, c)] = at;
        }
    }
    // Column wires run from the bottom driver upward.
    for (std::size_t c = 0; c < spec.cols; ++c) {
        NodeId at = m.column_driver_nodes[c];
        for (std::size_t r = spec.rows; r-- > 0;) {
            at = wire.extend(at, "J" + cell_tag(r, c) + ".c");
            m.cell_col_nodes[m.cell(r, c)] = at;
        }
    }
    for (std::size_t r = 0; r < spec.rows; ++r) {
        for (std::size_t c = 0; c < spec.cols; ++c) {
            const std::size_t i = m.cell(r, c);
            const double x = spec.initial_x.empty() ? spec.device.x0 : spec.initial_x[i];
            m.cells.push_back(
                net.add_memristor("M" + cell_tag(r, c), m.cell_row_nodes[i], m.cell_col_nodes[i], model, {x}));
        }
    }
    return out;
}

BuiltArray build_1t1m(const OneTOneMSpec& spec) {
    spec.validate();
    BuiltArray out;
    Netlist& net = out.net;
    NodeMap& m = out.map;
    m.arch = Architecture::one_t_one_m;
    m.rows = m.tile_rows = spec.rows;
    m.cols = m.tile_cols = spec.cols;
    const std::size_t model = net.add_device_model(spec.device);
    WireBuilder wire(net, spec.wire_r, m.wire_segments);

    for (std::size_t r = 0; r < spec.rows; ++r) {
        const NodeId d = net.add_node("DR" + std::to_string(r));
        const WaveformId w = net.add_waveform("DR" + std::to_string(r));
        net.add_source("VDR" + std::to_string(r), d, w);
        m.row_drivers.push_back(w);
        m.row_driver_nodes.push_back(d);
    }
    m.cell_row_nodes.resize(spec.rows * spec.cols);
    m.cell_col_nodes.resize(spec.rows * spec.cols);
    for (std::size_t r = 0; r < spec.rows; ++r) {
        NodeId at = m.row_driver_nodes[r];
        for (std::size_t c = 0; c < spec.cols; ++c) {
            at = wire.extend(at, "J" + cell_tag(r, c) + ".r");
            m.cell_row_nodes[m.cell(r, c)] = at;
        }
    }
    for (std::size_t c = 0; c < spec.cols; ++c) {
        const NodeId gc = net.add_node("GC" + std::to_string(c));
        m.global_columns.push_back(gc);
        NodeId at = gc;
        for (std::size_t r = spec.rows; r-- > 0;) {
            at = wire.extend(at, "J" + cell_tag(r, c) + ".c");
            m.cell_col_nodes[m.cell(r, c)] = at;
        }
    }
    for (std::size_t r = 0; r < spec.rows; ++r) {
        for (std::size_t c = 0; c < spec.cols; ++c) {
            const std::size_t i = m.cell(r, c);
            const NodeId mid = net.add_node("J" + cell_tag(r, c) + ".m");
            m.cells.push_back(
                net.add_memristor("M" + cell_tag(r, c), m.cell_row_nodes[i], mid, model, {spec.device.x0}));
            const GateId g = net.add_gate("G" + cell_tag(r, c));
            m.selects.push_back(g);
            m.access_switches.push_back(net.add_switch("SA" + cell_tag(r, c), mid, m.cell_col_nodes[i], g,
                                                       spec.access.r_closed, spec.access.r_open));
        }
    }
    add_column_circuits(net, m, spec.sense_r, spec.column);
    return out;
}

BuiltArray build_hybrid(const HybridArraySpec& spec) {
    spec.validate();
    BuiltArray out;
    Netlist& net = out.net;
    NodeMap& m = out.map;
    m.arch = Architecture::hybrid;
    m.tile_rows = spec.tile_rows;
    m.tile_cols = spec.tile_cols;
    m.tiles_x = spec.tiles_x;
    m.tiles_y = spec.tiles_y;
    m.rows = spec.rows();
    m.cols = spec.cols();
    const std::size_t model = net.add_device_model(spec.device);
    WireBuilder wire(net, spec.wire_r, m.wire_segments);

    for (std::size_t r = 0; r < spec.tile_rows; ++r) {
        const NodeId d = net.add_node("DR" + std::to_string(r));
        const WaveformId w = net.add_waveform("DR" + std::to_string(r));
        net.add_source("VDR" + std::to_string(r), d, w);
        m.row_drivers.push_back(w);
        m.row_driver_nodes.push_back(d);
    }
    for (std::size_t k = 0; k < m.cols; ++k) m.global_columns.push_back(net.add_node("GC" + std::to_string(k)));
    for (std::size_t b = 0; b < spec.tiles_y; ++b) m.selects.push_back(net.add_gate("S" + std::to_string(b)));

    m.cell_row_nodes.resize(m.rows * m.cols);
    m.cell_col_nodes.resize(m.rows * m.cols);
    m.cells.resize(m.rows * m.cols);
    for (std::size_t ty = 0; ty < spec.tiles_y; ++ty) {
        for (std::size_t tx = 0; tx < spec.tiles_x; ++tx) {
            const std::string tile = "T" + std::to_string(ty) + "." + std::to_string(tx) + ".";
            const GateId sel = m.selects[ty];
            for (std::size_t r = 0; r < spec.tile_rows; ++r) {
                const NodeId acc = net.add_node(tile + "A" + std::to_string(r));
                m.access_switches.push_back(net.add_switch(tile + "SR" + std::to_string(r), m.row_driver_nodes[r], acc,
                                                           sel, spec.access.r_closed, spec.access.r_open));
                NodeId at = acc;
                for (std::size_t c = 0; c < spec.tile_cols; ++c) {
                    at = wire.extend(at, tile + cell_tag(r, c) + ".r");
                    m.cell_row_nodes[m.cell(ty * spec.tile_rows + r, tx * spec.tile_cols + c)] = at;
                }
            }
            for (std::size_t c = 0; c < spec.tile_cols; ++c) {
                const std::size_t gcol = tx * spec.tile_cols + c;
                const NodeId acc = net.add_node(tile + "B" + std::to_string(c));
                m.access_switches.push_back(net.add_switch(tile + "SC" + std::to_string(c), acc,
                                                           m.global_columns[gcol], sel, spec.access.r_closed,
                                                           spec.access.r_open));
                NodeId at = acc;
                for (std::size_t r = spec.tile_rows; r-- > 0;) {
                    at = wire.extend(at, tile + cell_tag(r, c) + ".c");
                    m.cell_col_nodes[m.cell(ty * spec.tile_rows + r, gcol)] = at;
                }
            }
            for (std::size_t r = 0; r < spec.tile_rows; ++r) {
                for (std::size_t c = 0; c < spec.tile_cols; ++c) {
                    const std::size_t i = m.cell(ty * spec.tile_rows + r, tx * spec.tile_cols + c);
                    m.cells[i] = net.add_memristor(tile + "M" + cell_tag(r, c), m.cell_row_nodes[i],
                                                   m.cell_col_nodes[i], model, {spec.device.x0});
                }
            }
        }
    }
    add_column_circuits(net, m, spec.sense_r, spec.column);
    return out;
}

std::string topology_summary(const BuiltArray& built) {
    const NodeMap& m = built.map;
    std::ostringstream os;
    os << "architecture: " << architecture_name(m.arch) << '\n';
    os << "array: " << m.rows << "x" << m.cols << '\n';
    if (m.arch == Architecture::hybrid) {
        os << "tile: " << m.tile_rows << "x" << m.tile_cols << '\n';
        os << "tiles: " << m.tiles_y << "x" << m.tiles_x << '\n';
    }
    os << "access_switches: " << m.access_switches.size() << '\n';
    os << "column_switches: " << m.column_switches.size() << '\n';
    os << "wire_segments: " << m.wire_segments << '\n';
    os << built.net.summary();
    return os.str();
}

}  // namespace memxbar
