#pragma once

// Netlist builders for the three array architectures: the unconstrained
// crossbar, the 1T1M array and the hybrid tiled array.  Wire resistance is
// explicit: one resistor per segment between adjacent junctions and from
// each wire end to its driver or access switch.  A wire_r of 0 merges the
// segment's end nodes instead.

#include "memxbar/device.hpp"
#include "memxbar/netlist.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace memxbar {

enum class Architecture { crossbar, one_t_one_m, hybrid };

[[nodiscard]] const char* architecture_name(Architecture a) noexcept;
/// Accepts `crossbar`, `1t1m` and `hybrid`.
[[nodiscard]] Architecture parse_architecture(const std::string& s);

struct SwitchParams {
    double r_closed = 1e3;
    double r_open = 1e10;

    void validate() const;
    bool operator==(const SwitchParams&) const = default;
};

struct CrossbarSpec {
    std::size_t rows = 4;
    std::size_t cols = 4;
    double wire_r = 500.0;
    DeviceParams device{};
    /// Initial state per junction, row-major.  Empty means x0 everywhere.
    std::vector<double> initial_x;

    void validate() const;
};

struct OneTOneMSpec {
    std::size_t rows = 4;
    std::size_t cols = 4;
    double wire_r = 500.0;
    double sense_r = 8.0 * 124947.931853635;
    SwitchParams access{};
    SwitchParams column{};
    DeviceParams device{};

    void validate() const;
};

struct HybridArraySpec {
    std::size_t tile_rows = 4;
    std::size_t tile_cols = 4;
    std::size_t tiles_x = 2;
    std::size_t tiles_y = 2;
    double wire_r = 500.0;
    double sense_r = 8.0 * 124947.931853635;  // 8 R_on of the default device
    /// Comparator reference resistance.  0 selects the midpoint between the
    /// ideal ON and OFF divider voltages.
    double threshold_r = 0.0;
    SwitchParams access{};   // row and column access switches
    SwitchParams column{};   // write-enable and read-enable switches
    DeviceParams device{};

    void validate() const;
    [[nodiscard]] std::size_t rows() const noexcept { return tile_rows * tiles_y; }
    [[nodiscard]] std::size_t cols() const noexcept { return tile_cols * tiles_x; }
};

/// Named handles into a built netlist.  Cells are addressed by global
/// (row, col) in the memory array; for the hybrid array global row
/// = block * tile_rows + row-in-tile, where a block is one row of tiles.
struct NodeMap {
    Architecture arch = Architecture::crossbar;
    std::size_t rows = 0;
    std::size_t cols = 0;

    // Hybrid geometry; for the other architectures one tile spans the array.
    std::size_t tile_rows = 0;
    std::size_t tile_cols = 0;
    std::size_t tiles_x = 1;
    std::size_t tiles_y = 1;

    /// Data-row drivers.  Hybrid: D_R per row-in-tile, shared by all tiles.
    /// Crossbar and 1T1M: one per array row.
    std::vector<WaveformId> row_drivers;
    std::vector<NodeId> row_driver_nodes;
    /// Column drivers: per array column (crossbar) or per global column
    /// write source CW_k (1T1M, hybrid).
    std::vector<WaveformId> column_drivers;
    std::vector<NodeId> column_driver_nodes;

    /// Hybrid: select S per block.  1T1M: one gate per cell, row-major.
    std::vector<GateId> selects;
    bool has_column_circuits = false;
    GateId write_enable = 0;
    GateId read_enable = 0;
    std::vector<NodeId> global_columns;  // GC_k
    std::vector<NodeId> sense_nodes;     // V_s per global column

    std::vector<std::size_t> cells;      // memristor index per cell, row-major
    std::vector<NodeId> cell_row_nodes;  // row-wire terminal of each cell
    std::vector<NodeId> cell_col_nodes;  // column-wire terminal of each cell
    std::vector<std::size_t> access_switches;
    std::vector<std::size_t> column_switches;  // write- and read-enable
    std::size_t wire_segments = 0;

    [[nodiscard]] std::size_t cell(std::size_t row, std::size_t col) const { return row * cols + col; }
    [[nodiscard]] std::size_t memristor(std::size_t row, std::size_t col) const { return cells.at(cell(row, col)); }
    [[nodiscard]] std::size_t block_of(std::size_t row) const noexcept { return row / tile_rows; }
    [[nodiscard]] std::size_t row_in_tile(std::size_t row) const noexcept { return row % tile_rows; }
};

struct BuiltArray {
    Netlist net;
    NodeMap map;
};

/// Row drivers sit at the left end of each row wire and column drivers at
/// the bottom end of each column wire; sneak paths are not suppressed.
[[nodiscard]] BuiltArray build_unconstrained(const CrossbarSpec& spec);

/// One access switch in series with each memristor, plus the same column
/// circuits as the hybrid array.
[[nodiscard]] BuiltArray build_1t1m(const OneTOneMSpec& spec);

/// Tiled array.  Every tile has tile_rows row-access switches from the
/// shared data rows and tile_cols column-access switches to the global
/// column wires, all gated by its block's select.  Each global column ends
/// in a write-enable switch to its write source and a read-enable switch to
/// a sense resistor.
[[nodiscard]] BuiltArray build_hybrid(const HybridArraySpec& spec);

/// Architecture, geometry and element counts as `key: value` lines.
[[nodiscard]] std::string topology_summary(const BuiltArray& built);

}  // namespace memxbar
