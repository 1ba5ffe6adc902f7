#pragma once

// Closed-form areal density.  Hybrid tiles are transistor limited, the
// unconstrained crossbar is memristor limited, and the SRAM and STT-MRAM
// columns come from calibrated cell constants.

#include "memxbar/device.hpp"  // InvalidInput

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace memxbar {

struct CellConstant {
    double f2_per_bit = 0.0;    // cell area in F^2
    double feature = 0.0;       // [m]
};

/// Energies and times shown next to the densities.  Literature values for
/// SRAM and STT-MRAM, the reference run's numbers for the memristor columns.
struct DisplayConstants {
    std::optional<double> read_energy_fj;
    std::optional<double> write_energy_fj;
    std::optional<double> read_time_ns;
    std::optional<double> write_time_ns;
};

struct AreaSpec {
    double feature = 45e-9;            // F [m]
    double transistor_factor = 50.0;   // F^2 per transistor cell
    double memristor_factor = 4.0;     // F^2 per memristor
    std::size_t tile_rows = 4;
    std::size_t tile_cols = 4;
    std::map<std::string, CellConstant> constants{
        {"SRAM", {146.1, 45e-9}},
        {"STT-MRAM", {31.14, 65e-9}},
    };
    std::map<std::string, DisplayConstants> display{
        {"SRAM Active", {0.7, 0.7, 0.3, 0.3}},
        {"SRAM Leakage", {27.7, 27.7, std::nullopt, std::nullopt}},
        {"STT-MRAM", {60.4, 1177, 0.3, 0.57}},
        {"Hybrid (4x4)", {5.506, 3118, 0.3, 10}},
        {"Hybrid (8x8)", {6.849, 6372, 0.3, 10}},
        {"1kB Crossbar", {21, 70000, 0.3, 10}},
    };

    void validate() const;
};

struct DensityRow {
    std::string name;
    double gbit_per_cm2 = 0.0;
    double f2_per_bit = 0.0;
    double feature = 0.0;  // [m]
    DisplayConstants display;
};

/// Bits per cm^2 / 1e9 for a cell of f2_per_bit at feature size F.
[[nodiscard]] double density_gbit_cm2(double f2_per_bit, double feature);

/// (tile_rows + tile_cols) transistors per tile_rows * tile_cols bits.
[[nodiscard]] DensityRow hybrid_density(const AreaSpec& spec);
/// One transistor per bit.
[[nodiscard]] DensityRow one_t_one_m_density(const AreaSpec& spec);
[[nodiscard]] DensityRow crossbar_density(const AreaSpec& spec);

/// SRAM, STT-MRAM, hybrid 4x4 and 8x8 and the 1kB crossbar, plus a custom
/// hybrid row when the configured tile is neither 4x4 nor 8x8.
[[nodiscard]] std::vector<DensityRow> comparison_table(const AreaSpec& spec);

struct DensityRatios {
    double hybrid4_over_1t1m = 0.0;
    double hybrid8_over_1t1m = 0.0;
    double hybrid8_over_stt = 0.0;
};
[[nodiscard]] DensityRatios density_ratios(const AreaSpec& spec);

void write_density_table(std::ostream& os, const std::vector<DensityRow>& rows, const DensityRatios& ratios);
void write_density_csv(std::ostream& os, const std::vector<DensityRow>& rows);

}  // namespace memxbar
