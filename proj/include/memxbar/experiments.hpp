#pragma once

// The studies behind the CLI commands.  Each takes a validated
// ExperimentConfig and returns plain result structs; formatting lives in
// the write_* functions so the CLI only handles files.

#include "memxbar/analysis.hpp"
#include "memxbar/area.hpp"
#include "memxbar/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace memxbar {

/// Platform-independent child seed for one sub-run (std::seed_seq mixing).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b = 0);

// ---- device test -----------------------------------------------------------

struct DeviceTestSample {
    double t;  // [s]
    double v;  // [V]
    double i;  // [A]
    double x;
};

struct DeviceTestResult {
    std::vector<DeviceTestSample> samples;
    std::vector<double> read_resistance;  // one per read pulse, in sequence order [Ohm]
    double r_on = 0.0;    // model value at x = 1
    double r_off = 0.0;   // model value at x = x_floor
    double energy = 0.0;  // [J]
};

/// Single memristor driven by the configured pulse sequence.
[[nodiscard]] DeviceTestResult run_device_test(const ExperimentConfig& cfg);
void write_device_test_csv(std::ostream& os, const DeviceTestResult& r);
void write_device_test_summary(std::ostream& os, const DeviceTestResult& r, const ExperimentConfig& cfg);

// ---- crossbar write-energy scaling ----------------------------------------

struct EnergyScalingRow {
    std::size_t size = 0;
    double energy = 0.0;     // mean single-bit write energy [J]
    double std_error = 0.0;  // [J]
    std::size_t trials = 0;
    bool beyond_simulated_scale = false;  // size > 16
};

/// Unconstrained n x n crossbar, one V/2 single-bit write per trial on a
/// fresh random ON/OFF background.
[[nodiscard]] std::vector<EnergyScalingRow> run_energy_scaling(const ExperimentConfig& cfg);
/// Energy of one trial; exposed for tests.
[[nodiscard]] double crossbar_write_energy(const ExperimentConfig& cfg, std::size_t size, std::uint64_t trial_seed);
void write_energy_scaling_csv(std::ostream& os, const std::vector<EnergyScalingRow>& rows);

// ---- tile characterization ------------------------------------------------

struct TileReport {
    // configuration echo
    std::size_t tile_rows = 0;
    std::size_t tile_cols = 0;
    std::size_t tiles_x = 0;
    std::size_t tiles_y = 0;
    double v_write = 0.0;
    double sense_r_on = 0.0;
    double sense_r = 0.0;
    double wire_r = 0.0;
    std::uint64_t seed = 0;
    std::size_t rounds = 0;

    NoiseMarginReport margin;
    double threshold = 0.0;           // comparator threshold [V]
    std::size_t comparator_errors = 0;
    std::size_t reads = 0;
    EnergyMeasure write_energy;
    EnergyMeasure read_energy;
    double peak_switch_current = 0.0;  // writes-only run [A]
    std::string peak_switch;
    double worst_half_select = 0.0;    // [V]
    double max_write_voltage = 0.0;    // [V]
    std::size_t disturbing_reads = 0;
    std::vector<ReadSample> samples;
    std::string netlist_summary;
    Trace probe_trace;  // workload run, only when output.probes is set
};

/// Workload run (margin), writes-only run (write energy, peak switch
/// current) and reads-only run on a random array (read energy).
[[nodiscard]] TileReport run_tile(const ExperimentConfig& cfg);
void write_tile_report(std::ostream& os, const TileReport& r);
/// One JSON object with every field of the report except the samples.
[[nodiscard]] std::string tile_record(const TileReport& r);
void write_read_samples_csv(std::ostream& os, const std::vector<ReadSample>& samples);

// ---- sweep ----------------------------------------------------------------

struct SweepPoint {
    std::size_t tile = 0;
    double v_write = 0.0;
    double sense_r_on = 0.0;
    bool ok = false;
    std::string error;
    TileReport report;
    bool argmax = false;  // largest margin among successful points
};

/// Grid over the sweep block, each point an independent run with the base
/// seed.  Points run concurrently on up to `jobs` threads; the result is
/// sorted by (tile, v_write, sense_r_on) and does not depend on `jobs`.
[[nodiscard]] std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg, int jobs);
void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points);
void write_sweep_table(std::ostream& os, const std::vector<SweepPoint>& points);

}  // namespace memxbar
