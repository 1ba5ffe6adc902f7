#pragma once

// Memory operations as source waveforms and gate timelines: the two-step
// write, the parallel row read and the seeded random workload.
//
// Time is divided into slots.  A slot is one pulse of width w with edge
// ramps r, centred in w + 2r + gap, so consecutive pulses are separated by
// one gap and every source is at 0 V on slot boundaries.  Gates change only
// on slot boundaries.  A write occupies two slots and a read one.

#include "memxbar/device.hpp"
#include "memxbar/schedule.hpp"
#include "memxbar/topology.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace memxbar {

struct TimingConfig {
    double write_width = 10e-9;  // [s]
    double v_write = 7.0;        // Vw [V]
    double v_read = 1.0;         // [V]
    double read_width = 0.3e-9;  // [s]
    double gap = 1e-9;           // between pulses [s]
    double ramp = 0.1e-9;        // each edge [s]

    /// All positive and the read voltage inside the device dead band.
    void validate(const DeviceParams& device) const;

    [[nodiscard]] double slot(double width) const noexcept { return width + 2.0 * ramp + gap; }
    [[nodiscard]] double write_duration() const noexcept { return 2.0 * slot(write_width); }
    [[nodiscard]] double read_duration() const noexcept { return slot(read_width); }
};

/// Writes one array row: `row` within the tile, `block` selects the row of
/// tiles.  One bit per global column.
struct WriteOp {
    std::size_t row = 0;
    std::size_t block = 0;
    std::vector<std::uint8_t> bits;

    bool operator==(const WriteOp&) const = default;
};

struct ReadOp {
    std::size_t row = 0;
    std::size_t block = 0;

    bool operator==(const ReadOp&) const = default;
};

using Operation = std::variant<WriteOp, ReadOp>;

enum class OpKind { write, read };

/// Time window of one scheduled operation, gap halves included.
struct OpWindow {
    OpKind kind;
    double t0;
    double t1;
    std::size_t global_row;
    std::size_t cycle;   // workload round, 0 when not from a workload
    std::size_t bits;    // cells targeted
};

/// Appends operations to a schedule for one built array.
class ProtocolBuilder {
public:
    ProtocolBuilder(const BuiltArray& array, const TimingConfig& timing);

    /// Two-step write.  Step 1: selected row +Vw/2, others 0, columns at
    /// -Vw/2 for a 1 and +Vw/2 for a 0.  Step 2: selected row -Vw/2, columns
    /// unchanged.
    void write(const WriteOp& op, std::size_t cycle = 0);
    /// Selected row at the read voltage, others 0, read-enables closed.
    void read(const ReadOp& op, std::size_t cycle = 0);
    /// Single-cell write for the unconstrained crossbar: the row at +-Vw/2
    /// and the column at -+Vw/2 for one pulse, every other line at 0.
    void write_cell(std::size_t row, std::size_t col, bool bit, std::size_t cycle = 0);

    [[nodiscard]] double now() const noexcept { return t_; }
    [[nodiscard]] const std::vector<OpWindow>& windows() const noexcept { return windows_; }
    /// Finishes the schedule at the end of the last slot.
    [[nodiscard]] Schedule finish() const;

private:
    void check_row(std::size_t row, std::size_t block) const;
    void set_gates(OpKind kind, std::size_t row, std::size_t block);
    void pulse(std::span<const double> row_values, std::span<const double> col_values, double width);

    const BuiltArray& array_;
    TimingConfig timing_;
    Schedule sched_;
    double t_ = 0.0;
    std::vector<OpWindow> windows_;
};

/// Expected bit per (array row, array column, round).
struct AnswerMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t cycles = 0;
    std::vector<std::uint8_t> bits;

    [[nodiscard]] std::uint8_t at(std::size_t r, std::size_t c, std::size_t k) const {
        return bits.at((k * rows + r) * cols + c);
    }
    bool operator==(const AnswerMatrix&) const = default;
};

struct Workload {
    std::uint64_t seed = 0;
    std::size_t rounds = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t tile_rows = 0;
    /// Per round: one write to a random row, then a read of every row.
    std::vector<Operation> ops;

    bool operator==(const Workload&) const = default;
};

struct GeneratedWorkload {
    Workload workload;
    AnswerMatrix answers;
    Schedule schedule;
    std::vector<OpWindow> windows;
};

/// Random operation sequence from std::mt19937_64 seeded with `seed`.  Each
/// round draws the row as rng() % rows and each bit as the top bit of one
/// rng() output, which is identical on every platform.  All devices start at
/// bit 0.
[[nodiscard]] Workload make_workload(std::uint64_t seed, std::size_t rounds, const NodeMap& map);
[[nodiscard]] AnswerMatrix answer_matrix(const Workload& w);
[[nodiscard]] GeneratedWorkload generate_workload(std::uint64_t seed, std::size_t rounds, const BuiltArray& array,
                                                  const TimingConfig& timing);

/// Schedule of only the workload's writes.
[[nodiscard]] GeneratedWorkload writes_only(const Workload& w, const BuiltArray& array, const TimingConfig& timing);
/// `passes` reads of every row, no writes.
[[nodiscard]] GeneratedWorkload reads_only(std::size_t passes, const BuiltArray& array, const TimingConfig& timing);

/// Fully ON or fully OFF at random, one entry per cell.
[[nodiscard]] std::vector<DeviceState> random_states(std::uint64_t seed, std::size_t n, const DeviceParams& p);

/// Comparator: 1 iff v_s > threshold.
[[nodiscard]] inline bool digitize(double v_s, double threshold) noexcept { return v_s > threshold; }

/// Comparator threshold for a sense resistance.  With threshold_r > 0 it is
/// the read divider through R_T; otherwise the midpoint of the ideal ON and
/// OFF divider voltages.
[[nodiscard]] double comparator_threshold(double sense_r, double threshold_r, double v_read, const DeviceParams& p);

/// CSV export of a schedule's operations and of an answer matrix.
void write_operations_csv(std::ostream& os, const GeneratedWorkload& g);
void write_answers_csv(std::ostream& os, const AnswerMatrix& a);

}  // namespace memxbar
