#include "memxbar/protocol.hpp"

#include "memxbar/util.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>

namespace memxbar {

void TimingConfig::validate(const DeviceParams& device) const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(write_width)) throw InvalidInput("timing write_width must be > 0");
    if (!positive(v_write)) throw InvalidInput("timing v_write must be > 0");
    if (!positive(v_read)) throw InvalidInput("timing v_read must be > 0");
    if (!positive(read_width)) throw InvalidInput("timing read_width must be > 0");
    if (!positive(gap)) throw InvalidInput("timing gap must be > 0");
    if (!positive(ramp)) throw InvalidInput("timing ramp must be > 0");
    if (v_read >= device.dead_band()) {
        throw InvalidInput("timing v_read must stay below the switching threshold (" +
                           format_number(device.dead_band()) + " V)");
    }
}

ProtocolBuilder::ProtocolBuilder(const BuiltArray& array, const TimingConfig& timing)
    : array_(array), timing_(timing), sched_(array.net) {
    timing_.validate(array.net.device_model(0));
}

void ProtocolBuilder::check_row(std::size_t row, std::size_t block) const {
    const NodeMap& m = array_.map;
    if (row >= m.tile_rows || block >= m.tiles_y) {
        throw InvalidInput("operation row " + std::to_string(row) + " block " + std::to_string(block) +
                           " outside the array");
    }
}

void ProtocolBuilder::set_gates(OpKind kind, std::size_t row, std::size_t block) {
    const NodeMap& m = array_.map;
    if (m.arch == Architecture::hybrid) {
        for (std::size_t b = 0; b < m.selects.size(); ++b) sched_.gates[m.selects[b]].set(t_, b == block);
    } else if (m.arch == Architecture::one_t_one_m) {
        for (std::size_t i = 0; i < m.selects.size(); ++i) sched_.gates[m.selects[i]].set(t_, i / m.cols == row);
    }
    if (m.has_column_circuits) {
        sched_.gates[m.write_enable].set(t_, kind == OpKind::write);
        sched_.gates[m.read_enable].set(t_, kind == OpKind::read);
    }
}

void ProtocolBuilder::pulse(std::span<const double> row_values, std::span<const double> col_values, double width) {
    const double start = t_ + 0.5 * timing_.gap;
    const double r = timing_.ramp;
    auto emit = [&](WaveformId w, double v) {
        if (v == 0.0) return;
        PwlWaveform& wf = sched_.waveforms[w];
        wf.add(start, 0.0);
        wf.add(start + r, v);
        wf.add(start + r + width, v);
        wf.add(start + 2.0 * r + width, 0.0);
    };
    const NodeMap& m = array_.map;
    for (std::size_t i = 0; i < row_values.size(); ++i) emit(m.row_drivers[i], row_values[i]);
    for (std::size_t i = 0; i < col_values.size(); ++i) emit(m.column_drivers[i], col_values[i]);
    t_ += timing_.slot(width);
}

void ProtocolBuilder::write(const WriteOp& op, std::size_t cycle) {
    check_row(op.row, op.block);
    const NodeMap& m = array_.map;
    if (op.bits.size() != m.cols) {
        throw InvalidInput("write needs " + std::to_string(m.cols) + " bits, got " + std::to_string(op.bits.size()));
    }
    const double half = 0.5 * timing_.v_write;
    std::vector<double> rows(m.row_drivers.size(), 0.0);
    std::vector<double> cols(m.column_drivers.size(), 0.0);
    for (std::size_t c = 0; c < m.cols; ++c) cols[c] = op.bits[c] ? -half : half;
    const std::size_t drv = m.arch == Architecture::hybrid ? op.row : op.block * m.tile_rows + op.row;

    const double t0 = t_;
    set_gates(OpKind::write, op.row, op.block);
    rows[drv] = half;
    pulse(rows, cols, timing_.write_width);
    rows[drv] = -half;
    pulse(rows, cols, timing_.write_width);
    windows_.push_back({OpKind::write, t0, t_, op.block * m.tile_rows + op.row, cycle, m.cols});
}

void ProtocolBuilder::read(const ReadOp& op, std::size_t cycle) {
    check_row(op.row, op.block);
    const NodeMap& m = array_.map;
    std::vector<double> rows(m.row_drivers.size(), 0.0);
    const std::size_t drv = m.arch == Architecture::hybrid ? op.row : op.block * m.tile_rows + op.row;
    rows[drv] = timing_.v_read;

    const double t0 = t_;
    set_gates(OpKind::read, op.row, op.block);
    pulse(rows, {}, timing_.read_width);
    windows_.push_back({OpKind::read, t0, t_, op.block * m.tile_rows + op.row, cycle, m.cols});
}

void ProtocolBuilder::write_cell(std::size_t row, std::size_t col, bool bit, std::size_t cycle) {
    const NodeMap& m = array_.map;
    if (m.arch != Architecture::crossbar) throw InvalidInput("write_cell is defined for the unconstrained crossbar");
    if (row >= m.rows || col >= m.cols) throw InvalidInput("write_cell outside the array");
    const double half = 0.5 * timing_.v_write;
    std::vector<double> rows(m.row_drivers.size(), 0.0);
    std::vector<double> cols(m.column_drivers.size(), 0.0);
    rows[row] = bit ? half : -half;
    cols[col] = bit ? -half : half;
    const double t0 = t_;
    pulse(rows, cols, timing_.write_width);
    windows_.push_back({OpKind::write, t0, t_, row, cycle, 1});
}

Schedule ProtocolBuilder::finish() const {
    Schedule s = sched_;
    s.t_end = t_;
    return s;
}

Workload make_workload(std::uint64_t seed, std::size_t rounds, const NodeMap& map) {
    if (rounds == 0) throw InvalidInput("workload rounds must be >= 1");
    Workload w;
    w.seed = seed;
    w.rounds = rounds;
    w.rows = map.rows;
    w.cols = map.cols;
    w.tile_rows = map.tile_rows;
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < rounds; ++k) {
        const std::size_t r = static_cast<std::size_t>(rng() % map.rows);
        WriteOp op{r % map.tile_rows, r / map.tile_rows, std::vector<std::uint8_t>(map.cols)};
        for (auto& b : op.bits) b = static_cast<std::uint8_t>(rng() >> 63);
        w.ops.emplace_back(std::move(op));
        for (std::size_t rr = 0; rr < map.rows; ++rr) w.ops.emplace_back(ReadOp{rr % map.tile_rows, rr / map.tile_rows});
    }
    return w;
}

AnswerMatrix answer_matrix(const Workload& w) {
    AnswerMatrix a;
    a.rows = w.rows;
    a.cols = w.cols;
    a.cycles = w.rounds;
    a.bits.reserve(w.rows * w.cols * w.rounds);
    std::vector<std::uint8_t> contents(w.rows * w.cols, 0);
    for (const auto& op : w.ops) {
        const auto* wr = std::get_if<WriteOp>(&op);
        if (wr == nullptr) continue;
        const std::size_t r = wr->block * w.tile_rows + wr->row;
        std::copy(wr->bits.begin(), wr->bits.end(), contents.begin() + static_cast<std::ptrdiff_t>(r * w.cols));
        a.bits.insert(a.bits.end(), contents.begin(), contents.end());
    }
    return a;
}

GeneratedWorkload generate_workload(std::uint64_t seed, std::size_t rounds, const BuiltArray& array,
                                    const TimingConfig& timing) {
    GeneratedWorkload g;
    g.workload = make_workload(seed, rounds, array.map);
    g.answers = answer_matrix(g.workload);
    ProtocolBuilder b(array, timing);
    std::size_t cycle = 0;
    bool first = true;
    for (const auto& op : g.workload.ops) {
        if (const auto* wr = std::get_if<WriteOp>(&op)) {
            if (!first) ++cycle;
            first = false;
            b.write(*wr, cycle);
        } else {
            b.read(std::get<ReadOp>(op), cycle);
        }
    }
    g.schedule = b.finish();
    g.windows = b.windows();
    return g;
}

GeneratedWorkload writes_only(const Workload& w, const BuiltArray& array, const TimingConfig& timing) {
    GeneratedWorkload g;
    g.workload = w;
    std::erase_if(g.workload.ops, [](const Operation& op) { return std::holds_alternative<ReadOp>(op); });
    ProtocolBuilder b(array, timing);
    std::size_t cycle = 0;
    for (const auto& op : g.workload.ops) b.write(std::get<WriteOp>(op), cycle++);
    g.schedule = b.finish();
    g.windows = b.windows();
    return g;
}

GeneratedWorkload reads_only(std::size_t passes, const BuiltArray& array, const TimingConfig& timing) {
    if (passes == 0) throw InvalidInput("read passes must be >= 1");
    GeneratedWorkload g;
    const NodeMap& m = array.map;
    g.workload.rounds = passes;
    g.workload.rows = m.rows;
    g.workload.cols = m.cols;
    g.workload.tile_rows = m.tile_rows;
    ProtocolBuilder b(array, timing);
    for (std::size_t p = 0; p < passes; ++p) {
        for (std::size_t r = 0; r < m.rows; ++r) {
            const ReadOp op{r % m.tile_rows, r / m.tile_rows};
            g.workload.ops.emplace_back(op);
            b.read(op, p);
        }
    }
    g.schedule = b.finish();
    g.windows = b.windows();
    return g;
}

std::vector<DeviceState> random_states(std::uint64_t seed, std::size_t n, const DeviceParams& p) {
    std::mt19937_64 rng(seed);
    std::vector<DeviceState> out(n);
    for (auto& s : out) s.x = (rng() >> 63) ? 1.0 : p.x_floor;
    return out;
}

double comparator_threshold(double sense_r, double threshold_r, double v_read, const DeviceParams& p) {
    if (threshold_r > 0.0) return v_read * sense_r / (sense_r + threshold_r);
    const double v_on = v_read * sense_r / (sense_r + r_on(p, v_read));
    const double v_off = v_read * sense_r / (sense_r + r_off(p, v_read));
    return 0.5 * (v_on + v_off);
}

void write_operations_csv(std::ostream& os, const GeneratedWorkload& g) {
    std::vector<const WriteOp*> writes;
    for (const auto& op : g.workload.ops) {
        if (const auto* wr = std::get_if<WriteOp>(&op)) writes.push_back(wr);
    }
    os << "kind,t0_ns,t1_ns,row,cycle,bits\n";
    std::size_t next_write = 0;
    for (const auto& w : g.windows) {
        os << (w.kind == OpKind::write ? "write" : "read") << ',' << format_number(w.t0 * 1e9) << ','
           << format_number(w.t1 * 1e9) << ',' << w.global_row << ',' << w.cycle << ',';
        if (w.kind == OpKind::write && next_write < writes.size()) {
            for (auto b : writes[next_write++]->bits) os << static_cast<int>(b);
        }
        os << '\n';
    }
}

void write_answers_csv(std::ostream& os, const AnswerMatrix& a) {
    os << "cycle,row";
    for (std::size_t c = 0; c < a.cols; ++c) os << ",c" << c;
    os << '\n';
    for (std::size_t k = 0; k < a.cycles; ++k) {
        for (std::size_t r = 0; r < a.rows; ++r) {
            os << k << ',' << r;
            for (std::size_t c = 0; c < a.cols; ++c) os << ',' << static_cast<int>(a.at(r, c, k));
            os << '\n';
        }
    }
}

}  // namespace memxbar
