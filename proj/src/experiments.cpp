#include "memxbar/experiments.hpp"

#include "memxbar/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <random>

namespace memxbar {

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void row(std::ostream& os, const std::string& label, const std::string& value) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-32s %s\n", label.c_str(), value.c_str());
    os << buf;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b) {
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(seed), hi(seed), lo(stream_a), hi(stream_a), lo(stream_b), hi(stream_b)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

// ---- device test -----------------------------------------------------------

DeviceTestResult run_device_test(const ExperimentConfig& cfg) {
    cfg.validate();
    Netlist net;
    const std::size_t model = net.add_device_model(cfg.device);
    const NodeId in = net.add_node("in");
    const WaveformId w = net.add_waveform("in");
    net.add_source("Vin", in, w);
    net.add_memristor("M", in, kGround, model, {cfg.device.x0});

    const TimingConfig& tm = cfg.timing;
    Schedule sched(net);
    PwlWaveform& wf = sched.waveforms[w];
    struct Read {
        double t0, t1;
    };
    std::vector<Read> reads;
    double t = 0.0;
    for (const auto& step : cfg.device_test.sequence) {
        const bool is_read = step == "read";
        const double v = is_read ? tm.v_read : (step == "write" ? tm.v_write : -tm.v_write);
        const double width = is_read ? tm.read_width : tm.write_width;
        const double start = t + 0.5 * tm.gap;
        wf.add(start, 0.0);
        wf.add(start + tm.ramp, v);
        wf.add(start + tm.ramp + width, v);
        wf.add(start + 2.0 * tm.ramp + width, 0.0);
        if (is_read) reads.push_back({start + tm.ramp, start + tm.ramp + width});
        t += tm.slot(width);
    }
    sched.t_end = t;

    const Probe probes[] = {{Probe::Kind::node_voltage, in},
                            {Probe::Kind::memristor_current, 0},
                            {Probe::Kind::memristor_state, 0}};
    const Trace tr = transient_run(net, sched, cfg.solver, probes);

    DeviceTestResult r;
    r.samples.reserve(tr.time.size());
    for (std::size_t k = 0; k < tr.time.size(); ++k) {
        r.samples.push_back({tr.time[k], tr.columns[0][k], tr.columns[1][k], tr.columns[2][k]});
    }
    for (const auto& rd : reads) {
        // Plateau sample nearest the middle of the read pulse.
        const double mid = 0.5 * (rd.t0 + rd.t1);
        const auto it = std::lower_bound(tr.time.begin(), tr.time.end(), mid);
        const auto k = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - tr.time.begin(),
                                                                         static_cast<std::ptrdiff_t>(tr.time.size() - 1)));
        r.read_resistance.push_back(r.samples[k].v / r.samples[k].i);
    }
    r.r_on = memxbar::r_on(cfg.device, tm.v_read);
    r.r_off = memxbar::r_off(cfg.device, tm.v_read);
    r.energy = tr.total_energy();
    return r;
}

void write_device_test_csv(std::ostream& os, const DeviceTestResult& r) {
    os << "time_ns,v_volts,i_amperes,x\n";
    for (const auto& s : r.samples) {
        os << format_number(s.t * 1e9) << ',' << format_number(s.v) << ',' << format_number(s.i) << ','
           << format_number(s.x) << '\n';
    }
}

void write_device_test_summary(std::ostream& os, const DeviceTestResult& r, const ExperimentConfig& cfg) {
    row(os, "sequence", [&] {
        std::string s;
        for (const auto& p : cfg.device_test.sequence) s += (s.empty() ? "" : " ") + p;
        return s;
    }());
    row(os, "R_on (Ohm)", fmt("%.6g", r.r_on));
    row(os, "R_off (Ohm)", fmt("%.6g", r.r_off));
    row(os, "R_off/R_on", fmt("%.6g", r.r_off / r.r_on));
    for (std::size_t i = 0; i < r.read_resistance.size(); ++i) {
        row(os, "read " + std::to_string(i + 1) + " resistance (Ohm)", fmt("%.6g", r.read_resistance[i]));
    }
    row(os, "final x", fmt("%.6g", r.samples.empty() ? 0.0 : r.samples.back().x));
    row(os, "source energy (J)", fmt("%.6g", r.energy));
}

// ---- crossbar write-energy scaling ----------------------------------------

double crossbar_write_energy(const ExperimentConfig& cfg, std::size_t size, std::uint64_t trial_seed) {
    std::mt19937_64 rng(trial_seed);
    CrossbarSpec spec = cfg.crossbar_spec(size, size);
    spec.initial_x.resize(size * size);
    for (auto& x : spec.initial_x) x = (rng() >> 63) ? 1.0 : cfg.device.x_floor;
    const std::size_t r = static_cast<std::size_t>(rng() % size);
    const std::size_t c = static_cast<std::size_t>(rng() % size);
    const bool bit = (rng() >> 63) != 0;

    const BuiltArray built = build_unconstrained(spec);
    ProtocolBuilder b(built, cfg.timing);
    b.write_cell(r, c, bit);
    const Trace tr = transient_run(built.net, b.finish(), cfg.solver);
    return tr.total_energy();
}

std::vector<EnergyScalingRow> run_energy_scaling(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto& sizes = cfg.energy_scaling.sizes;
    const std::size_t trials = cfg.energy_scaling.trials;
    std::vector<double> energy(sizes.size() * trials, 0.0);
    std::vector<std::string> errors(energy.size());
    const auto n = static_cast<long>(energy.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        const std::size_t s = static_cast<std::size_t>(i) / trials;
        const std::size_t t = static_cast<std::size_t>(i) % trials;
        try {
            energy[i] = crossbar_write_energy(cfg, sizes[s], derive_seed(cfg.workload.seed, sizes[s], t));
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i].empty()) {
            throw std::runtime_error("energy scaling size " + std::to_string(sizes[i / trials]) + ": " + errors[i]);
        }
    }
    std::vector<EnergyScalingRow> rows;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        EnergyScalingRow r;
        r.size = sizes[s];
        r.trials = trials;
        r.beyond_simulated_scale = sizes[s] > 16;
        double sum = 0.0;
        for (std::size_t t = 0; t < trials; ++t) sum += energy[s * trials + t];
        r.energy = sum / static_cast<double>(trials);
        if (trials > 1) {
            double ss = 0.0;
            for (std::size_t t = 0; t < trials; ++t) ss += std::pow(energy[s * trials + t] - r.energy, 2);
            r.std_error = std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials));
        }
        rows.push_back(r);
    }
    return rows;
}

void write_energy_scaling_csv(std::ostream& os, const std::vector<EnergyScalingRow>& rows) {
    os << "size,write_energy_J,std_error_J,trials,beyond_simulated_scale\n";
    for (const auto& r : rows) {
        os << r.size << ',' << format_number(r.energy) << ',' << format_number(r.std_error) << ',' << r.trials << ','
           << (r.beyond_simulated_scale ? 1 : 0) << '\n';
    }
}

// ---- tile characterization ------------------------------------------------

TileReport run_tile(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.topology.type != Architecture::hybrid) {
        throw InvalidInput("tile characterization needs topology.type = hybrid");
    }
    const HybridArraySpec spec = cfg.hybrid_spec();
    const BuiltArray built = build_hybrid(spec);

    TileReport r;
    r.tile_rows = spec.tile_rows;
    r.tile_cols = spec.tile_cols;
    r.tiles_x = spec.tiles_x;
    r.tiles_y = spec.tiles_y;
    r.v_write = cfg.timing.v_write;
    r.sense_r_on = cfg.topology.sense_r_on;
    r.sense_r = spec.sense_r;
    r.wire_r = spec.wire_r;
    r.seed = cfg.workload.seed;
    r.rounds = cfg.workload.rounds;

    const GeneratedWorkload work = generate_workload(r.seed, r.rounds, built, cfg.timing);
    std::vector<Probe> probes;
    for (const auto& label : cfg.output.probes) probes.push_back(parse_probe(built.net, label));
    r.netlist_summary = topology_summary(built);

    ArrayRun run = run_array(built, work, cfg.solver, {}, &work.answers, probes);
    if (!probes.empty()) r.probe_trace = std::move(run.trace);
    r.margin = noise_margin(run.samples);
    r.threshold = comparator_threshold(spec.sense_r, spec.threshold_r, cfg.timing.v_read, spec.device);
    r.comparator_errors = count_errors(run.samples, r.threshold);
    r.reads = run.samples.size();
    for (double v : run.worst_half_select) r.worst_half_select = std::max(r.worst_half_select, v);
    r.max_write_voltage = run.max_write_voltage;
    r.disturbing_reads = run.disturbing_reads;
    r.samples = std::move(run.samples);

    const GeneratedWorkload wonly = writes_only(work.workload, built, cfg.timing);
    const ArrayRun wrun = run_array(built, wonly, cfg.solver);
    r.write_energy = energy_per_bit(wrun.trace, wonly.windows, OpKind::write);
    const SwitchPeaks peaks = peak_switch_current(wrun.trace, built.net);
    r.peak_switch_current = peaks.max;
    r.peak_switch = peaks.max_switch;

    const GeneratedWorkload ronly = reads_only(cfg.workload.read_passes, built, cfg.timing);
    const auto init = random_states(derive_seed(r.seed, 1), built.net.memristors().size(), spec.device);
    const ArrayRun rrun = run_array(built, ronly, cfg.solver, init);
    r.read_energy = energy_per_bit(rrun.trace, ronly.windows, OpKind::read);
    return r;
}

void write_tile_report(std::ostream& os, const TileReport& r) {
    const std::string tile = std::to_string(r.tile_rows) + "x" + std::to_string(r.tile_cols);
    row(os, "Tile Size", tile + " (" + std::to_string(r.tiles_y) + "x" + std::to_string(r.tiles_x) + " tiles)");
    row(os, "Write/Erase Voltage (V)", fmt("%.6g", r.v_write));
    row(os, "Write Energy (pJ)", fmt("%.6g", r.write_energy.per_bit * 1e12) + " per bit, se " +
                                     fmt("%.3g", r.write_energy.std_error * 1e12) + ", " +
                                     std::to_string(r.write_energy.ops) + " writes");
    row(os, "Read Energy (fJ)", fmt("%.6g", r.read_energy.per_bit * 1e15) + " per bit, se " +
                                    fmt("%.3g", r.read_energy.std_error * 1e15) + ", " +
                                    std::to_string(r.read_energy.ops) + " reads");
    row(os, "Sense Resistance (Ohm)", fmt("%.6g", r.sense_r) + " (" + fmt("%.6g", r.sense_r_on) + " R_on)");
    row(os, "Max. Noise Margin (mV)", fmt("%.6g", r.margin.margin * 1e3));
    row(os, "Wire Resistance (Ohm)", fmt("%.6g", r.wire_r));
    row(os, "min stored-1 peak (mV)", fmt("%.6g", r.margin.min_one * 1e3));
    row(os, "max stored-0 peak (mV)", fmt("%.6g", r.margin.max_zero * 1e3));
    row(os, "errors at best threshold", std::to_string(r.margin.errors) + " of " + std::to_string(r.reads));
    row(os, "comparator threshold (mV)", fmt("%.6g", r.threshold * 1e3));
    row(os, "errors at comparator", std::to_string(r.comparator_errors) + " of " + std::to_string(r.reads));
    row(os, "peak switch current (uA)", fmt("%.6g", r.peak_switch_current * 1e6) + " (" + r.peak_switch + ")");
    row(os, "worst half-select (V)", fmt("%.6g", r.worst_half_select));
    row(os, "max device voltage, writes (V)", fmt("%.6g", r.max_write_voltage));
    row(os, "reads that changed a state", std::to_string(r.disturbing_reads));
    row(os, "seed", std::to_string(r.seed));
    row(os, "rounds", std::to_string(r.rounds));
}

std::string tile_record(const TileReport& r) {
    nlohmann::ordered_json j{{"tile_rows", r.tile_rows},
                             {"tile_cols", r.tile_cols},
                             {"tiles_x", r.tiles_x},
                             {"tiles_y", r.tiles_y},
                             {"v_write", r.v_write},
                             {"sense_r_on", r.sense_r_on},
                             {"sense_r", r.sense_r},
                             {"wire_r", r.wire_r},
                             {"seed", r.seed},
                             {"rounds", r.rounds},
                             {"margin_V", r.margin.margin},
                             {"errors_best_threshold", r.margin.errors},
                             {"min_one_V", r.margin.min_one},
                             {"max_zero_V", r.margin.max_zero},
                             {"threshold_V", r.threshold},
                             {"comparator_errors", r.comparator_errors},
                             {"reads", r.reads},
                             {"write_energy_J", r.write_energy.per_bit},
                             {"write_energy_se_J", r.write_energy.std_error},
                             {"writes", r.write_energy.ops},
                             {"read_energy_J", r.read_energy.per_bit},
                             {"read_energy_se_J", r.read_energy.std_error},
                             {"read_ops", r.read_energy.ops},
                             {"peak_switch_current_A", r.peak_switch_current},
                             {"peak_switch", r.peak_switch},
                             {"worst_half_select_V", r.worst_half_select},
                             {"max_write_voltage_V", r.max_write_voltage},
                             {"disturbing_reads", r.disturbing_reads}};
    return j.dump();
}

void write_read_samples_csv(std::ostream& os, const std::vector<ReadSample>& samples) {
    os << "cycle,row,col,peak_V,expected\n";
    for (const auto& s : samples) {
        os << s.cycle << ',' << s.row << ',' << s.col << ',' << format_number(s.peak) << ','
           << static_cast<int>(s.expected) << '\n';
    }
}

// ---- sweep ----------------------------------------------------------------

std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg, int jobs) {
    cfg.validate();
    std::vector<SweepPoint> points;
    for (std::size_t t : cfg.sweep.tile) {
        for (double v : cfg.sweep.v_write) {
            for (double rs : cfg.sweep.sense_r_on) points.push_back({t, v, rs, false, {}, {}, false});
        }
    }
    std::sort(points.begin(), points.end(), [](const SweepPoint& a, const SweepPoint& b) {
        return std::tie(a.tile, a.v_write, a.sense_r_on) < std::tie(b.tile, b.v_write, b.sense_r_on);
    });

    const auto n = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
    for (long i = 0; i < n; ++i) {
        SweepPoint& p = points[static_cast<std::size_t>(i)];
        ExperimentConfig c = cfg;
        c.topology.tile_rows = c.topology.tile_cols = p.tile;
        c.timing.v_write = p.v_write;
        c.topology.sense_r_on = p.sense_r_on;
        c.workload.rounds = cfg.sweep.rounds;
        try {
            p.report = run_tile(c);
            p.report.samples.clear();
            p.report.probe_trace = {};
            p.ok = true;
        } catch (const std::exception& e) {
            p.error = e.what();
        }
    }

    double best = -1.0;
    for (const auto& p : points) {
        if (p.ok) best = std::max(best, p.report.margin.margin);
    }
    for (auto& p : points) p.argmax = p.ok && p.report.margin.margin == best;
    return points;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
    os << "tile,v_write,sense_r_on,ok,margin_V,errors_best_threshold,comparator_errors,write_energy_J,read_energy_J,"
          "peak_switch_current_A,worst_half_select_V,argmax,error\n";
    for (const auto& p : points) {
        const TileReport& r = p.report;
        os << p.tile << ',' << format_number(p.v_write) << ',' << format_number(p.sense_r_on) << ',' << (p.ok ? 1 : 0)
           << ',';
        if (p.ok) {
            os << format_number(r.margin.margin) << ',' << r.margin.errors << ',' << r.comparator_errors << ','
               << format_number(r.write_energy.per_bit) << ',' << format_number(r.read_energy.per_bit) << ','
               << format_number(r.peak_switch_current) << ',' << format_number(r.worst_half_select);
        } else {
            os << ",,,,,,";
        }
        std::string err = p.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        os << ',' << (p.argmax ? 1 : 0) << ',' << err << '\n';
    }
}

void write_sweep_table(std::ostream& os, const std::vector<SweepPoint>& points) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-6s %8s %10s %12s %8s %14s %14s %12s %s\n", "tile", "Vw (V)", "R_s/R_on",
                  "margin (mV)", "errors", "write (pJ/bit)", "read (fJ/bit)", "peak (uA)", "");
    os << buf;
    for (const auto& p : points) {
        const std::string tile = std::to_string(p.tile) + "x" + std::to_string(p.tile);
        if (!p.ok) {
            std::snprintf(buf, sizeof buf, "%-6s %8.4g %10.4g  failed: %s\n", tile.c_str(), p.v_write, p.sense_r_on,
                          p.error.c_str());
            os << buf;
            continue;
        }
        const TileReport& r = p.report;
        std::snprintf(buf, sizeof buf, "%-6s %8.4g %10.4g %12.5g %8zu %14.5g %14.5g %12.5g %s\n", tile.c_str(),
                      p.v_write, p.sense_r_on, r.margin.margin * 1e3, r.margin.errors, r.write_energy.per_bit * 1e12,
                      r.read_energy.per_bit * 1e15, r.peak_switch_current * 1e6, p.argmax ? "<- max margin" : "");
        os << buf;
    }
}

}  // namespace memxbar
